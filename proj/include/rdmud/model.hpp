#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rdmud/design.hpp"
#include "rdmud/rng.hpp"
#include "rdmud/waveforms.hpp"

namespace rdmud {

/// One RD-MUD problem instance: y = A R b + w, where w = A z and z is the
/// real matched-filter-domain noise with covariance sigma^2 G^-1.
class Scenario {
 public:
  Scenario(int active_users, Eigen::VectorXd gains, std::shared_ptr<const GramMatrix> gram,
           MeasurementMatrix a, double sigma);

  int users() const noexcept { return static_cast<int>(gains_.size()); }
  int active_users() const noexcept { return k_; }
  int correlators() const noexcept { return a_.correlators(); }
  const Eigen::VectorXd& gains() const noexcept { return gains_; }
  const GramMatrix& gram() const noexcept { return *gram_; }
  const std::shared_ptr<const GramMatrix>& shared_gram() const noexcept { return gram_; }
  const MeasurementMatrix& matrix() const noexcept { return a_; }
  double sigma() const noexcept { return sigma_; }
  double rmin() const noexcept { return rmin_; }
  double rmax() const noexcept { return rmax_; }
  /// rmin^2 / sigma^2 (infinite when sigma = 0).
  double snr() const noexcept;

  /// Same scenario with a different measurement matrix (fresh-A trials).
  Scenario with_matrix(MeasurementMatrix a) const;
  Scenario with_sigma(double sigma) const;

  /// sigma^2 A G^-1 A^H, the covariance of the front-end noise.
  Eigen::MatrixXcd noise_covariance() const;

 private:
  int k_;
  Eigen::VectorXd gains_;
  std::shared_ptr<const GramMatrix> gram_;
  MeasurementMatrix a_;
  double sigma_;
  double rmin_;
  double rmax_;
};

/// sigma from an SNR in dB: rmin / 10^(snr_db / 20). +inf maps to 0.
double sigma_from_snr_db(double rmin, double snr_db);

/// Ground truth: active set I (sorted) and b in {-1,0,+1}^N supported on I.
struct TransmitState {
  std::vector<int> support;
  Eigen::VectorXd symbols;

  /// Validates the support (sorted, distinct, in range) and +/-1 signs.
  static TransmitState make(int users, std::vector<int> support, const std::vector<int>& signs);
};

TransmitState random_transmit_state(int users, int active_users, Rng& rng);

/// z = sigma F u with F F^T = G^-1, u standard normal.
Eigen::VectorXd draw_noise(const GramMatrix& g, double sigma, Rng& rng);

struct FrontEndOutput {
  Eigen::VectorXcd y;
  Eigen::VectorXd z;  // matched-filter-domain noise that produced w = A z
};

/// y = A (R b + z) with z from draw_noise.
FrontEndOutput synthesize(const Scenario& scn, const TransmitState& state, Rng& rng);

/// y = A (R b + z) for a given z.
FrontEndOutput synthesize_with_noise(const Scenario& scn, const TransmitState& state,
                                     Eigen::VectorXd z);

}  // namespace rdmud
