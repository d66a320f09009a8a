#pragma once

// Discrete-time signature waveforms.
//
// A waveform on the symbol interval [0, T] is stored as L uniform samples and
// the inner product T^-1 \int x y dt becomes (1/L) sum_i x_i y_i. Under this
// normalization continuous white noise of variance sigma^2 maps to i.i.d.
// samples of variance L sigma^2:
//   cov(<s_n, w>, <s_l, w>) = (1/L^2) sum_i s_n[i] s_l[i] (L sigma^2)
//                           = sigma^2 G[n,l].

#include <Eigen/Dense>

#include "rdmud/design.hpp"
#include "rdmud/rng.hpp"

namespace rdmud {

inline constexpr double kDefaultMaxGramCondition = 1e10;

/// N signature waveforms, one per row, L samples each, unit energy.
class SignatureSet {
 public:
  /// Throws InvalidArgument unless every row has (1/L) sum s^2 = 1 within 1e-9.
  explicit SignatureSet(Eigen::MatrixXd samples);

  const Eigen::MatrixXd& samples() const noexcept { return s_; }
  int users() const noexcept { return static_cast<int>(s_.rows()); }
  int length() const noexcept { return static_cast<int>(s_.cols()); }

 private:
  Eigen::MatrixXd s_;
};

/// Random +/-1 chip sequences, redrawn until cond(G) <= max_condition.
SignatureSet random_binary_signatures(int users, int length, Rng& rng,
                                      double max_condition = 1e6, int max_attempts = 1000);

/// First N rows of the L x L Sylvester-Hadamard matrix (L a power of two).
/// Orthogonal, so G = I.
SignatureSet hadamard_signatures(int users, int length);

/// Symmetric positive definite crosscorrelation matrix with unit diagonal,
/// together with the factorizations the receiver needs.
class GramMatrix {
 public:
  explicit GramMatrix(Eigen::MatrixXd g, double max_condition = kDefaultMaxGramCondition);

  static GramMatrix identity(int users);
  /// (1 - rho) I + rho 1 1^T.
  static GramMatrix equicorrelated(int users, double rho);

  const Eigen::MatrixXd& matrix() const noexcept { return g_; }
  const Eigen::MatrixXd& inverse() const noexcept { return inverse_; }
  /// Lower-triangular F with F F^T = G^-1.
  const Eigen::MatrixXd& inverse_factor() const noexcept { return inverse_factor_; }
  /// Lower-triangular F with F F^T = G.
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }

  int users() const noexcept { return static_cast<int>(g_.rows()); }
  bool is_identity() const noexcept { return identity_; }
  double min_eigenvalue() const noexcept { return lambda_min_; }
  double max_eigenvalue() const noexcept { return lambda_max_; }
  double condition() const noexcept { return lambda_max_ / lambda_min_; }
  /// lambda_max(G^-1), taken as 1 / lambda_min(G).
  double max_inverse_eigenvalue() const noexcept { return 1.0 / lambda_min_; }

 private:
  Eigen::MatrixXd g_;
  Eigen::MatrixXd inverse_;
  Eigen::MatrixXd inverse_factor_;
  Eigen::MatrixXd factor_;
  double lambda_min_ = 1.0;
  double lambda_max_ = 1.0;
  bool identity_ = false;
};

/// G[n,l] = <s_n, s_l>. Throws NearSingularGram above max_condition.
GramMatrix gram(const SignatureSet& sigs, double max_condition = kDefaultMaxGramCondition);

/// Biorthogonal waveforms, one per row: S_hat = G^-1 S, so <s_n, s_hat_m> = delta.
Eigen::MatrixXd biorthogonal(const SignatureSet& sigs, const GramMatrix& g);

/// Correlating signals h_m = sum_n a_mn s_hat_n. The received signal is real,
/// so the complex bank is kept as a real and an imaginary part.
struct CorrelatorBank {
  Eigen::MatrixXd real;  // M x L
  Eigen::MatrixXd imag;  // M x L

  int correlators() const noexcept { return static_cast<int>(real.rows()); }
  int length() const noexcept { return static_cast<int>(real.cols()); }
};

CorrelatorBank build_correlators(const Eigen::MatrixXd& biorth, const MeasurementMatrix& a);
/// Same, from raw (not necessarily column-normalized) coefficients a_mn.
CorrelatorBank build_correlators(const Eigen::MatrixXd& biorth, const Eigen::MatrixXcd& coeffs);

/// y_m = <h_m, received>.
Eigen::VectorXcd frontend_correlate(const CorrelatorBank& bank, const Eigen::VectorXd& received);

/// Sum_n coeffs[n] s_n(t); with coeffs = R b this is the noiseless received signal.
Eigen::VectorXd superpose(const SignatureSet& sigs, const Eigen::VectorXd& coeffs);

/// Sampled noise whose correlation with each biorthogonal waveform is exactly
/// z_n. Lets the waveform front-end share a noise draw with the vector model.
inline Eigen::VectorXd embed_noise(const SignatureSet& sigs, const Eigen::VectorXd& z) {
  return superpose(sigs, z);
}

/// i.i.d. N(0, L sigma^2) samples: white noise of level sigma^2.
Eigen::VectorXd white_noise(int length, double sigma, Rng& rng);

}  // namespace rdmud
