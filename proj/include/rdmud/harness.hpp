#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "rdmud/config.hpp"
#include "rdmud/detectors.hpp"
#include "rdmud/model.hpp"

namespace rdmud {

struct PeEstimate {
  std::int64_t errors = 0;
  std::int64_t trials = 0;
  double pe = 0.0;
  double ci_lo = 0.0;  // Wilson 95% interval
  double ci_hi = 0.0;
};

PeEstimate estimate_pe(std::int64_t errors, std::int64_t trials);

/// True when two 95% intervals intersect.
bool intervals_overlap(const PeEstimate& a, const PeEstimate& b) noexcept;

struct PointResult {
  Detector detector;
  int correlators;  // M
  double snr_db;
  PeEstimate estimate;
  double mu_mean;  // mean coherence of the matrices used
};

/// Shared, immutable state for one experiment configuration: Gram matrix,
/// gains, fixed state, custom matrix. Points may run concurrently.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const std::shared_ptr<const GramMatrix>& gram() const noexcept { return gram_; }

  /// Measurement matrix used for M when matrices are not redrawn per trial.
  MeasurementMatrix fixed_matrix(int correlators) const;

  /// Scenario at (M, SNR) with the fixed matrix for M. The decorrelator
  /// always uses A = I.
  Scenario scenario(int correlators, double snr_db, Detector detector = Detector::rdd) const;

  PointResult run_point(int correlators, double snr_db, Detector detector) const;

  /// Every (detector, SNR, M) combination; decorrelator rows once per SNR at
  /// M = N. Each row is written and flushed to csv as soon as it is done.
  std::vector<PointResult> run_sweep(std::ostream* csv = nullptr) const;

 private:
  ExperimentConfig cfg_;
  std::shared_ptr<const GramMatrix> gram_;
  Eigen::VectorXd gains_;
  double rmin_ = 1.0;
  std::optional<MeasurementMatrix> custom_;
  std::optional<TransmitState> fixed_state_;
};

PointResult run_point(const ExperimentConfig& cfg, int correlators, double snr_db,
                      Detector detector);
std::vector<PointResult> run_sweep(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

/// detector,N,K,M,L,snr_db,trials,errors,pe,ci_lo,ci_hi,mu_mean,seed
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ExperimentConfig& cfg, const PointResult& row);

struct CoherenceStats {
  int samples = 0;
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  double welch = 0.0;
};

/// Coherence of `samples` independent random partial DFT matrices.
CoherenceStats coherence_statistics(int users, int correlators, std::uint64_t seed, int samples);

}  // namespace rdmud
