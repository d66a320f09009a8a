#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "rdmud/rng.hpp"

namespace rdmud {

enum class MatrixKind { identity, partial_dft, custom };

/// Complex M x N coefficient matrix that weights the biorthogonal waveforms
/// into the M correlating signals. Columns always have unit Euclidean norm.
class MeasurementMatrix {
 public:
  static MeasurementMatrix identity(int users);

  /// M distinct rows of the N-point DFT, drawn uniformly without replacement,
  /// scaled by 1/sqrt(M). Row 0 (all ones) is selectable.
  static MeasurementMatrix partial_dft(int users, int correlators, Rng& rng);

  /// Partial DFT with an explicit row list (kept in the given order).
  static MeasurementMatrix partial_dft_rows(int users, std::vector<int> rows);

  /// Arbitrary matrix; columns are rescaled to unit norm. The largest
  /// |scale - 1| applied is reported by normalization_adjustment().
  static MeasurementMatrix custom(Eigen::MatrixXcd a);

  const Eigen::MatrixXcd& matrix() const noexcept { return a_; }
  int correlators() const noexcept { return static_cast<int>(a_.rows()); }
  int users() const noexcept { return static_cast<int>(a_.cols()); }
  MatrixKind kind() const noexcept { return kind_; }
  const std::vector<int>& dft_rows() const noexcept { return rows_; }
  double normalization_adjustment() const noexcept { return adjustment_; }

 private:
  MeasurementMatrix(Eigen::MatrixXcd a, MatrixKind kind, std::vector<int> rows,
                    double adjustment)
      : a_(std::move(a)), kind_(kind), rows_(std::move(rows)), adjustment_(adjustment) {}

  Eigen::MatrixXcd a_;
  MatrixKind kind_;
  std::vector<int> rows_;
  double adjustment_ = 0.0;
};

// Rescale factors further than this from 1 trigger a warning on load.
inline constexpr double kRescaleWarnThreshold = 1e-6;

/// Reads the custom-matrix CSV: 2M rows by N columns, the M rows of the real
/// part followed by the M rows of the imaginary part.
MeasurementMatrix load_measurement_matrix(const std::filesystem::path& path);

/// max_{n != l} |a_n^H a_l|. Partial DFT matrices use the circulant structure
/// of A^H A (the product depends only on l - n mod N), everything else is
/// maximized pair by pair.
double coherence(const MeasurementMatrix& a);

/// max_n a_n^H A A^H a_n.
double max_column_energy(const MeasurementMatrix& a);

/// Welch lower bound on the coherence of N unit vectors in C^M.
double welch_bound(int users, int correlators);

}  // namespace rdmud
