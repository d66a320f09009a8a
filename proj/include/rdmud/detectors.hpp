#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rdmud/model.hpp"

namespace rdmud {

struct DetectionStep {
  int index;
  double statistic;  // Re[a_n^H v] at selection time
};

struct DetectionResult {
  std::vector<int> support;  // sorted ascending, size K
  Eigen::VectorXd symbols;   // +/-1 on support, 0 elsewhere
  std::vector<DetectionStep> trace;  // RDDF only, in selection order
};

enum class Detector { rdd, rddf, rd_mmse, ml, decorrelator };

std::string_view to_string(Detector d) noexcept;
/// Accepts "rdd", "rddf", "rd-mmse", "ml", "decorrelator". Throws InvalidArgument.
Detector parse_detector(std::string_view name);

/// Which support rule seeds the RD-MMSE symbol decisions.
enum class SupportRule { rdd, rddf };

inline constexpr std::uint64_t kDefaultMlBudget = 1'000'000;

/// Correlation statistics Re[A^H y].
Eigen::VectorXd correlation_statistics(const Scenario& scn, const Eigen::VectorXcd& y);

/// Reduced-dimension decorrelating detector: keep the K largest |Re[a_n^H y]|
/// (lowest index wins ties), then b_n = sgn(r_n Re[a_n^H y]).
DetectionResult rdd_detect(const Scenario& scn, const Eigen::VectorXcd& y);

/// Reduced-dimension decision-feedback detector (DF-OMP). Each of the K
/// iterations picks the not-yet-selected column most correlated with the
/// residual, decides its symbol, and subtracts r_n b_n a_n from the residual.
DetectionResult rddf_detect(const Scenario& scn, const Eigen::VectorXcd& y);

/// MMSE symbol decisions on a given support:
///   sgn Re[R_I A_I^H (A_I R_I^2 A_I^H + sigma^2 A G^-1 A^H)^-1 y].
/// Throws SingularSystem when the M x M system is numerically singular.
DetectionResult rd_mmse_detect(const Scenario& scn, const Eigen::VectorXcd& y,
                               std::span<const int> support);
DetectionResult rd_mmse_detect(const Scenario& scn, const Eigen::VectorXcd& y,
                               SupportRule rule = SupportRule::rdd);

/// Exhaustive maximum-likelihood detection over all K-sparse sign vectors,
/// maximizing 2 Re[y^H W A R b] - b^T R A^H W A R b with W = (A G^-1 A^H)^-1.
/// Supports are visited in lexicographic order and sign patterns in
/// lexicographic order with -1 < +1; only strict improvements replace the
/// incumbent. Throws BudgetExceeded when C(N,K) 2^K > budget.
DetectionResult ml_detect(const Scenario& scn, const Eigen::VectorXcd& y,
                          std::uint64_t budget = kDefaultMlBudget);

/// Conventional decorrelating detector: rdd_detect restricted to A = I.
/// Throws NotIdentityMatrix otherwise.
DetectionResult decorrelating_detect(const Scenario& scn, const Eigen::VectorXcd& y);

struct DetectOptions {
  SupportRule mmse_support = SupportRule::rdd;
  std::uint64_t ml_budget = kDefaultMlBudget;
};

DetectionResult detect(Detector which, const Scenario& scn, const Eigen::VectorXcd& y,
                       const DetectOptions& opts = {});

/// Block error: detected support or any detected symbol differs from the truth.
bool is_block_error(const TransmitState& truth, const DetectionResult& result);

/// C(n, k) * 2^k, saturating at UINT64_MAX.
std::uint64_t ml_candidate_count(int users, int active_users) noexcept;

}  // namespace rdmud
