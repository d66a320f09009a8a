#include "rdmud/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

#include "rdmud/errors.hpp"

namespace rdmud {

namespace {

using cd = std::complex<double>;

// Symbol decisions never produce 0; an exact zero statistic decides +1.
double sign_of(double x) noexcept { return x < 0.0 ? -1.0 : 1.0; }

void check_input(const Scenario& scn, const Eigen::VectorXcd& y) {
  if (y.size() != scn.correlators())
    throw DimensionMismatch("front-end output has " + std::to_string(y.size()) +
                            " entries, scenario has M=" + std::to_string(scn.correlators()));
}

// Indices of the K largest |c_n|; lowest index wins ties. Returned sorted.
std::vector<int> top_k_magnitudes(const Eigen::VectorXd& c, int k) {
  std::vector<int> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int a, int b) {
    const double ma = std::abs(c(a)), mb = std::abs(c(b));
    return ma > mb || (ma == mb && a < b);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

DetectionResult empty_result(int users) {
  return DetectionResult{{}, Eigen::VectorXd::Zero(users), {}};
}

}  // namespace

std::string_view to_string(Detector d) noexcept {
  switch (d) {
    case Detector::rdd: return "rdd";
    case Detector::rddf: return "rddf";
    case Detector::rd_mmse: return "rd-mmse";
    case Detector::ml: return "ml";
    case Detector::decorrelator: return "decorrelator";
  }
  return "?";
}

Detector parse_detector(std::string_view name) {
  for (Detector d : {Detector::rdd, Detector::rddf, Detector::rd_mmse, Detector::ml,
                     Detector::decorrelator})
    if (name == to_string(d)) return d;
  throw InvalidArgument("unknown detector '" + std::string(name) + "'");
}

Eigen::VectorXd correlation_statistics(const Scenario& scn, const Eigen::VectorXcd& y) {
  check_input(scn, y);
  const Eigen::MatrixXcd& a = scn.matrix().matrix();
  // Re[a_n^H y] = Re(a_n)^T Re(y) + Im(a_n)^T Im(y)
  return a.real().transpose() * y.real() + a.imag().transpose() * y.imag();
}

DetectionResult rdd_detect(const Scenario& scn, const Eigen::VectorXcd& y) {
  const Eigen::VectorXd c = correlation_statistics(scn, y);
  DetectionResult out = empty_result(scn.users());
  out.support = top_k_magnitudes(c, scn.active_users());
  for (int n : out.support) out.symbols(n) = sign_of(scn.gains()(n) * c(n));
  return out;
}

DetectionResult rddf_detect(const Scenario& scn, const Eigen::VectorXcd& y) {
  check_input(scn, y);
  const Eigen::MatrixXcd& a = scn.matrix().matrix();
  const int n_users = scn.users();
  const int k = scn.active_users();

  DetectionResult out = empty_result(n_users);
  std::vector<bool> taken(n_users, false);
  Eigen::VectorXcd residual = y;
  for (int step = 0; step < k; ++step) {
    const Eigen::VectorXd c =
        a.real().transpose() * residual.real() + a.imag().transpose() * residual.imag();
    int best = -1;
    double best_mag = -1.0;
    for (int n = 0; n < n_users; ++n) {
      if (taken[n]) continue;
      const double mag = std::abs(c(n));
      if (mag > best_mag) {
        best = n;
        best_mag = mag;
      }
    }
    const double r = scn.gains()(best);
    const double b = sign_of(r * c(best));
    taken[best] = true;
    out.symbols(best) = b;
    out.trace.push_back({best, c(best)});
    residual -= (r * b) * a.col(best);
  }
  for (int n = 0; n < n_users; ++n)
    if (taken[n]) out.support.push_back(n);
  return out;
}

DetectionResult rd_mmse_detect(const Scenario& scn, const Eigen::VectorXcd& y,
                               std::span<const int> support) {
  check_input(scn, y);
  const int n_users = scn.users();
  if (static_cast<int>(support.size()) != scn.active_users())
    throw DimensionMismatch("RD-MMSE support size differs from K");
  for (int n : support)
    if (n < 0 || n >= n_users) throw InvalidDimensions("RD-MMSE support index out of range");

  const Eigen::MatrixXcd& a = scn.matrix().matrix();
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd a_sub(a.rows(), k);
  Eigen::VectorXd r_sub(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    a_sub.col(j) = a.col(support[j]);
    r_sub(j) = scn.gains()(support[j]);
  }
  const Eigen::MatrixXcd ar = a_sub * r_sub.asDiagonal();
  const Eigen::MatrixXcd system = ar * ar.adjoint() + scn.noise_covariance();

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SingularSystem("RD-MMSE system is numerically singular (rank " +
                         std::to_string(lu.rank()) + " of " + std::to_string(system.rows()) + ")");
  const Eigen::VectorXcd est = ar.adjoint() * lu.solve(y);

  DetectionResult out = empty_result(n_users);
  out.support.assign(support.begin(), support.end());
  std::sort(out.support.begin(), out.support.end());
  for (Eigen::Index j = 0; j < k; ++j) out.symbols(support[j]) = sign_of(est(j).real());
  return out;
}

DetectionResult rd_mmse_detect(const Scenario& scn, const Eigen::VectorXcd& y, SupportRule rule) {
  const DetectionResult first =
      rule == SupportRule::rdd ? rdd_detect(scn, y) : rddf_detect(scn, y);
  return rd_mmse_detect(scn, y, first.support);
}

std::uint64_t ml_candidate_count(int users, int active_users) noexcept {
  if (active_users < 0 || active_users > users) return 0;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  // C(n,k) built incrementally; each partial product is itself a binomial.
  std::uint64_t count = 1;
  for (int i = 1; i <= active_users; ++i) {
    const auto num = static_cast<std::uint64_t>(users - active_users + i);
    if (count > kMax / num) return kMax;
    count = count * num / static_cast<std::uint64_t>(i);
  }
  for (int i = 0; i < active_users; ++i) {
    if (count > kMax / 2) return kMax;
    count *= 2;
  }
  return count;
}

DetectionResult ml_detect(const Scenario& scn, const Eigen::VectorXcd& y, std::uint64_t budget) {
  check_input(scn, y);
  const int n_users = scn.users();
  const int k = scn.active_users();
  const std::uint64_t candidates = ml_candidate_count(n_users, k);
  if (candidates > budget)
    throw BudgetExceeded("ML search needs " + std::to_string(candidates) +
                         " candidates, budget is " + std::to_string(budget));

  const Eigen::MatrixXcd& a = scn.matrix().matrix();
  const Eigen::MatrixXcd cov = a * scn.gram().inverse().cast<cd>() * a.adjoint();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(cov);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SingularSystem("A G^-1 A^H is singular (rank " + std::to_string(lu.rank()) + " of " +
                         std::to_string(cov.rows()) + "); ML needs M <= N and full-rank A");

  // With x = R b real, the objective is 2 g^T x - x^T Q x where
  // g = Re[A^H W y] and Q = Re[A^H W A].
  const Eigen::MatrixXcd wa = lu.solve(a);
  const Eigen::VectorXd g = (wa.adjoint() * y).real();
  const Eigen::MatrixXd q = (a.adjoint() * wa).real();
  const Eigen::VectorXd& r = scn.gains();

  DetectionResult best = empty_result(n_users);
  double best_value = -std::numeric_limits<double>::infinity();

  std::vector<int> support(k);
  std::iota(support.begin(), support.end(), 0);
  std::vector<double> x(k);
  const std::uint64_t patterns = std::uint64_t{1} << k;
  while (true) {
    for (std::uint64_t p = 0; p < patterns; ++p) {
      // First support element is the most significant bit; bit 0 means -1.
      for (int j = 0; j < k; ++j) {
        const bool plus = (p >> (k - 1 - j)) & 1U;
        x[j] = (plus ? 1.0 : -1.0) * r(support[j]);
      }
      double value = 0.0;
      for (int j = 0; j < k; ++j) {
        double row = 0.0;
        for (int l = 0; l < k; ++l) row += q(support[j], support[l]) * x[l];
        value += 2.0 * g(support[j]) * x[j] - x[j] * row;
      }
      if (value > best_value) {
        best_value = value;
        best.support = support;
        best.symbols.setZero();
        for (int j = 0; j < k; ++j) best.symbols(support[j]) = x[j] / r(support[j]) > 0 ? 1.0 : -1.0;
      }
    }
    // Next combination in lexicographic order.
    int j = k - 1;
    while (j >= 0 && support[j] == n_users - k + j) --j;
    if (j < 0) break;
    ++support[j];
    for (int l = j + 1; l < k; ++l) support[l] = support[l - 1] + 1;
  }
  return best;
}

DetectionResult decorrelating_detect(const Scenario& scn, const Eigen::VectorXcd& y) {
  if (scn.matrix().kind() != MatrixKind::identity &&
      !(scn.matrix().correlators() == scn.users() && scn.matrix().matrix().isIdentity(0.0)))
    throw NotIdentityMatrix("decorrelating detector requires A = I");
  return rdd_detect(scn, y);
}

DetectionResult detect(Detector which, const Scenario& scn, const Eigen::VectorXcd& y,
                       const DetectOptions& opts) {
  switch (which) {
    case Detector::rdd: return rdd_detect(scn, y);
    case Detector::rddf: return rddf_detect(scn, y);
    case Detector::rd_mmse: return rd_mmse_detect(scn, y, opts.mmse_support);
    case Detector::ml: return ml_detect(scn, y, opts.ml_budget);
    case Detector::decorrelator: return decorrelating_detect(scn, y);
  }
  throw InvalidArgument("unknown detector");
}

bool is_block_error(const TransmitState& truth, const DetectionResult& result) {
  return truth.support != result.support || truth.symbols != result.symbols;
}

}  // namespace rdmud
