#include "rdmud/analysis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rdmud/errors.hpp"

namespace rdmud {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be positive");
}

}  // namespace

double compute_tau(const Scenario& scn, double alpha) {
  check_alpha(alpha);
  if (scn.sigma() == 0.0) return 0.0;
  const double log_n = std::log(static_cast<double>(scn.users()));
  return scn.sigma() * std::sqrt(2.0 * (1.0 + alpha) * log_n) *
         std::sqrt(scn.gram().max_inverse_eigenvalue()) *
         std::sqrt(max_column_energy(scn.matrix()));
}

double error_probability_bound(int users, double alpha) {
  check_alpha(alpha);
  if (users < 2) throw InvalidDimensions("error bound needs N >= 2");
  const double n = users;
  return std::pow(n, -alpha) / std::sqrt(std::numbers::pi * (1.0 + alpha) * std::log(n));
}

BoundReport check_conditions(const Scenario& scn, double alpha) {
  BoundReport rep;
  rep.alpha = alpha;
  rep.tau = compute_tau(scn, alpha);
  rep.mu = coherence(scn.matrix());
  const double spread = 2.0 * scn.active_users() - 1.0;
  rep.rdd_margin = scn.rmin() - spread * rep.mu * scn.rmax() - 2.0 * rep.tau;
  rep.rddf_margin = scn.rmin() - spread * rep.mu * scn.rmin() - 2.0 * rep.tau;
  rep.rdd_condition_met = rep.rdd_margin >= 0.0;
  rep.rddf_condition_met = rep.rddf_margin >= 0.0;
  rep.pe_bound = error_probability_bound(scn.users(), alpha);
  rep.side_condition = rep.pe_bound / static_cast<double>(scn.users());
  rep.side_condition_met = rep.side_condition <= 1.0;
  return rep;
}

CorrelatorBound min_correlators(int users, int active_users, double rmin, double rmax,
                                double tau, double alpha, double c, BoundDetector detector) {
  if (!(c > 0.0)) throw InvalidArgument("tail constant c must be positive");
  if (users < 2 || active_users < 1) throw InvalidDimensions("need N >= 2 and K >= 1");
  rmin = std::abs(rmin);
  rmax = std::abs(rmax);
  if (!(rmin > 2.0 * tau))
    throw HypothesisViolated("|r_min| = " + std::to_string(rmin) + " does not exceed 2 tau = " +
                             std::to_string(2.0 * tau) + "; the correlator bound is vacuous");
  const double gain = detector == BoundDetector::rdd ? rmax : rmin;
  const double ratio = (2.0 * active_users - 1.0) * gain / (rmin - 2.0 * tau);
  CorrelatorBound out;
  out.required = 4.0 * ratio * ratio * (2.0 * std::log(static_cast<double>(users)) + c);
  out.min_correlators = static_cast<int>(std::ceil(out.required));
  out.failure_probability =
      1.0 - (1.0 - error_probability_bound(users, alpha)) * (1.0 - 2.0 * std::exp(-c));
  return out;
}

CorrelatorBound min_correlators(const Scenario& scn, double alpha, double c,
                                BoundDetector detector) {
  return min_correlators(scn.users(), scn.active_users(), scn.rmin(), scn.rmax(),
                         compute_tau(scn, alpha), alpha, c, detector);
}

}  // namespace rdmud
