#pragma once

#include "rdmud/detectors.hpp"
#include "rdmud/model.hpp"

namespace rdmud {

// All logarithms below are natural logarithms.

inline constexpr double kDefaultAlpha = 0.5;
inline constexpr double kDefaultTailConstant = 1.0;

/// Noise threshold
///   tau = sigma sqrt(2 (1 + alpha) ln N) sqrt(lambda_max(G^-1)) sqrt(max_n a_n^H A A^H a_n).
double compute_tau(const Scenario& scn, double alpha);

/// N^-alpha [pi (1 + alpha) ln N]^-1/2.
double error_probability_bound(int users, double alpha);

struct BoundReport {
  double alpha = 0.0;
  double tau = 0.0;
  double mu = 0.0;
  /// |r_min| - (2K-1) mu |r_max| - 2 tau; the RDD condition holds when >= 0.
  double rdd_margin = 0.0;
  /// |r_min| - (2K-1) mu |r_min| - 2 tau; the RDDF condition holds when >= 0.
  double rddf_margin = 0.0;
  bool rdd_condition_met = false;
  bool rddf_condition_met = false;
  double pe_bound = 0.0;
  /// N^-(1+alpha) [pi (1 + alpha) ln N]^-1/2, required to be <= 1.
  double side_condition = 0.0;
  bool side_condition_met = false;
};

BoundReport check_conditions(const Scenario& scn, double alpha);

enum class BoundDetector { rdd, rddf };

struct CorrelatorBound {
  /// 4 [(2K-1) r / (|r_min| - 2 tau)]^2 (2 ln N + c), r = |r_max| (RDD) or |r_min| (RDDF).
  double required = 0.0;
  /// Smallest integer M >= required.
  int min_correlators = 0;
  /// 1 - (1 - N^-alpha [pi (1 + alpha) ln N]^-1/2) (1 - 2 e^-c).
  double failure_probability = 0.0;
};

/// Correlator-count lower bound for a random partial DFT front-end. Throws
/// HypothesisViolated when |r_min| <= 2 tau.
CorrelatorBound min_correlators(int users, int active_users, double rmin, double rmax,
                                double tau, double alpha, double c, BoundDetector detector);
CorrelatorBound min_correlators(const Scenario& scn, double alpha, double c,
                                BoundDetector detector);

}  // namespace rdmud
