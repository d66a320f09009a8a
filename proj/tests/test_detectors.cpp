#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "rdmud/design.hpp"
#include "rdmud/detectors.hpp"
#include "rdmud/errors.hpp"

namespace rdmud {
namespace {

using cd = std::complex<double>;

std::shared_ptr<const GramMatrix> identity_gram(int n) {
  return std::make_shared<const GramMatrix>(GramMatrix::identity(n));
}

void expect_well_formed(const DetectionResult& r, int n, int k) {
  ASSERT_EQ(static_cast<int>(r.support.size()), k);
  ASSERT_EQ(r.symbols.size(), n);
  for (std::size_t i = 1; i < r.support.size(); ++i) EXPECT_LT(r.support[i - 1], r.support[i]);
  int nonzero = 0;
  for (int i = 0; i < n; ++i)
    if (r.symbols(i) != 0.0) {
      ++nonzero;
      EXPECT_EQ(std::abs(r.symbols(i)), 1.0);
      EXPECT_TRUE(std::binary_search(r.support.begin(), r.support.end(), i));
    }
  EXPECT_EQ(nonzero, k);
}

// Random gains in [1, spread] with random signs.
Eigen::VectorXd random_gains(int n, double spread, Rng& rng) {
  std::uniform_real_distribution<double> mag(1.0, spread);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r(i) = (coin(rng) ? 1.0 : -1.0) * mag(rng);
  return r;
}

// Gaussian elimination with partial pivoting, kept independent of Eigen's solvers.
Eigen::VectorXcd dense_solve(Eigen::MatrixXcd a, Eigen::VectorXcd b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    a.row(col).swap(a.row(piv));
    std::swap(b(col), b(piv));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const cd f = a(r, col) / a(col, col);
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  Eigen::VectorXcd x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    cd acc = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return x;
}

TEST(Rdd, NoiselessIdentityRecoversTruth) {
  const Scenario scn(2, Eigen::VectorXd::Ones(6), identity_gram(6), MeasurementMatrix::identity(6), 0.0);
  const TransmitState st = TransmitState::make(6, {0, 1}, {1, -1});
  Rng rng(1);
  const DetectionResult r = rdd_detect(scn, synthesize(scn, st, rng).y);
  EXPECT_EQ(r.support, st.support);
  EXPECT_TRUE(r.symbols == st.symbols);
  EXPECT_FALSE(is_block_error(st, r));
}

TEST(Rdd, TiesGoToLowestIndex) {
  const Scenario scn(1, Eigen::VectorXd::Ones(4), identity_gram(4), MeasurementMatrix::identity(4), 0.0);
  Eigen::VectorXcd y(4);
  y << 0.5, -1.0, 1.0, 0.2;
  const DetectionResult r = rdd_detect(scn, y);
  EXPECT_EQ(r.support, std::vector<int>{1});
  EXPECT_EQ(r.symbols(1), -1.0);
  EXPECT_EQ(rddf_detect(scn, y).support, std::vector<int>{1});
}

TEST(Rdd, NegativeGainFlipsDecision) {
  Eigen::VectorXd r = Eigen::VectorXd::Ones(3);
  r(2) = -2.0;
  const Scenario scn(1, r, identity_gram(3), MeasurementMatrix::identity(3), 0.0);
  Eigen::VectorXcd y(3);
  y << 0.1, 0.0, -2.0;  // user 2 sent +1
  EXPECT_EQ(rdd_detect(scn, y).symbols(2), 1.0);
}

TEST(Rdd, NoiselessRecoveryUnderCoherenceCondition) {
  Rng rng(2);
  int checked = 0;
  while (checked < 300) {
    std::uniform_int_distribution<int> pick_n(8, 48), pick_k(1, 3);
    const int n = pick_n(rng), k = pick_k(rng);
    std::uniform_int_distribution<int> pick_m(std::max(1, n - 6), n);
    const MeasurementMatrix a = MeasurementMatrix::partial_dft(n, pick_m(rng), rng);
    const double mu = coherence(a);
    const Eigen::VectorXd r = random_gains(n, 3.0, rng);
    const double rmin = r.cwiseAbs().minCoeff(), rmax = r.cwiseAbs().maxCoeff();
    if (!(rmin > (2 * k - 1) * mu * rmax)) continue;
    const Scenario scn(k, r, identity_gram(n), a, 0.0);
    const TransmitState st = random_transmit_state(n, k, rng);
    const DetectionResult res = rdd_detect(scn, synthesize(scn, st, rng).y);
    ASSERT_FALSE(is_block_error(st, res)) << "n=" << n << " k=" << k << " mu=" << mu;
    ++checked;
  }
}

TEST(Rddf, NoiselessRecoveryUnderWeakerCondition) {
  Rng rng(3);
  int checked = 0;
  while (checked < 300) {
    std::uniform_int_distribution<int> pick_n(8, 48), pick_k(1, 3);
    const int n = pick_n(rng), k = pick_k(rng);
    std::uniform_int_distribution<int> pick_m(std::max(1, n - 6), n);
    const MeasurementMatrix a = MeasurementMatrix::partial_dft(n, pick_m(rng), rng);
    const double mu = coherence(a);
    if (!(1.0 > (2 * k - 1) * mu)) continue;  // |r_min| > (2K-1) mu |r_min|
    const Scenario scn(k, random_gains(n, 10.0, rng), identity_gram(n), a, 0.0);
    const TransmitState st = random_transmit_state(n, k, rng);
    const DetectionResult res = rddf_detect(scn, synthesize(scn, st, rng).y);
    ASSERT_FALSE(is_block_error(st, res)) << "n=" << n << " k=" << k << " mu=" << mu;
    ++checked;
  }
}

// Two equal-gain users on columns with overlap 1/2. The weaker active
// statistic (user 5) sits below inactive user 4, so thresholding fails;
// subtracting user 1 first exposes user 5. Found by randomized search over
// seeded partial DFT matrices and noise draws, frozen here.
TEST(Rddf, InterferenceCancellationRecoversWhereRddFails) {
  const Scenario scn(2, Eigen::VectorXd::Ones(8), identity_gram(8),
                     MeasurementMatrix::partial_dft_rows(8, {6, 1, 4, 0}), 0.3);
  EXPECT_NEAR(coherence(scn.matrix()), 0.5, 1e-12);
  const TransmitState st = TransmitState::make(8, {1, 5}, {1, -1});
  Eigen::VectorXd z(8);
  z << -0.110, 0.090, -0.246, 0.111, 0.000, 0.389, 0.160, 0.139;
  const Eigen::VectorXcd y = synthesize_with_noise(scn, st, z).y;

  const DetectionResult thresholded = rdd_detect(scn, y);
  EXPECT_EQ(thresholded.support, (std::vector<int>{1, 4}));
  EXPECT_TRUE(is_block_error(st, thresholded));

  const DetectionResult feedback = rddf_detect(scn, y);
  EXPECT_FALSE(is_block_error(st, feedback));
  ASSERT_EQ(feedback.trace.size(), 2U);
  EXPECT_EQ(feedback.trace[0].index, 1);
  EXPECT_NEAR(feedback.trace[0].statistic, 0.7558, 1e-4);
  EXPECT_EQ(feedback.trace[1].index, 5);
  EXPECT_NEAR(feedback.trace[1].statistic, -0.4123, 1e-4);
}

TEST(Rddf, SingleUserMatchesRddExactly) {
  Rng rng(4);
  for (int t = 0; t < 500; ++t) {
    const Scenario scn(1, random_gains(12, 2.0, rng), identity_gram(12),
                       MeasurementMatrix::partial_dft(12, 5, rng), 0.7);
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(12, 1, rng), rng).y;
    const DetectionResult a = rdd_detect(scn, y), b = rddf_detect(scn, y);
    ASSERT_EQ(a.support, b.support);
    ASSERT_TRUE(a.symbols == b.symbols);
  }
}

TEST(Rddf, NeverRepeatsAnIndexAndRecordsTrace) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Scenario scn(4, Eigen::VectorXd::Ones(10), identity_gram(10),
                       MeasurementMatrix::partial_dft(10, 3, rng), 2.0);
    const DetectionResult r = rddf_detect(scn, synthesize(scn, random_transmit_state(10, 4, rng), rng).y);
    expect_well_formed(r, 10, 4);
    ASSERT_EQ(r.trace.size(), 4U);
    for (const auto& step : r.trace) EXPECT_NE(r.symbols(step.index), 0.0);
  }
}

TEST(Detectors, PositiveScalingLeavesDecisionsUnchanged) {
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const Scenario scn(2, random_gains(10, 2.0, rng), identity_gram(10),
                       MeasurementMatrix::partial_dft(10, 6, rng), 0.5);
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(10, 2, rng), rng).y;
    const Eigen::VectorXcd scaled = 4.0 * y;  // power of two keeps the arithmetic exact
    EXPECT_EQ(rdd_detect(scn, y).symbols, rdd_detect(scn, scaled).symbols);
    // Decision feedback subtracts r_n b_n a_n, so the gains scale along with y.
    const Scenario louder(2, 4.0 * scn.gains(), scn.shared_gram(), scn.matrix(), 4.0 * scn.sigma());
    EXPECT_EQ(rddf_detect(scn, y).symbols, rddf_detect(louder, scaled).symbols);
  }
}

TEST(Detectors, AllOutputsAreWellFormed) {
  Rng rng(7);
  const auto g = std::make_shared<const GramMatrix>(GramMatrix::equicorrelated(8, 0.3));
  for (int t = 0; t < 50; ++t) {
    const Scenario scn(2, random_gains(8, 2.0, rng), g, MeasurementMatrix::partial_dft(8, 4, rng), 0.8);
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(8, 2, rng), rng).y;
    for (Detector d : {Detector::rdd, Detector::rddf, Detector::rd_mmse, Detector::ml})
      expect_well_formed(detect(d, scn, y), 8, 2);
  }
}

TEST(RdMmse, ReducesToSignOfMatchedOutputAtLowNoise) {
  Rng rng(8);
  Eigen::VectorXd r(5);
  r << 1.0, -2.0, 0.5, 3.0, -1.5;
  const Scenario scn(5, r, identity_gram(5), MeasurementMatrix::identity(5), 1e-6);
  for (int t = 0; t < 50; ++t) {
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(5, 5, rng), rng).y;
    const DetectionResult res = rd_mmse_detect(scn, y);
    for (int n = 0; n < 5; ++n) EXPECT_EQ(res.symbols(n), r(n) * y(n).real() < 0 ? -1.0 : 1.0);
  }
}

TEST(RdMmse, MatchesDenseSolveOracle) {
  Rng rng(9);
  const auto g = std::make_shared<const GramMatrix>(GramMatrix::equicorrelated(8, 0.25));
  for (int t = 0; t < 100; ++t) {
    const Scenario scn(2, random_gains(8, 2.0, rng), g, MeasurementMatrix::partial_dft(8, 4, rng), 0.9);
    const TransmitState st = random_transmit_state(8, 2, rng);
    const Eigen::VectorXcd y = synthesize(scn, st, rng).y;
    const DetectionResult res = rd_mmse_detect(scn, y, st.support);

    const Eigen::MatrixXcd& a = scn.matrix().matrix();
    Eigen::MatrixXcd system = Eigen::MatrixXcd::Zero(4, 4);
    for (int m = 0; m < 4; ++m)
      for (int p = 0; p < 4; ++p) {
        cd acc = 0.0;
        for (int n : st.support) acc += a(m, n) * scn.gains()(n) * scn.gains()(n) * std::conj(a(p, n));
        for (int i = 0; i < 8; ++i)
          for (int j = 0; j < 8; ++j)
            acc += scn.sigma() * scn.sigma() * a(m, i) * g->inverse()(i, j) * std::conj(a(p, j));
        system(m, p) = acc;
      }
    const Eigen::VectorXcd x = dense_solve(system, y);
    for (int n : st.support) {
      cd est = 0.0;
      for (int m = 0; m < 4; ++m) est += scn.gains()(n) * std::conj(a(m, n)) * x(m);
      EXPECT_EQ(res.symbols(n), est.real() < 0 ? -1.0 : 1.0);
    }
  }
}

TEST(RdMmse, SingularWithoutNoise) {
  Rng rng(10);
  const Scenario scn(2, Eigen::VectorXd::Ones(8), identity_gram(8),
                     MeasurementMatrix::partial_dft(8, 4, rng), 0.0);
  const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(8, 2, rng), rng).y;
  EXPECT_THROW(rd_mmse_detect(scn, y), SingularSystem);
}

TEST(RdMmse, MoreNoiseMoreErrors) {
  Rng rng(11);
  const auto g = identity_gram(8);
  auto error_rate = [&](double sigma) {
    int errors = 0;
    for (int t = 0; t < 10000; ++t) {
      const Scenario scn(2, Eigen::VectorXd::Ones(8), g, MeasurementMatrix::partial_dft(8, 4, rng), sigma);
      const TransmitState st = random_transmit_state(8, 2, rng);
      errors += is_block_error(st, rd_mmse_detect(scn, synthesize(scn, st, rng).y, st.support));
    }
    return errors;
  };
  EXPECT_GE(error_rate(1.5), error_rate(0.3));
}

TEST(Ml, NoiselessRecoversTruth) {
  Rng rng(12);
  const auto g = std::make_shared<const GramMatrix>(GramMatrix::equicorrelated(8, 0.2));
  for (int t = 0; t < 50; ++t) {
    const Scenario scn(2, random_gains(8, 2.0, rng), g, MeasurementMatrix::partial_dft(8, 4, rng), 0.0);
    const TransmitState st = random_transmit_state(8, 2, rng);
    EXPECT_FALSE(is_block_error(st, ml_detect(scn, synthesize(scn, st, rng).y)));
  }
}

TEST(Ml, MatchesWhitenedResidualSearch) {
  Rng rng(13);
  const auto g = std::make_shared<const GramMatrix>(GramMatrix::equicorrelated(8, 0.3));
  for (int t = 0; t < 30; ++t) {
    const Scenario scn(2, random_gains(8, 2.0, rng), g, MeasurementMatrix::partial_dft(8, 4, rng), 0.7);
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(8, 2, rng), rng).y;
    const Eigen::MatrixXcd& a = scn.matrix().matrix();
    const Eigen::MatrixXcd chol = Eigen::MatrixXcd(scn.noise_covariance() / (0.7 * 0.7)).llt().matrixL();

    double best = INFINITY;
    Eigen::VectorXd best_b;
    int candidates = 0;
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        for (int si : {-1, 1})
          for (int sj : {-1, 1}) {
            Eigen::VectorXd b = Eigen::VectorXd::Zero(8);
            b(i) = si;
            b(j) = sj;
            const Eigen::VectorXcd resid = y - a * scn.gains().cwiseProduct(b).cast<cd>();
            const double cost = chol.triangularView<Eigen::Lower>().solve(resid).squaredNorm();
            ++candidates;
            if (cost < best) {
              best = cost;
              best_b = b;
            }
          }
    ASSERT_EQ(candidates, 112);
    EXPECT_TRUE(ml_detect(scn, y).symbols == best_b);
  }
}

TEST(Ml, Limits) {
  EXPECT_EQ(ml_candidate_count(8, 2), 112U);
  EXPECT_EQ(ml_candidate_count(100, 2), 19800U);
  Rng rng(14);
  const Scenario big(6, Eigen::VectorXd::Ones(40), identity_gram(40),
                     MeasurementMatrix::partial_dft(40, 20, rng), 0.1);
  EXPECT_THROW(ml_detect(big, Eigen::VectorXcd::Zero(20)), BudgetExceeded);

  Eigen::MatrixXcd tall = Eigen::MatrixXcd::Random(6, 4);
  const Scenario over(1, Eigen::VectorXd::Ones(4), identity_gram(4), MeasurementMatrix::custom(tall), 0.1);
  EXPECT_THROW(ml_detect(over, Eigen::VectorXcd::Zero(6)), SingularSystem);
}

TEST(Decorrelator, AliasOfRddOnIdentity) {
  Rng rng(15);
  const Scenario scn(2, Eigen::VectorXd::Ones(10), identity_gram(10), MeasurementMatrix::identity(10), 0.6);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXcd y = synthesize(scn, random_transmit_state(10, 2, rng), rng).y;
    const DetectionResult a = decorrelating_detect(scn, y), b = rdd_detect(scn, y);
    EXPECT_EQ(a.support, b.support);
    EXPECT_TRUE(a.symbols == b.symbols);
  }
  const Scenario cs(2, Eigen::VectorXd::Ones(10), identity_gram(10),
                    MeasurementMatrix::partial_dft(10, 5, rng), 0.6);
  EXPECT_THROW(decorrelating_detect(cs, Eigen::VectorXcd::Zero(5)), NotIdentityMatrix);
}

TEST(Detectors, BlockErrorEvent) {
  const TransmitState st = TransmitState::make(4, {0, 2}, {1, -1});
  DetectionResult r{{0, 2}, st.symbols, {}};
  EXPECT_FALSE(is_block_error(st, r));
  r.symbols(2) = 1.0;
  EXPECT_TRUE(is_block_error(st, r));
  DetectionResult wrong{{0, 3}, Eigen::VectorXd::Zero(4), {}};
  wrong.symbols(0) = 1;
  wrong.symbols(3) = -1;
  EXPECT_TRUE(is_block_error(st, wrong));
}

TEST(Detectors, NamesRoundTrip) {
  for (Detector d : {Detector::rdd, Detector::rddf, Detector::rd_mmse, Detector::ml, Detector::decorrelator})
    EXPECT_EQ(parse_detector(to_string(d)), d);
  EXPECT_THROW(parse_detector("omp"), InvalidArgument);
}

TEST(Detectors, RejectWrongOutputLength) {
  const Scenario scn(1, Eigen::VectorXd::Ones(4), identity_gram(4), MeasurementMatrix::identity(4), 0.1);
  EXPECT_THROW(rdd_detect(scn, Eigen::VectorXcd::Zero(3)), DimensionMismatch);
  EXPECT_THROW(rddf_detect(scn, Eigen::VectorXcd::Zero(3)), DimensionMismatch);
}

}  // namespace
}  // namespace rdmud
