#include "rdmud/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdmud/errors.hpp"

namespace rdmud {

Scenario::Scenario(int active_users, Eigen::VectorXd gains, std::shared_ptr<const GramMatrix> gram,
                   MeasurementMatrix a, double sigma)
    : k_(active_users), gains_(std::move(gains)), gram_(std::move(gram)), a_(std::move(a)),
      sigma_(sigma) {
  const int n = static_cast<int>(gains_.size());
  if (n < 1) throw InvalidDimensions("scenario needs at least one user");
  if (k_ < 1 || k_ > n)
    throw InvalidDimensions("active user count K=" + std::to_string(k_) + " outside [1, N=" +
                            std::to_string(n) + "]");
  if (!gram_) throw InvalidArgument("scenario needs a Gram matrix");
  if (gram_->users() != n) throw DimensionMismatch("Gram matrix size differs from N");
  if (a_.users() != n) throw DimensionMismatch("measurement matrix column count differs from N");
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw InvalidArgument("sigma must be finite and >= 0");
  const Eigen::ArrayXd mag = gains_.array().abs();
  if ((mag == 0.0).any() || !mag.isFinite().all())
    throw InvalidArgument("channel gains must be finite and nonzero");
  rmin_ = mag.minCoeff();
  rmax_ = mag.maxCoeff();
}

double Scenario::snr() const noexcept {
  if (sigma_ == 0.0) return std::numeric_limits<double>::infinity();
  return rmin_ * rmin_ / (sigma_ * sigma_);
}

Scenario Scenario::with_matrix(MeasurementMatrix a) const {
  return Scenario(k_, gains_, gram_, std::move(a), sigma_);
}

Scenario Scenario::with_sigma(double sigma) const {
  return Scenario(k_, gains_, gram_, a_, sigma);
}

Eigen::MatrixXcd Scenario::noise_covariance() const {
  const Eigen::MatrixXcd& a = a_.matrix();
  Eigen::MatrixXcd c = a * gram_->inverse().cast<std::complex<double>>() * a.adjoint();
  c *= sigma_ * sigma_;
  return 0.5 * (c + c.adjoint());
}

double sigma_from_snr_db(double rmin, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  if (!std::isfinite(snr_db)) throw InvalidArgument("SNR must be finite or +inf");
  return rmin / std::pow(10.0, snr_db / 20.0);
}

TransmitState TransmitState::make(int users, std::vector<int> support,
                                  const std::vector<int>& signs) {
  if (support.size() != signs.size()) throw DimensionMismatch("support and sign counts differ");
  if (static_cast<int>(support.size()) > users) throw InvalidDimensions("support larger than N");
  TransmitState st{std::move(support), Eigen::VectorXd::Zero(users)};
  for (std::size_t i = 0; i < st.support.size(); ++i) {
    const int n = st.support[i];
    if (n < 0 || n >= users) throw InvalidDimensions("support index out of range");
    if (i > 0 && n <= st.support[i - 1])
      throw InvalidArgument("support must be sorted and distinct");
    if (signs[i] != 1 && signs[i] != -1) throw InvalidArgument("symbols must be +1 or -1");
    st.symbols(n) = signs[i];
  }
  return st;
}

TransmitState random_transmit_state(int users, int active_users, Rng& rng) {
  if (active_users < 0 || active_users > users)
    throw InvalidDimensions("need 0 <= K <= N for a transmit state");
  // Selection sampling (Knuth's algorithm S): uniform K-subset, emitted sorted.
  TransmitState st{{}, Eigen::VectorXd::Zero(users)};
  st.support.reserve(active_users);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int needed = active_users;
  for (int n = 0; n < users && needed > 0; ++n) {
    if (unif(rng) * (users - n) < needed) {
      st.support.push_back(n);
      --needed;
    }
  }
  std::bernoulli_distribution coin(0.5);
  for (int n : st.support) st.symbols(n) = coin(rng) ? 1.0 : -1.0;
  return st;
}

Eigen::VectorXd draw_noise(const GramMatrix& g, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  const int n = g.users();
  if (sigma == 0.0) return Eigen::VectorXd::Zero(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = normal(rng);
  if (g.is_identity()) return sigma * u;
  Eigen::VectorXd z = g.inverse_factor().triangularView<Eigen::Lower>() * u;
  return sigma * z;
}

FrontEndOutput synthesize(const Scenario& scn, const TransmitState& state, Rng& rng) {
  return synthesize_with_noise(scn, state, draw_noise(scn.gram(), scn.sigma(), rng));
}

FrontEndOutput synthesize_with_noise(const Scenario& scn, const TransmitState& state,
                                     Eigen::VectorXd z) {
  const int n = scn.users();
  if (state.symbols.size() != n || z.size() != n)
    throw DimensionMismatch("transmit state or noise length differs from N");
  const Eigen::VectorXd x = scn.gains().cwiseProduct(state.symbols) + z;
  FrontEndOutput out;
  const Eigen::MatrixXcd& a = scn.matrix().matrix();
  if (scn.matrix().kind() == MatrixKind::identity) {
    out.y = x.cast<std::complex<double>>();
  } else {
    out.y.resize(a.rows());
    out.y.real() = a.real() * x;
    out.y.imag() = a.imag() * x;
  }
  out.z = std::move(z);
  return out;
}

}  // namespace rdmud
