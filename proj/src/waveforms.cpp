#include "rdmud/waveforms.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "rdmud/errors.hpp"

namespace rdmud {

SignatureSet::SignatureSet(Eigen::MatrixXd samples) : s_(std::move(samples)) {
  if (s_.rows() < 1 || s_.cols() < 1) throw InvalidDimensions("empty signature set");
  const double inv_len = 1.0 / static_cast<double>(s_.cols());
  for (Eigen::Index n = 0; n < s_.rows(); ++n) {
    const double energy = s_.row(n).squaredNorm() * inv_len;
    if (!(std::abs(energy - 1.0) <= 1e-9))
      throw InvalidArgument("signature " + std::to_string(n) + " has energy " +
                            std::to_string(energy) + ", expected 1");
  }
}

SignatureSet random_binary_signatures(int users, int length, Rng& rng, double max_condition,
                                      int max_attempts) {
  if (users < 1 || length < users)
    throw InvalidDimensions("binary signatures need 1 <= N <= L");
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::MatrixXd s(users, length);
    for (int n = 0; n < users; ++n)
      for (int i = 0; i < length; ++i) s(n, i) = coin(rng) ? 1.0 : -1.0;
    SignatureSet sigs(std::move(s));
    try {
      gram(sigs, max_condition);
      return sigs;
    } catch (const NearSingularGram&) {
    }
  }
  throw NearSingularGram("no well-conditioned binary signature set after " +
                         std::to_string(max_attempts) + " attempts");
}

SignatureSet hadamard_signatures(int users, int length) {
  if (length < 1 || (length & (length - 1)) != 0)
    throw InvalidDimensions("Hadamard length must be a power of two");
  if (users < 1 || users > length) throw InvalidDimensions("Hadamard set needs 1 <= N <= L");
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < length) {
    const Eigen::Index k = h.rows();
    Eigen::MatrixXd next(2 * k, 2 * k);
    next << h, h, h, -h;
    h = std::move(next);
  }
  return SignatureSet(h.topRows(users));
}

GramMatrix::GramMatrix(Eigen::MatrixXd g, double max_condition) : g_(std::move(g)) {
  const Eigen::Index n = g_.rows();
  if (n < 1 || g_.cols() != n) throw InvalidDimensions("Gram matrix must be square and nonempty");
  if (!g_.isApprox(g_.transpose(), 1e-12)) throw InvalidArgument("Gram matrix is not symmetric");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(g_(i, i) - 1.0) > 1e-9)
      throw InvalidArgument("Gram matrix diagonal must be 1 (unit-energy signatures)");
  g_ = 0.5 * (g_ + g_.transpose()).eval();

  identity_ = g_.isIdentity(0.0);
  if (identity_) {
    inverse_ = inverse_factor_ = factor_ = Eigen::MatrixXd::Identity(n, n);
    return;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g_, Eigen::EigenvaluesOnly);
  lambda_min_ = eig.eigenvalues().minCoeff();
  lambda_max_ = eig.eigenvalues().maxCoeff();
  if (!(lambda_min_ > 0.0) || lambda_max_ / lambda_min_ > max_condition) {
    std::ostringstream msg;
    msg << "Gram matrix is near singular (lambda_min=" << lambda_min_
        << ", condition=" << lambda_max_ / lambda_min_ << ", limit=" << max_condition << ")";
    throw NearSingularGram(msg.str());
  }

  Eigen::LLT<Eigen::MatrixXd> llt(g_);
  if (llt.info() != Eigen::Success) throw NearSingularGram("Cholesky of Gram matrix failed");
  factor_ = llt.matrixL();
  inverse_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> inv_llt(inverse_);
  if (inv_llt.info() != Eigen::Success) throw NearSingularGram("Cholesky of G^-1 failed");
  inverse_factor_ = inv_llt.matrixL();
}

GramMatrix GramMatrix::identity(int users) {
  if (users < 1) throw InvalidDimensions("user count must be positive");
  return GramMatrix(Eigen::MatrixXd::Identity(users, users));
}

GramMatrix GramMatrix::equicorrelated(int users, double rho) {
  if (users < 1) throw InvalidDimensions("user count must be positive");
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(users, users, rho);
  g.diagonal().setOnes();
  return GramMatrix(std::move(g));
}

GramMatrix gram(const SignatureSet& sigs, double max_condition) {
  const auto& s = sigs.samples();
  Eigen::MatrixXd g = (s * s.transpose()) / static_cast<double>(sigs.length());
  // Unit energy is checked on construction; pin the diagonal against rounding.
  g.diagonal().setOnes();
  return GramMatrix(std::move(g), max_condition);
}

Eigen::MatrixXd biorthogonal(const SignatureSet& sigs, const GramMatrix& g) {
  if (g.users() != sigs.users()) throw DimensionMismatch("Gram size differs from user count");
  return g.inverse() * sigs.samples();
}

CorrelatorBank build_correlators(const Eigen::MatrixXd& biorth, const Eigen::MatrixXcd& coeffs) {
  if (coeffs.cols() != biorth.rows())
    throw DimensionMismatch("coefficient matrix has " + std::to_string(coeffs.cols()) +
                            " columns but there are " + std::to_string(biorth.rows()) +
                            " biorthogonal waveforms");
  return CorrelatorBank{coeffs.real() * biorth, coeffs.imag() * biorth};
}

CorrelatorBank build_correlators(const Eigen::MatrixXd& biorth, const MeasurementMatrix& a) {
  return build_correlators(biorth, a.matrix());
}

Eigen::VectorXcd frontend_correlate(const CorrelatorBank& bank, const Eigen::VectorXd& received) {
  if (received.size() != bank.length())
    throw DimensionMismatch("received signal length differs from correlator length");
  const double inv_len = 1.0 / static_cast<double>(bank.length());
  Eigen::VectorXcd y(bank.correlators());
  y.real() = bank.real * received * inv_len;
  y.imag() = bank.imag * received * inv_len;
  return y;
}

Eigen::VectorXd superpose(const SignatureSet& sigs, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != sigs.users()) throw DimensionMismatch("coefficient count differs from N");
  return sigs.samples().transpose() * coeffs;
}

Eigen::VectorXd white_noise(int length, double sigma, Rng& rng) {
  if (length < 1) throw InvalidDimensions("noise length must be positive");
  std::normal_distribution<double> normal(0.0, sigma * std::sqrt(static_cast<double>(length)));
  Eigen::VectorXd w(length);
  if (sigma == 0.0) return w.setZero();
  for (int i = 0; i < length; ++i) w(i) = normal(rng);
  return w;
}

}  // namespace rdmud
