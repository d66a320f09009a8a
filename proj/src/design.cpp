#include "rdmud/design.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "rdmud/errors.hpp"

namespace rdmud {

namespace {

using cd = std::complex<double>;

void check_users(int users) {
  if (users < 1) throw InvalidDimensions("user count must be positive");
}

}  // namespace

MeasurementMatrix MeasurementMatrix::identity(int users) {
  check_users(users);
  return MeasurementMatrix(Eigen::MatrixXcd::Identity(users, users), MatrixKind::identity, {},
                           0.0);
}

MeasurementMatrix MeasurementMatrix::partial_dft(int users, int correlators, Rng& rng) {
  check_users(users);
  if (correlators < 1 || correlators > users)
    throw InvalidDimensions("partial DFT needs 1 <= M <= N (M=" + std::to_string(correlators) +
                            ", N=" + std::to_string(users) + ")");
  // Partial Fisher-Yates: the first M slots end up a uniform M-subset in
  // uniformly random order.
  std::vector<int> pool(users);
  for (int i = 0; i < users; ++i) pool[i] = i;
  for (int i = 0; i < correlators; ++i) {
    std::uniform_int_distribution<int> pick(i, users - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(correlators);
  return partial_dft_rows(users, std::move(pool));
}

MeasurementMatrix MeasurementMatrix::partial_dft_rows(int users, std::vector<int> rows) {
  check_users(users);
  const int m = static_cast<int>(rows.size());
  if (m < 1 || m > users) throw InvalidDimensions("partial DFT needs 1 <= M <= N");
  std::vector<bool> seen(users, false);
  for (int r : rows) {
    if (r < 0 || r >= users) throw InvalidDimensions("DFT row index out of range");
    if (seen[r]) throw InvalidDimensions("DFT rows must be distinct");
    seen[r] = true;
  }

  std::vector<cd> roots(users);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int k = 0; k < users; ++k)
    roots[k] = std::polar(scale, 2.0 * std::numbers::pi * k / users);

  Eigen::MatrixXcd a(m, users);
  for (int n = 0; n < users; ++n)
    for (int i = 0; i < m; ++i)
      a(i, n) = roots[(static_cast<long>(rows[i]) * n) % users];
  return MeasurementMatrix(std::move(a), MatrixKind::partial_dft, std::move(rows), 0.0);
}

MeasurementMatrix MeasurementMatrix::custom(Eigen::MatrixXcd a) {
  if (a.rows() < 1 || a.cols() < 1) throw InvalidDimensions("empty measurement matrix");
  double adjustment = 0.0;
  for (Eigen::Index n = 0; n < a.cols(); ++n) {
    const double norm = a.col(n).norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw InvalidArgument("measurement matrix column " + std::to_string(n) +
                            " has zero or non-finite norm");
    adjustment = std::max(adjustment, std::abs(1.0 / norm - 1.0));
    a.col(n) /= norm;
  }
  return MeasurementMatrix(std::move(a), MatrixKind::custom, {}, adjustment);
}

MeasurementMatrix load_measurement_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open matrix file " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw InvalidArgument("matrix file " + path.string() + ": bad number '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument("matrix file " + path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.size() % 2 != 0)
    throw InvalidArgument("matrix file " + path.string() +
                          ": expected an even number of rows (real block, then imaginary block)");

  const auto m = static_cast<Eigen::Index>(rows.size() / 2);
  const auto n = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXcd a(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cd(rows[i][j], rows[i + m][j]);
  return MeasurementMatrix::custom(std::move(a));
}

double coherence(const MeasurementMatrix& a) {
  const int n = a.users();
  if (n < 2) return 0.0;

  if (a.kind() == MatrixKind::partial_dft) {
    // a_n^H a_l = (1/M) sum_r exp(i 2 pi r (l - n) / N)
    const int m = a.correlators();
    std::vector<cd> roots(n);
    for (int k = 0; k < n; ++k) roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    double best = 0.0;
    for (int d = 1; d < n; ++d) {
      cd sum = 0.0;
      for (int r : a.dft_rows()) sum += roots[(static_cast<long>(r) * d) % n];
      best = std::max(best, std::abs(sum) / m);
    }
    return best;
  }
  if (a.kind() == MatrixKind::identity) return 0.0;

  const Eigen::MatrixXcd gram = a.matrix().adjoint() * a.matrix();
  double best = 0.0;
  for (int l = 1; l < n; ++l)
    for (int k = 0; k < l; ++k) best = std::max(best, std::abs(gram(k, l)));
  return best;
}

double max_column_energy(const MeasurementMatrix& a) {
  // a_n^H A A^H a_n = || A^H a_n ||^2 = column n squared norm of A^H A.
  const Eigen::MatrixXcd gram = a.matrix().adjoint() * a.matrix();
  return gram.colwise().squaredNorm().maxCoeff();
}

double welch_bound(int users, int correlators) {
  if (users < 2 || correlators < 1) throw InvalidDimensions("Welch bound needs N >= 2, M >= 1");
  if (correlators >= users) return 0.0;
  return std::sqrt(static_cast<double>(users - correlators) /
                   (static_cast<double>(correlators) * (users - 1)));
}

}  // namespace rdmud
