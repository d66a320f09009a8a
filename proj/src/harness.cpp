#include "rdmud/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "rdmud/errors.hpp"

namespace rdmud {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::int64_t kChunk = 256;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace

PeEstimate estimate_pe(std::int64_t errors, std::int64_t trials) {
  if (trials < 1) throw InvalidArgument("trial count must be positive");
  if (errors < 0 || errors > trials) throw InvalidArgument("error count outside [0, trials]");
  PeEstimate est;
  est.errors = errors;
  est.trials = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  est.pe = p;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  est.ci_lo = errors == 0 ? 0.0 : std::max(0.0, center - half);
  est.ci_hi = errors == trials ? 1.0 : std::min(1.0, center + half);
  return est;
}

bool intervals_overlap(const PeEstimate& a, const PeEstimate& b) noexcept {
  return a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi;
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  const int n = cfg_.users;
  switch (cfg_.gram.kind) {
    case GramSpec::Kind::identity:
      gram_ = std::make_shared<const GramMatrix>(GramMatrix::identity(n));
      break;
    case GramSpec::Kind::equicorrelated:
      gram_ = std::make_shared<const GramMatrix>(GramMatrix::equicorrelated(n, cfg_.gram.rho));
      break;
    case GramSpec::Kind::signatures: {
      Rng rng(combine_seed({cfg_.gram.seed, stable_hash("signatures")}));
      gram_ = std::make_shared<const GramMatrix>(
          rdmud::gram(random_binary_signatures(n, cfg_.chips, rng)));
      break;
    }
  }

  gains_ = cfg_.gains.size() == 1 ? Eigen::VectorXd::Constant(n, cfg_.gains.front())
                                  : Eigen::Map<const Eigen::VectorXd>(cfg_.gains.data(), n).eval();
  rmin_ = gains_.cwiseAbs().minCoeff();

  if (cfg_.matrix.kind == MatrixSpec::Kind::custom) {
    custom_ = load_measurement_matrix(cfg_.matrix.path);
    if (custom_->users() != n)
      throw ConfigError("custom matrix has " + std::to_string(custom_->users()) +
                        " columns, N is " + std::to_string(n));
    for (int m : cfg_.correlators)
      if (m != custom_->correlators())
        throw ConfigError("custom matrix has M=" + std::to_string(custom_->correlators()) +
                          " rows but the M list asks for " + std::to_string(m));
  }
  if (!cfg_.state.random) {
    try {
      fixed_state_ = TransmitState::make(n, cfg_.state.support, cfg_.state.signs);
    } catch (const Error& e) {
      throw ConfigError(std::string("fixed transmit state: ") + e.what());
    }
  }
}

MeasurementMatrix Experiment::fixed_matrix(int correlators) const {
  switch (cfg_.matrix.kind) {
    case MatrixSpec::Kind::identity: return MeasurementMatrix::identity(cfg_.users);
    case MatrixSpec::Kind::custom: return *custom_;
    case MatrixSpec::Kind::partial_dft: break;
  }
  Rng rng(combine_seed({cfg_.seed, stable_hash("matrix"), static_cast<std::uint64_t>(correlators)}));
  return MeasurementMatrix::partial_dft(cfg_.users, correlators, rng);
}

Scenario Experiment::scenario(int correlators, double snr_db, Detector detector) const {
  MeasurementMatrix a = detector == Detector::decorrelator
                            ? MeasurementMatrix::identity(cfg_.users)
                            : fixed_matrix(correlators);
  return Scenario(cfg_.active_users, gains_, gram_, std::move(a), sigma_from_snr_db(rmin_, snr_db));
}

PointResult Experiment::run_point(int correlators, double snr_db, Detector detector) const {
  if (detector == Detector::decorrelator) correlators = cfg_.users;
  const bool fresh = cfg_.fresh_matrix && detector != Detector::decorrelator &&
                     cfg_.matrix.kind == MatrixSpec::Kind::partial_dft;
  const Scenario base = scenario(correlators, snr_db, detector);
  const double base_mu = fresh ? 0.0 : coherence(base.matrix());
  const DetectOptions opts{cfg_.mmse_support, cfg_.ml_budget};

  const std::uint64_t point_seed =
      combine_seed({cfg_.seed, static_cast<std::uint64_t>(correlators), double_bits(snr_db),
                    stable_hash(to_string(detector))});
  const std::int64_t trials = cfg_.trials;
  std::vector<std::uint8_t> errors(trials, 0);
  std::vector<double> mus(fresh ? trials : 0, 0.0);

  std::atomic<std::int64_t> next_chunk{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::int64_t failed_trial = std::numeric_limits<std::int64_t>::max();
  std::string failure;

  auto work = [&] {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::int64_t begin = next_chunk.fetch_add(1) * kChunk;
      if (begin >= trials) return;
      const std::int64_t end = std::min(trials, begin + kChunk);
      for (std::int64_t t = begin; t < end; ++t) {
        try {
          Rng rng = stream_rng(point_seed, static_cast<std::uint64_t>(t));
          std::optional<Scenario> redrawn;
          if (fresh) {
            redrawn = base.with_matrix(MeasurementMatrix::partial_dft(cfg_.users, correlators, rng));
            mus[t] = coherence(redrawn->matrix());
          }
          const Scenario& scn = redrawn ? *redrawn : base;
          const TransmitState state = fixed_state_
                                          ? *fixed_state_
                                          : random_transmit_state(cfg_.users, cfg_.active_users, rng);
          const FrontEndOutput out = synthesize(scn, state, rng);
          errors[t] = is_block_error(state, detect(detector, scn, out.y, opts)) ? 1 : 0;
        } catch (const std::exception& e) {
          std::lock_guard lock(failure_mutex);
          if (t < failed_trial) {
            failed_trial = t;
            failure = e.what();
          }
          abort = true;
          return;
        }
      }
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::min<std::int64_t>(worker_count(cfg_.workers), (trials + kChunk - 1) / kChunk));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(work);
  }
  if (abort)
    throw Error("point (detector=" + std::string(to_string(detector)) +
                ", M=" + std::to_string(correlators) + ", snr_db=" + format_double(snr_db) +
                ") failed at trial " + std::to_string(failed_trial) + ": " + failure);

  std::int64_t total = 0;
  for (auto e : errors) total += e;
  double mu_mean = base_mu;
  if (fresh) {
    double sum = 0.0;
    for (double m : mus) sum += m;  // fixed order: independent of scheduling
    mu_mean = sum / static_cast<double>(trials);
  }
  return PointResult{detector, correlators, snr_db, estimate_pe(total, trials), mu_mean};
}

std::vector<PointResult> Experiment::run_sweep(std::ostream* csv) const {
  std::vector<Detector> detectors = cfg_.detectors;
  if (cfg_.baseline &&
      std::find(detectors.begin(), detectors.end(), Detector::decorrelator) == detectors.end())
    detectors.push_back(Detector::decorrelator);

  std::vector<int> ms = cfg_.correlators;
  if (ms.empty()) ms.push_back(custom_ ? custom_->correlators() : cfg_.users);

  if (csv) write_csv_header(*csv);
  std::vector<PointResult> rows;
  auto emit = [&](PointResult r) {
    if (csv) {
      write_csv_row(*csv, cfg_, r);
      csv->flush();
    }
    rows.push_back(r);
  };
  for (Detector d : detectors) {
    for (double snr : cfg_.snr_db) {
      if (d == Detector::decorrelator) {
        emit(run_point(cfg_.users, snr, d));
        continue;
      }
      for (int m : ms) emit(run_point(m, snr, d));
    }
  }
  return rows;
}

PointResult run_point(const ExperimentConfig& cfg, int correlators, double snr_db,
                      Detector detector) {
  return Experiment(cfg).run_point(correlators, snr_db, detector);
}

std::vector<PointResult> run_sweep(const ExperimentConfig& cfg, std::ostream* csv) {
  return Experiment(cfg).run_sweep(csv);
}

void write_csv_header(std::ostream& out) {
  out << "detector,N,K,M,L,snr_db,trials,errors,pe,ci_lo,ci_hi,mu_mean,seed\n";
}

void write_csv_row(std::ostream& out, const ExperimentConfig& cfg, const PointResult& row) {
  out << to_string(row.detector) << ',' << cfg.users << ',' << cfg.active_users << ','
      << row.correlators << ',' << cfg.chips << ',' << format_double(row.snr_db) << ','
      << row.estimate.trials << ',' << row.estimate.errors << ',' << format_double(row.estimate.pe)
      << ',' << format_double(row.estimate.ci_lo) << ',' << format_double(row.estimate.ci_hi) << ','
      << format_double(row.mu_mean) << ',' << cfg.seed << '\n';
}

CoherenceStats coherence_statistics(int users, int correlators, std::uint64_t seed, int samples) {
  if (samples < 1) throw InvalidArgument("need at least one sample");
  std::vector<double> mus(samples);
  for (int i = 0; i < samples; ++i) {
    Rng rng = stream_rng(combine_seed({seed, stable_hash("coherence")}), static_cast<std::uint64_t>(i));
    mus[i] = coherence(MeasurementMatrix::partial_dft(users, correlators, rng));
  }
  CoherenceStats st;
  st.samples = samples;
  double sum = 0.0;
  for (double m : mus) sum += m;
  st.mean = sum / samples;
  std::vector<double> sorted = mus;
  std::sort(sorted.begin(), sorted.end());
  st.median = samples % 2 ? sorted[samples / 2]
                          : 0.5 * (sorted[samples / 2 - 1] + sorted[samples / 2]);
  st.min = sorted.front();
  st.max = sorted.back();
  st.welch = users >= 2 ? welch_bound(users, correlators) : 0.0;
  return st;
}

}  // namespace rdmud
