#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rdmud/detectors.hpp"

namespace rdmud {

inline constexpr int kConfigSchemaVersion = 1;

struct GramSpec {
  enum class Kind { identity, equicorrelated, signatures };
  Kind kind = Kind::identity;
  double rho = 0.0;          // equicorrelated
  std::uint64_t seed = 0;    // signatures: seed of the binary chip generator
};

struct MatrixSpec {
  enum class Kind { partial_dft, identity, custom };
  Kind kind = Kind::partial_dft;
  std::filesystem::path path;  // custom
};

struct StateSpec {
  bool random = true;
  std::vector<int> support;  // fixed mode
  std::vector<int> signs;    // fixed mode, +/-1 per support entry
};

struct ExperimentConfig {
  int users = 100;        // N
  int active_users = 2;   // K
  int chips = 64;         // L, samples per symbol for generated signatures
  GramSpec gram;
  MatrixSpec matrix;
  std::vector<double> gains{1.0};  // one value (uniform) or N values
  std::vector<Detector> detectors{Detector::rdd};
  std::vector<int> correlators;    // M values
  std::vector<double> snr_db;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  bool fresh_matrix = true;
  bool baseline = false;  // append decorrelating-detector reference rows
  StateSpec state;
  SupportRule mmse_support = SupportRule::rdd;
  std::uint64_t ml_budget = kDefaultMlBudget;
  double alpha = 0.5;
  double tail_constant = 1.0;  // c in the correlator-count bound
  unsigned workers = 0;        // 0: hardware concurrency
  std::filesystem::path output;
};

/// Parses the key = value format described in the README. Relative paths are
/// resolved against base_dir. Throws ConfigError with the offending line.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks cross-field consistency. Throws ConfigError.
void validate(const ExperimentConfig& cfg);

}  // namespace rdmud
