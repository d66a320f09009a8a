#include "rdmud/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "rdmud/errors.hpp"

namespace rdmud {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Line {
  int number;
  std::string value;
};

[[noreturn]] void fail(const std::string& key, const Line& line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line.number) + ": " + key + ": " + what);
}

double to_double(const std::string& key, const Line& line, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(key, line, "expected a number, got '" + text + "'");
  }
}

long long to_int(const std::string& key, const Line& line, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(key, line, "expected an integer, got '" + text + "'");
  }
}

bool to_bool(const std::string& key, const Line& line, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  fail(key, line, "expected true or false, got '" + text + "'");
}

// "5:5:100" (start:step:stop, inclusive) or "10, 20, 30".
std::vector<int> to_int_list(const std::string& key, const Line& line) {
  std::vector<int> out;
  for (const auto& item : split(line.value, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 3) {
      const long long start = to_int(key, line, parts[0]);
      const long long step = to_int(key, line, parts[1]);
      const long long stop = to_int(key, line, parts[2]);
      if (step <= 0 || stop < start) fail(key, line, "bad range '" + item + "'");
      for (long long v = start; v <= stop; v += step) out.push_back(static_cast<int>(v));
    } else if (parts.size() == 1) {
      out.push_back(static_cast<int>(to_int(key, line, parts[0])));
    } else {
      fail(key, line, "expected start:step:stop or an integer, got '" + item + "'");
    }
  }
  return out;
}

std::vector<double> to_double_list(const std::string& key, const Line& line) {
  std::vector<double> out;
  for (const auto& item : split(line.value, ',')) out.push_back(to_double(key, line, item));
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, Line> entries;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (entries.count(key))
      throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + key + "'");
    entries[key] = Line{number, trim(text.substr(eq + 1))};
  }

  auto schema = entries.find("schema");
  if (schema == entries.end()) throw ConfigError("missing 'schema' field");
  if (to_int("schema", schema->second, schema->second.value) != kConfigSchemaVersion)
    throw ConfigError("unsupported schema version '" + schema->second.value + "' (expected " +
                      std::to_string(kConfigSchemaVersion) + ")");
  entries.erase(schema);

  ExperimentConfig cfg;
  for (const auto& [key, line] : entries) {
    const std::string& v = line.value;
    if (key == "N") {
      cfg.users = static_cast<int>(to_int(key, line, v));
    } else if (key == "K") {
      cfg.active_users = static_cast<int>(to_int(key, line, v));
    } else if (key == "L") {
      cfg.chips = static_cast<int>(to_int(key, line, v));
    } else if (key == "M") {
      cfg.correlators = to_int_list(key, line);
    } else if (key == "gram") {
      const auto parts = split(v, ' ');
      if (parts.empty()) fail(key, line, "empty value");
      if (parts[0] == "identity" && parts.size() == 1) {
        cfg.gram.kind = GramSpec::Kind::identity;
      } else if (parts[0] == "equicorrelated" && parts.size() == 2) {
        cfg.gram.kind = GramSpec::Kind::equicorrelated;
        cfg.gram.rho = to_double(key, line, parts[1]);
      } else if (parts[0] == "signatures" && parts.size() == 2) {
        cfg.gram.kind = GramSpec::Kind::signatures;
        cfg.gram.seed = static_cast<std::uint64_t>(to_int(key, line, parts[1]));
      } else {
        fail(key, line, "expected 'identity', 'equicorrelated <rho>' or 'signatures <seed>'");
      }
    } else if (key == "matrix") {
      const auto space = v.find(' ');
      const std::string kind = v.substr(0, space);
      if (kind == "partial-dft" && space == std::string::npos) {
        cfg.matrix.kind = MatrixSpec::Kind::partial_dft;
      } else if (kind == "identity" && space == std::string::npos) {
        cfg.matrix.kind = MatrixSpec::Kind::identity;
      } else if (kind == "custom" && space != std::string::npos) {
        cfg.matrix.kind = MatrixSpec::Kind::custom;
        std::filesystem::path p = trim(v.substr(space + 1));
        cfg.matrix.path = p.is_relative() ? base_dir / p : p;
      } else {
        fail(key, line, "expected 'partial-dft', 'identity' or 'custom <path>'");
      }
    } else if (key == "gains") {
      cfg.gains = to_double_list(key, line);
    } else if (key == "detectors") {
      cfg.detectors.clear();
      try {
        for (const auto& name : split(v, ',')) cfg.detectors.push_back(parse_detector(name));
      } catch (const InvalidArgument& e) {
        fail(key, line, e.what());
      }
    } else if (key == "snr_db") {
      cfg.snr_db = to_double_list(key, line);
    } else if (key == "trials") {
      cfg.trials = to_int(key, line, v);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, line, v));
    } else if (key == "fresh_matrix") {
      cfg.fresh_matrix = to_bool(key, line, v);
    } else if (key == "baseline") {
      cfg.baseline = to_bool(key, line, v);
    } else if (key == "state") {
      if (v == "random") cfg.state.random = true;
      else if (v == "fixed") cfg.state.random = false;
      else fail(key, line, "expected 'random' or 'fixed'");
    } else if (key == "support") {
      cfg.state.support = to_int_list(key, line);
    } else if (key == "symbols") {
      cfg.state.signs = to_int_list(key, line);
    } else if (key == "mmse_support") {
      if (v == "rdd") cfg.mmse_support = SupportRule::rdd;
      else if (v == "rddf") cfg.mmse_support = SupportRule::rddf;
      else fail(key, line, "expected 'rdd' or 'rddf'");
    } else if (key == "ml_budget") {
      cfg.ml_budget = static_cast<std::uint64_t>(to_int(key, line, v));
    } else if (key == "alpha") {
      cfg.alpha = to_double(key, line, v);
    } else if (key == "c") {
      cfg.tail_constant = to_double(key, line, v);
    } else if (key == "workers") {
      cfg.workers = static_cast<unsigned>(to_int(key, line, v));
    } else if (key == "output") {
      std::filesystem::path p = v;
      cfg.output = p.is_relative() ? base_dir / p : p;
    } else {
      fail(key, line, "unknown key");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(in, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate(const ExperimentConfig& cfg) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(cfg.users >= 1, "N must be positive");
  require(cfg.active_users >= 1 && cfg.active_users <= cfg.users, "K must lie in [1, N]");
  require(cfg.trials >= 1, "trials must be at least 1");
  require(!cfg.detectors.empty(), "detector list is empty");
  require(!cfg.snr_db.empty(), "snr_db list is empty");
  for (double s : cfg.snr_db) require(std::isfinite(s), "SNR values must be finite");
  require(cfg.gains.size() == 1 || static_cast<int>(cfg.gains.size()) == cfg.users,
          "gains must hold one value or N values");
  for (double g : cfg.gains) require(g != 0.0 && std::isfinite(g), "gains must be finite and nonzero");
  require(cfg.alpha > 0.0, "alpha must be positive");
  require(cfg.tail_constant > 0.0, "c must be positive");

  const bool needs_m = std::any_of(cfg.detectors.begin(), cfg.detectors.end(),
                                   [](Detector d) { return d != Detector::decorrelator; });
  if (needs_m && cfg.matrix.kind == MatrixSpec::Kind::partial_dft) {
    require(!cfg.correlators.empty(), "M list is empty");
    for (int m : cfg.correlators) require(m >= 1 && m <= cfg.users, "M values must lie in [1, N]");
  }
  if (cfg.matrix.kind == MatrixSpec::Kind::identity)
    for (int m : cfg.correlators) require(m == cfg.users, "identity matrix requires M = N");
  if (cfg.matrix.kind == MatrixSpec::Kind::custom) require(!cfg.matrix.path.empty(), "custom matrix needs a path");

  switch (cfg.gram.kind) {
    case GramSpec::Kind::identity: break;
    case GramSpec::Kind::equicorrelated:
      require(cfg.gram.rho > -1.0 / std::max(1, cfg.users - 1) && cfg.gram.rho < 1.0,
              "equicorrelated rho must lie in (-1/(N-1), 1)");
      break;
    case GramSpec::Kind::signatures:
      require(cfg.chips >= cfg.users, "signature generation needs L >= N");
      break;
  }

  if (!cfg.state.random) {
    require(static_cast<int>(cfg.state.support.size()) == cfg.active_users,
            "fixed state needs exactly K support indices");
    require(cfg.state.signs.size() == cfg.state.support.size(),
            "fixed state needs one symbol per support index");
  }
}

}  // namespace rdmud
