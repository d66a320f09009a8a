// rdmud: command-line front end for the reduced-dimension MUD simulator.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "rdmud/analysis.hpp"
#include "rdmud/errors.hpp"
#include "rdmud/harness.hpp"

namespace {

using namespace rdmud;

void warn_on_rescale(const Experiment& exp) {
  const auto& cfg = exp.config();
  if (cfg.matrix.kind != MatrixSpec::Kind::custom) return;
  const double adj = exp.fixed_matrix(0).normalization_adjustment();
  if (adj > kRescaleWarnThreshold)
    std::cerr << "warning: custom matrix columns rescaled by up to " << adj
              << " relative to unit norm\n";
}

int simulate(const std::string& config_path, unsigned workers, const std::string& output) {
  ExperimentConfig cfg = load_config(config_path);
  if (workers > 0) cfg.workers = workers;
  if (!output.empty()) cfg.output = output;
  Experiment exp(cfg);
  warn_on_rescale(exp);

  if (cfg.output.empty()) {
    exp.run_sweep(&std::cout);
    return 0;
  }
  std::ofstream out(cfg.output);
  if (!out) throw Error("cannot open output file " + cfg.output.string());
  const auto rows = exp.run_sweep(&out);
  std::cerr << "wrote " << rows.size() << " rows to " << cfg.output.string() << "\n";
  return 0;
}

int bound(const std::string& config_path, const std::string& csv_path, double alpha, double c) {
  ExperimentConfig cfg = load_config(config_path);
  if (alpha > 0) cfg.alpha = alpha;
  if (c > 0) cfg.tail_constant = c;
  Experiment exp(cfg);
  warn_on_rescale(exp);

  std::ofstream csv;
  if (!csv_path.empty()) {
    csv.open(csv_path);
    if (!csv) throw Error("cannot open CSV file " + csv_path);
    csv << "N,K,M,snr_db,alpha,tau,mu,rdd_condition,rddf_condition,rdd_margin,rddf_margin,"
           "pe_bound,side_condition,min_m_rdd,min_m_rddf\n";
  }

  std::vector<int> ms = cfg.correlators;
  if (ms.empty()) ms.push_back(exp.fixed_matrix(0).correlators());

  for (int m : ms) {
    for (double snr : cfg.snr_db) {
      const Scenario scn = exp.scenario(m, snr);
      const BoundReport rep = check_conditions(scn, cfg.alpha);
      std::string min_rdd = "n/a", min_rddf = "n/a";
      try {
        min_rdd = std::to_string(min_correlators(scn, cfg.alpha, cfg.tail_constant, BoundDetector::rdd).min_correlators);
        min_rddf = std::to_string(min_correlators(scn, cfg.alpha, cfg.tail_constant, BoundDetector::rddf).min_correlators);
      } catch (const HypothesisViolated&) {
      }
      const double fail_prob = 1.0 - (1.0 - rep.pe_bound) * (1.0 - 2.0 * std::exp(-cfg.tail_constant));

      std::cout << "N=" << scn.users() << " K=" << scn.active_users() << " M=" << m
                << " snr_db=" << snr << "\n"
                << std::left << std::setprecision(6)
                << "  " << std::setw(22) << "alpha" << rep.alpha << "\n"
                << "  " << std::setw(22) << "tau" << rep.tau << "\n"
                << "  " << std::setw(22) << "coherence" << rep.mu << "\n"
                << "  " << std::setw(22) << "rdd condition" << (rep.rdd_condition_met ? "met" : "not met")
                << " (margin " << rep.rdd_margin << ")\n"
                << "  " << std::setw(22) << "rddf condition" << (rep.rddf_condition_met ? "met" : "not met")
                << " (margin " << rep.rddf_margin << ")\n"
                << "  " << std::setw(22) << "pe bound" << rep.pe_bound << "\n"
                << "  " << std::setw(22) << "side condition" << rep.side_condition
                << (rep.side_condition_met ? " (<= 1)" : " (> 1, bound not applicable)") << "\n"
                << "  " << std::setw(22) << "min M (rdd, rddf)" << min_rdd << ", " << min_rddf
                << "  [failure prob <= " << fail_prob << "]\n";
      if (csv.is_open())
        csv << scn.users() << ',' << scn.active_users() << ',' << m << ',' << snr << ','
            << rep.alpha << ',' << rep.tau << ',' << rep.mu << ',' << rep.rdd_condition_met << ','
            << rep.rddf_condition_met << ',' << rep.rdd_margin << ',' << rep.rddf_margin << ','
            << rep.pe_bound << ',' << rep.side_condition << ',' << min_rdd << ',' << min_rddf
            << '\n';
    }
  }
  return 0;
}

int coherence_cmd(int n, int m, std::uint64_t seed, int samples) {
  const CoherenceStats st = coherence_statistics(n, m, seed, samples);
  std::cout << std::left << std::setprecision(6)
            << std::setw(10) << "N" << n << "\n"
            << std::setw(10) << "M" << m << "\n"
            << std::setw(10) << "samples" << st.samples << "\n"
            << std::setw(10) << "mean" << st.mean << "\n"
            << std::setw(10) << "median" << st.median << "\n"
            << std::setw(10) << "min" << st.min << "\n"
            << std::setw(10) << "max" << st.max << "\n"
            << std::setw(10) << "welch" << st.welch << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-dimension multiuser detection simulator"};
  app.require_subcommand(1);

  std::string config_path, output, csv_path;
  unsigned workers = 0;
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo sweep and emit CSV");
  sim->add_option("--config", config_path, "Experiment config file")->required();
  sim->add_option("--workers", workers, "Worker threads (overrides config; 0 = auto)");
  sim->add_option("--output", output, "CSV output path (overrides config; default stdout)");

  double alpha = 0.0, c = 0.0;
  auto* bnd = app.add_subcommand("bound", "Evaluate coherence conditions and error bounds");
  bnd->add_option("--config", config_path, "Experiment config file")->required();
  bnd->add_option("--csv", csv_path, "Also write the reports as CSV");
  bnd->add_option("--alpha", alpha, "Override alpha");
  bnd->add_option("--c", c, "Override the tail constant c");

  int n = 0, m = 0, samples = 100;
  std::uint64_t seed = 1;
  auto* coh = app.add_subcommand("coherence", "Coherence statistics of random partial DFT matrices");
  coh->add_option("--n", n, "Users N")->required();
  coh->add_option("--m", m, "Correlators M")->required();
  coh->add_option("--seed", seed, "Seed")->required();
  coh->add_option("--samples", samples, "Number of matrices to draw");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config_path, workers, output);
    if (*bnd) return bound(config_path, csv_path, alpha, c);
    if (*coh) return coherence_cmd(n, m, seed, samples);
  } catch (const std::exception& e) {
    std::cerr << "rdmud: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
