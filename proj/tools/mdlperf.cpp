// mdlperf: simulation and analytic prediction of MDL source-enumeration
// performance on a uniform linear array.
//
// Subcommands:
//   predict     analytic missed-detection curves over an SNR grid
//   simulate    seeded Monte Carlo curves
//   compare     both passes merged into one CSV
//   validate    statistical invariants vs their Monte Carlo / quadrature oracles
//   fishler-mu  criterion-difference mean diagnostics table
//
// Exit codes: 0 success, 2 config error, 3 solver failure, 4 validation failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdl/harness.hpp"
#include "mdl/validation.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string model;
  std::uint64_t seed = 0;
  int trials = 0;
  int workers = 0;
  bool seed_set = false, trials_set = false, workers_set = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out", flags.out_path, "output path (default from config, else stdout)");
  cmd->add_option("--model", flags.model, "stochastic | deterministic")
      ->check(CLI::IsMember({"stochastic", "deterministic"}));
  cmd->add_option("--seed", flags.seed, "RNG seed")->trigger_on_parse();
  cmd->add_option("--trials", flags.trials, "Monte Carlo trials per SNR point");
  cmd->add_option("--workers", flags.workers, "worker threads");
}

mdl::ExperimentConfig build_config(const CLI::App* cmd, const CommonFlags& flags) {
  mdl::ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = mdl::load_config(flags.config_path);
  }
  if (cmd->count("--seed") > 0) cfg.seed = flags.seed;
  if (cmd->count("--trials") > 0) cfg.trials = flags.trials;
  if (cmd->count("--workers") > 0) cfg.workers = flags.workers;
  if (cmd->count("--out") > 0) cfg.out_path = flags.out_path;
  if (cmd->count("--model") > 0) {
    cfg.model = flags.model == "deterministic" ? mdl::SignalModel::kDeterministic
                                               : mdl::SignalModel::kStochastic;
  }
  cfg.validate();
  return cfg;
}

void emit_curve(const mdl::ExperimentConfig& cfg, const std::vector<mdl::CurvePoint>& curve) {
  if (cfg.out_path.empty()) {
    mdl::write_curve_csv(std::cout, curve);
  } else {
    mdl::write_curve_csv(cfg.out_path, curve);
    std::cerr << "wrote " << curve.size() << " rows to " << cfg.out_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MDL source enumeration: Monte Carlo simulation and analytic prediction"};
  app.require_subcommand(1);

  CommonFlags predict_flags, simulate_flags, compare_flags, fishler_flags;
  CLI::App* predict = app.add_subcommand("predict", "analytic performance curves");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo performance curves");
  CLI::App* compare = app.add_subcommand("compare", "Monte Carlo and analytic curves, merged");
  CLI::App* fishler = app.add_subcommand("fishler-mu", "criterion-difference mean table");
  add_common_flags(predict, predict_flags);
  add_common_flags(simulate, simulate_flags);
  add_common_flags(compare, compare_flags);
  add_common_flags(fishler, fishler_flags);

  CLI::App* validate = app.add_subcommand("validate", "run the statistical validation suite");
  std::uint64_t validate_seed = 20250809ull;
  int validate_workers = 1;
  std::string validate_out;
  std::vector<std::string> validate_only;
  validate->add_option("--seed", validate_seed, "RNG seed");
  validate->add_option("--workers", validate_workers, "worker threads");
  validate->add_option("--out", validate_out, "also write the report as JSON to this path");
  validate->add_option("--only", validate_only,
                       "restrict to checks whose name starts with this prefix (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (predict->parsed()) {
      const mdl::ExperimentConfig cfg = build_config(predict, predict_flags);
      emit_curve(cfg, mdl::run_prediction(cfg));
    } else if (simulate->parsed()) {
      const mdl::ExperimentConfig cfg = build_config(simulate, simulate_flags);
      emit_curve(cfg, mdl::run_monte_carlo(cfg));
    } else if (compare->parsed()) {
      const mdl::ExperimentConfig cfg = build_config(compare, compare_flags);
      emit_curve(cfg, mdl::run_compare(cfg));
    } else if (fishler->parsed()) {
      const mdl::ExperimentConfig cfg = build_config(fishler, fishler_flags);
      const std::vector<mdl::FishlerRow> rows = mdl::run_fishler_table(cfg);
      if (cfg.out_path.empty()) {
        mdl::write_fishler_csv(std::cout, rows);
      } else {
        std::ofstream out(cfg.out_path, std::ios::binary);
        if (!out) throw mdl::ConfigError("cannot open output path " + cfg.out_path);
        mdl::write_fishler_csv(out, rows);
      }
    } else if (validate->parsed()) {
      const mdl::ValidationReport report =
          mdl::validate_suite(validate_seed, validate_workers, validate_only);
      mdl::write_report_text(std::cout, report);
      if (!validate_out.empty()) {
        mdl::write_report_json(validate_out, report);
      }
      if (!report.all_pass()) {
        return 4;
      }
    }
  } catch (const mdl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mdl::SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
