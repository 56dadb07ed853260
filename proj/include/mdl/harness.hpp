#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdl/pm_analysis.hpp"
#include "mdl/scenario.hpp"

namespace mdl {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inclusive SNR grid in dB.
struct SnrGrid {
  double start_db = -8.0;
  double stop_db = 0.0;
  double step_db = 0.25;

  int size() const;
  double at(int i) const { return start_db + i * step_db; }
  void validate() const;
};

struct ExperimentConfig {
  int sensors = 10;
  int snapshots = 100;
  std::vector<double> doas_deg = {-2.0, 2.0};
  SignalModel model = SignalModel::kStochastic;
  double noise_var = 1.0;
  SnrGrid snr;
  int trials = 2000;
  std::uint64_t seed = 20250809ull;
  std::string out_path;  // empty = stdout
  int workers = 1;
  /// Deterministic model: redraw the source waveforms every trial instead of
  /// conditioning on a single realization per experiment.
  bool redraw_deterministic_signal = false;

  int source_count() const { return static_cast<int>(doas_deg.size()); }
  Scenario scenario_at(double snr_db) const;
  void validate() const;  // throws ConfigError
};

/// Flat JSON object with the keys of ExperimentConfig; unknown keys are
/// rejected. Missing keys keep their defaults.
ExperimentConfig load_config(const std::string& json_path);
ExperimentConfig parse_config(const std::string& json_text);

/// One row of a performance curve. Empirical and analytic fields are NaN
/// when the producing pass did not run.
struct CurvePoint {
  double snr_db = 0.0;
  double pm_empirical = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  double pm_proposed = std::numeric_limits<double>::quiet_NaN();
  double pm_wang = std::numeric_limits<double>::quiet_NaN();
  bool valid = true;
  int trials = 0;
  /// Fraction of trials with d_hat > d (false-alarm style diagnostic; kept
  /// out of the fixed CSV schema).
  double pm_overestimate = std::numeric_limits<double>::quiet_NaN();
};

/// 95% Wilson score interval for an empirical proportion.
struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

WilsonInterval wilson_interval(int successes, int trials);

/// Seeded Monte Carlo sweep: for each grid SNR runs `trials` independent
/// snapshot draws (stream id = global trial index), applies the detector and
/// counts d_hat < d as a miss. Deterministic for a given (seed, config),
/// independent of the worker count.
std::vector<CurvePoint> run_monte_carlo(const ExperimentConfig& cfg);

/// Analytic curves (proposed predictor and baseline) over the same grid.
std::vector<CurvePoint> run_prediction(const ExperimentConfig& cfg);

/// Monte Carlo and analytic passes merged into one row per grid point.
std::vector<CurvePoint> run_compare(const ExperimentConfig& cfg);

/// CSV schema: snr_db,pm_empirical,ci_low,ci_high,pm_proposed,pm_wang,valid_flag,trials
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points);
void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points);

/// First downward crossing of `values` through `level`, scanning the grid
/// left to right, linearly interpolated. NaN when the curve never crosses.
double find_crossing(const std::vector<double>& snr_db, const std::vector<double>& values,
                     double level);

/// Criterion-difference mean diagnostics over the SNR grid.
struct FishlerRow {
  double snr_db = 0.0;
  double lambda_d = 0.0;
  double mu = 0.0;
};

std::vector<FishlerRow> run_fishler_table(const ExperimentConfig& cfg);
void write_fishler_csv(std::ostream& os, const std::vector<FishlerRow>& rows);

/// Runs fn(block_index, begin, end) over [0, total) split into contiguous
/// blocks, one per worker thread. fn must only touch per-index or
/// per-block state.
void parallel_blocks(int total, int workers,
                     const std::function<void(int, int, int)>& fn);

}  // namespace mdl
