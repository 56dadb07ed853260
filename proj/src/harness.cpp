#include "mdl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mdl/enumerator.hpp"
#include "mdl/simulator.hpp"

namespace mdl {

namespace {

// Stream id 0 is reserved for the per-experiment source waveform draw;
// trial streams start at 1.
constexpr std::uint64_t kSignalStreamId = 0;
constexpr std::uint64_t kTrialStreamBase = 1;

constexpr double kZ95 = 1.959963984540054;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

SignalModel parse_model(const std::string& name) {
  if (name == "stochastic") return SignalModel::kStochastic;
  if (name == "deterministic") return SignalModel::kDeterministic;
  throw ConfigError("config: model must be \"stochastic\" or \"deterministic\", got \"" + name +
                    "\"");
}

}  // namespace

int SnrGrid::size() const {
  return static_cast<int>(std::floor((stop_db - start_db) / step_db + 0.5)) + 1;
}

void SnrGrid::validate() const {
  if (!(step_db > 0.0)) {
    throw ConfigError("config: snr_db.step must be positive");
  }
  if (start_db > stop_db) {
    throw ConfigError("config: snr_db.start must be <= snr_db.stop");
  }
}

Scenario ExperimentConfig::scenario_at(double snr_db) const {
  Scenario s;
  s.array.sensors = sensors;
  s.sources.doas_deg = doas_deg;
  s.sources.powers.assign(doas_deg.size(), power_from_snr_db(snr_db, noise_var));
  s.snapshots = snapshots;
  s.noise_var = noise_var;
  s.model = model;
  return s;
}

void ExperimentConfig::validate() const {
  snr.validate();
  if (trials < 1) {
    throw ConfigError("config: trials must be >= 1");
  }
  if (workers < 1) {
    throw ConfigError("config: workers must be >= 1");
  }
  try {
    scenario_at(snr.start_db).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw ConfigError("config: top-level JSON value must be an object");
  }

  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "L") {
        cfg.sensors = value.get<int>();
      } else if (key == "n") {
        cfg.snapshots = value.get<int>();
      } else if (key == "doas_deg") {
        cfg.doas_deg = value.get<std::vector<double>>();
      } else if (key == "model") {
        cfg.model = parse_model(value.get<std::string>());
      } else if (key == "noise_var") {
        cfg.noise_var = value.get<double>();
      } else if (key == "snr_db") {
        if (!value.is_object()) {
          throw ConfigError("config: snr_db must be an object {start, stop, step}");
        }
        for (const auto& [gkey, gval] : value.items()) {
          if (gkey == "start") {
            cfg.snr.start_db = gval.get<double>();
          } else if (gkey == "stop") {
            cfg.snr.stop_db = gval.get<double>();
          } else if (gkey == "step") {
            cfg.snr.step_db = gval.get<double>();
          } else {
            throw ConfigError("config: unknown snr_db key \"" + gkey + "\"");
          }
        }
      } else if (key == "trials") {
        cfg.trials = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "out") {
        cfg.out_path = value.get<std::string>();
      } else if (key == "workers") {
        cfg.workers = value.get<int>();
      } else if (key == "redraw_deterministic_signal") {
        cfg.redraw_deterministic_signal = value.get<bool>();
      } else {
        throw ConfigError("config: unknown key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) {
    throw ConfigError("config: cannot open \"" + json_path + "\"");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

WilsonInterval wilson_interval(int successes, int trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: invalid counts");
  }
  const double n = trials;
  const double p = successes / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void parallel_blocks(int total, int workers,
                     const std::function<void(int, int, int)>& fn) {
  if (total <= 0) return;
  const int used = std::max(1, std::min(workers, total));
  if (used == 1) {
    fn(0, 0, total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(used);
  const int base = total / used;
  const int extra = total % used;
  int begin = 0;
  for (int w = 0; w < used; ++w) {
    const int len = base + (w < extra ? 1 : 0);
    pool.emplace_back(fn, w, begin, begin + len);
    begin += len;
  }
  for (auto& t : pool) {
    t.join();
  }
}

std::vector<CurvePoint> run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const int points = cfg.snr.size();
  const int d = cfg.source_count();
  std::vector<CurvePoint> curve(points);

  // Conditional deterministic model: one unit-power waveform realization for
  // the whole experiment, rescaled per SNR point.
  ComplexMatrix unit_signal;
  const bool fixed_signal =
      cfg.model == SignalModel::kDeterministic && !cfg.redraw_deterministic_signal && d > 0;
  if (fixed_signal) {
    SourceSet unit_sources;
    unit_sources.doas_deg = cfg.doas_deg;
    unit_sources.powers.assign(cfg.doas_deg.size(), 1.0);
    RngStream rng(cfg.seed, kSignalStreamId);
    unit_signal = deterministic_source_matrix(unit_sources, cfg.snapshots, rng);
  }

  for (int k = 0; k < points; ++k) {
    const double snr_db = cfg.snr.at(k);
    const Scenario sc = cfg.scenario_at(snr_db);
    ComplexMatrix fixed;
    if (fixed_signal) {
      fixed = std::sqrt(sc.sources.powers.empty() ? 1.0 : sc.sources.powers[0]) * unit_signal;
    }

    // One count slot per block; integer totals make the reduction order
    // irrelevant, so the result is independent of the worker count.
    std::vector<int> misses(cfg.workers, 0);
    std::vector<int> overs(cfg.workers, 0);
    const std::uint64_t point_base = kTrialStreamBase + static_cast<std::uint64_t>(k) *
                                                            static_cast<std::uint64_t>(cfg.trials);
    parallel_blocks(cfg.trials, cfg.workers, [&](int block, int begin, int end) {
      int miss = 0;
      int over = 0;
      for (int t = begin; t < end; ++t) {
        RngStream rng(cfg.seed, point_base + static_cast<std::uint64_t>(t));
        const SnapshotSet snap = fixed_signal
                                     ? generate_snapshots_fixed_signal(sc, fixed, rng)
                                     : generate_snapshots(sc, rng);
        const MdlResult mdl = estimate_d(snap.sample_eigs, cfg.snapshots);
        if (mdl.d_hat < d) ++miss;
        if (mdl.d_hat > d) ++over;
      }
      misses[block] = miss;
      overs[block] = over;
    });

    int miss_total = 0;
    int over_total = 0;
    for (int w = 0; w < cfg.workers; ++w) {
      miss_total += misses[w];
      over_total += overs[w];
    }

    CurvePoint& pt = curve[k];
    pt.snr_db = snr_db;
    pt.trials = cfg.trials;
    pt.pm_empirical = static_cast<double>(miss_total) / cfg.trials;
    pt.pm_overestimate = static_cast<double>(over_total) / cfg.trials;
    const WilsonInterval ci = wilson_interval(miss_total, cfg.trials);
    pt.ci_low = ci.low;
    pt.ci_high = ci.high;
  }
  return curve;
}

std::vector<CurvePoint> run_prediction(const ExperimentConfig& cfg) {
  cfg.validate();
  const int points = cfg.snr.size();
  const int d = cfg.source_count();
  std::vector<CurvePoint> curve(points);
  for (int k = 0; k < points; ++k) {
    CurvePoint& pt = curve[k];
    pt.snr_db = cfg.snr.at(k);
    if (d == 0) {
      // No sources: nothing can be missed.
      pt.pm_proposed = 0.0;
      pt.pm_wang = 0.0;
      continue;
    }
    const PopulationSpectrum spectrum = population_spectrum(cfg.scenario_at(pt.snr_db));
    const PmPrediction proposed = pm_predict(spectrum, cfg.snapshots, d);
    const PmPrediction wang = pm_wang_baseline(spectrum, cfg.snapshots, d);
    pt.pm_proposed = proposed.p_miss;
    pt.pm_wang = wang.p_miss;
    pt.valid = proposed.valid;
  }
  return curve;
}

std::vector<CurvePoint> run_compare(const ExperimentConfig& cfg) {
  std::vector<CurvePoint> mc = run_monte_carlo(cfg);
  const std::vector<CurvePoint> an = run_prediction(cfg);
  for (std::size_t i = 0; i < mc.size(); ++i) {
    mc[i].pm_proposed = an[i].pm_proposed;
    mc[i].pm_wang = an[i].pm_wang;
    mc[i].valid = an[i].valid;
  }
  return mc;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
  os << "snr_db,pm_empirical,ci_low,ci_high,pm_proposed,pm_wang,valid_flag,trials\n";
  for (const CurvePoint& pt : points) {
    os << format_double(pt.snr_db) << ',' << format_double(pt.pm_empirical) << ','
       << format_double(pt.ci_low) << ',' << format_double(pt.ci_high) << ','
       << format_double(pt.pm_proposed) << ',' << format_double(pt.pm_wang) << ','
       << (pt.valid ? 1 : 0) << ',' << pt.trials << '\n';
  }
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("write_curve_csv: cannot open \"" + path + "\"");
  }
  write_curve_csv(out, points);
}

double find_crossing(const std::vector<double>& snr_db, const std::vector<double>& values,
                     double level) {
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i] >= level && values[i + 1] < level) {
      const double span = values[i] - values[i + 1];
      const double frac = span > 0.0 ? (values[i] - level) / span : 0.0;
      return snr_db[i] + frac * (snr_db[i + 1] - snr_db[i]);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<FishlerRow> run_fishler_table(const ExperimentConfig& cfg) {
  cfg.validate();
  const int d = cfg.source_count();
  if (d < 1) {
    throw ConfigError("fishler table: at least one source required");
  }
  std::vector<FishlerRow> rows(cfg.snr.size());
  for (int k = 0; k < cfg.snr.size(); ++k) {
    rows[k].snr_db = cfg.snr.at(k);
    const PopulationSpectrum spectrum = population_spectrum(cfg.scenario_at(rows[k].snr_db));
    rows[k].lambda_d = spectrum.lambdas[d - 1];
    rows[k].mu = fishler_mu(rows[k].lambda_d, cfg.noise_var, cfg.sensors, d, cfg.snapshots);
  }
  return rows;
}

void write_fishler_csv(std::ostream& os, const std::vector<FishlerRow>& rows) {
  os << "snr_db,lambda_d,mu\n";
  for (const FishlerRow& r : rows) {
    os << format_double(r.snr_db) << ',' << format_double(r.lambda_d) << ','
       << format_double(r.mu) << '\n';
  }
}

}  // namespace mdl
