/*
 * Copyright 2026 The avwork Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance gate: runs each acceptance criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit status is non-zero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "avwork/avwork.hpp"
#include "oracles.hpp"

using namespace avwork;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double rel_err(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("avwork_acceptance_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- 1 -----------------------------------------------------------------------

Outcome worked_model() {
  Outcome o;
  const auto report = run_model(load_run_config(oracle::data_path("reference_model.json")));
  const std::pair<const char*, std::pair<double, double>> checks[] = {
      {"R_sv", {report.raw_bps, 38'120'000.0}},
      {"R_T", {report.telemetry_bps, 64'360.0}},
      {"S_L", {report.learning_artifact_bytes, 1'906'000.0}},
      {"S_M", {report.map_artifact_bytes, 10'000.0}},
  };
  for (const auto& [name, v] : checks) {
    const double e = rel_err(v.first, v.second);
    o.require(e <= 1e-9, std::string(name) + " rel err " + num(e));
  }
  std::ostringstream printed;
  print_model_report(printed, report);
  for (const char* line : {"R_sv = 38120000 B/s", "R_T = 64360 B/s", "S_L = 1906000 B", "S_M = 10000 B"}) {
    o.require(printed.str().find(line) != std::string::npos, std::string("printed '") + line + "'");
  }
  o.note("R_sv, R_T, S_L, S_M printed and within 1e-9");
  return o;
}

// --- 2 -----------------------------------------------------------------------

// 10 000 vehicles with staggered presence over one day, 1 s sampling.
fs::path write_linearity_trace(const fs::path& dir, std::vector<oracle::CsvRow>& rows) {
  std::mt19937_64 rng(424242);
  for (int v = 0; v < 10000; ++v) {
    const std::string id = "car" + std::to_string(v);
    const int start = static_cast<int>(rng() % 86000);
    const int len = 5 + static_cast<int>(rng() % 40);
    for (int k = 0; k < len && start + k < 86400; ++k) rows.push_back({double(start + k), id, 0.0, 0.0});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return std::tie(a.t, a.id) < std::tie(b.t, b.id); });
  const auto path = dir / "linearity.csv";
  std::ofstream out(path, std::ios::binary);
  out << "time_s,vehicle_id,x,y,speed_mps\n";
  for (const auto& r : rows) out << format_double(r.t) << ',' << r.id << ",0,0,\n";
  return path;
}

Outcome penetration_linearity() {
  Outcome o;
  const auto dir = scratch("linearity");
  std::vector<oracle::CsvRow> rows;
  RunConfig cfg;
  cfg.paths.trace = write_linearity_trace(dir, rows);
  cfg.penetration = {0.2, 0.4, 0.6, 0.8, 1.0};
  cfg.seed = 2026;

  // Full model: constant intensity so every sample carries the same expected bytes.
  const auto runs = run_sweep(cfg, 0);
  const double per_sample =
      SampleAttributor(cfg.model, make_profile(cfg), cfg.window_seconds, cfg.sample_period_s).at(0.0).total();
  double worst = 0.0;
  for (const auto& r : runs) {
    std::uint64_t recount = 0;
    for (const auto& row : rows) recount += penetration_selected(cfg.seed, row.id, r.fraction);
    o.require(r.result.samples_in_grid == recount, "sample recount at f=" + num(r.fraction));
    worst = std::max(worst, rel_err(r.result.series.grand_total() / double(recount), per_sample));
  }
  o.require(worst <= 1e-12, "bytes per selected sample varies by " + num(worst));

  // Integer-valued telemetry-only model: sums are exact, so the residual is exactly zero.
  RunConfig exact = cfg;
  const auto& t2 = cfg.model;
  exact.model = VehicleModel(t2.sensors(), t2.learning_segment_seconds(), MapPolicy{0.0, 0, 0.0});
  exact.mean_learning_rate = 0.0;
  const auto exact_runs = run_generate(exact);
  double exact_residual = 0.0;
  for (const auto& r : exact_runs) {
    exact_residual = std::max(exact_residual, std::fabs(r.result.series.grand_total() -
                                                        64'360.0 * double(r.result.samples_in_grid)));
  }
  o.require(exact_residual == 0.0, "integer-rate residual " + num(exact_residual));
  o.note("10000 vehicles, " + std::to_string(rows.size()) + " samples, per-sample spread " + num(worst) +
         ", integer-rate residual " + num(exact_residual));
  fs::remove_all(dir);
  return o;
}

// --- 3 -----------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  constexpr std::uint64_t n = 1000;
  constexpr double lambda = 1e-4, horizon = 3600.0;
  constexpr int seeds = 40;
  for (const auto mode : {MapMode::PerVehicle, MapMode::FleetShared}) {
    const auto model = reference_vehicle_model(mode);
    const auto analytic = fleet_rate(model, n, lambda, kDefaultWindowSeconds);
    const double expected_total = analytic.total_bps * horizon;
    double sum = 0.0, sum_sq = 0.0;
    bool telemetry_exact = true;
    for (int s = 0; s < seeds; ++s) {
      const auto r = monte_carlo_workload(model, n, lambda, horizon, 1000 + s, {kDefaultWindowSeconds, 0});
      sum += r.total_bytes;
      sum_sq += r.total_bytes * r.total_bytes;
      telemetry_exact = telemetry_exact && r.telemetry_bytes == analytic.telemetry_bps * horizon;
    }
    const double mean = sum / seeds;
    const double var = (sum_sq - seeds * mean * mean) / (seeds - 1);
    const double se = std::sqrt(std::max(var, 0.0) / seeds);
    const double z = se > 0 ? std::fabs(mean - expected_total) / se : 0.0;
    const std::string tag(to_string(mode));
    o.require(se > 0.0 && z <= 3.0, tag + " mean off by " + num(z) + " SE");
    o.require(telemetry_exact, tag + " telemetry not exact");
    o.note(tag + ": |mean-E|/SE=" + num(z));
  }
  return o;
}

// --- 4 -----------------------------------------------------------------------

Outcome spatial_conservation() {
  Outcome o;
  // Mini-city fixture through the full pipeline.
  const auto cfg = load_run_config(oracle::data_path("minicity_config.json"));
  const auto run = run_ap_load(cfg);
  double worst = 0.0;
  for (std::size_t b = 0; b < cfg.bins.bin_count(); ++b) {
    worst = std::max(worst, rel_err(run.table.bin_total(b).total(), run.regional.series.total(b)));
  }
  o.require(worst <= 1e-9, "bin conservation rel err " + num(worst));
  o.require(run.table.assigned_samples == run.regional.samples_in_grid, "assignment totality");

  // Every sample's grid assignment against the exhaustive oracle.
  const auto ap_rows = oracle::read_ap_rows(cfg.paths.aps);
  const ApSet aps(load_access_points(cfg));
  const GridApIndex index(aps);
  TracePipeline samples(cfg, 1.0);
  std::uint64_t checked = 0, mismatches = 0;
  while (auto s = samples.next()) {
    ++checked;
    mismatches += aps[index.nearest(s->x, s->y)].ap_id != oracle::nearest(s->x, s->y, ap_rows);
  }
  // A dense random fixture with many exact ties.
  std::mt19937_64 rng(77);
  std::vector<AccessPoint> dense;
  std::vector<oracle::ApRow> dense_rows;
  for (int i = 0; i < 40; ++i) {
    const double x = double(rng() % 30), y = double(rng() % 30);
    dense.push_back({"d" + std::to_string(i), x, y});
    dense_rows.push_back({"d" + std::to_string(i), x, y});
  }
  const ApSet dense_set(dense);
  const GridApIndex dense_index(dense_set);
  for (int i = 0; i < 200000; ++i) {
    const double x = double(rng() % 40) - 5, y = double(rng() % 40) - 5;
    ++checked;
    mismatches += dense_set[dense_index.nearest(x, y)].ap_id != oracle::nearest(x, y, dense_rows);
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " assignment mismatches");
  o.note("max bin rel err " + num(worst) + ", " + std::to_string(checked) + " assignments checked");
  return o;
}

// --- 5 -----------------------------------------------------------------------

Outcome intensity_normalization() {
  Outcome o;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> count(0.0, 1000.0), exponent(-8.0, -1.0);
  double worst_avg = 0.0, worst_ratio = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> counts(24);
    for (auto& c : counts) c = rng() % 6 == 0 ? 0.0 : count(rng);
    counts[rng() % 24] += 1.0;
    const double mean = std::pow(10.0, exponent(rng));
    const auto p = build_profile(counts, mean);
    long double integral = 0;
    for (int h = 0; h < 24; ++h) integral += static_cast<long double>(p.at(h * 3600.0)) * 3600.0L;
    worst_avg = std::max(worst_avg, rel_err(static_cast<double>(integral / 86400.0L), mean));
    for (int h = 0; h < 24; ++h) {
      for (int k = 0; k < 24; ++k) {
        if (counts[h] > 0 && counts[k] > 0) {
          worst_ratio = std::max(worst_ratio, rel_err(p.at(h * 3600.0) / p.at(k * 3600.0), counts[h] / counts[k]));
        }
      }
    }
  }
  o.require(worst_avg <= 1e-9, "time average rel err " + num(worst_avg));
  o.require(worst_ratio <= 1e-9, "hourly ratio rel err " + num(worst_ratio));
  o.note("2000 random profiles, avg err " + num(worst_avg) + ", ratio err " + num(worst_ratio));
  return o;
}

// --- 6 -----------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto dir = scratch("determinism");
  // Two complete CLI runs of every writing subcommand.
  const auto config = oracle::data_path("minicity_config.json");
  for (const char* sub : {"a", "b"}) {
    for (const char* cmd : {"generate", "sweep", "ap-load", "compare"}) {
      const std::string line = std::string("\"") + AVWORK_CLI_PATH + "\" " + cmd + " --config " + config +
                               " --out " + (dir / sub).string() + " > /dev/null";
      o.require(std::system(line.c_str()) == 0, std::string(cmd) + " exited non-zero");
    }
  }
  std::size_t files = 0;
  for (const char* name : {"series_p0.2.csv", "series_p0.4.csv", "series_p0.6.csv", "series_p0.8.csv",
                           "series_p1.csv", "sweep_summary.csv", "ap_workload.csv", "ap_hotspots.csv",
                           "comparison.csv"}) {
    const auto a = dir / "a" / name, b = dir / "b" / name;
    o.require(fs::exists(a) && fs::exists(b), std::string(name) + " missing");
    o.require(slurp(a) == slurp(b), std::string(name) + " differs");
    ++files;
  }

  // Parallel versus serial paths.
  const auto cfg = load_run_config(config);
  const auto serial = run_generate(cfg);
  const auto parallel = run_sweep(cfg, 4);
  double worst = 0.0;
  for (std::size_t i = 0; i < serial.size(); ++i) {
    for (std::size_t b = 0; b < cfg.bins.bin_count(); ++b) {
      worst = std::max(worst, rel_err(serial[i].result.series.total(b), parallel[i].result.series.total(b)));
    }
  }
  std::vector<TraceSample> samples;
  {
    TracePipeline p(cfg, 1.0);
    samples = drain(p);
  }
  const ApSet aps(load_access_points(cfg));
  const SampleAttributor attr(cfg.model, make_profile(cfg), cfg.window_seconds, cfg.sample_period_s);
  VectorSource src(samples);
  const auto table_serial = accumulate_ap_workload(src, aps, attr, cfg.bins);
  const auto table_parallel = accumulate_ap_workload_parallel(samples, aps, attr, cfg.bins, 4);
  for (std::size_t a = 0; a < aps.size(); ++a) {
    for (std::size_t b = 0; b < cfg.bins.bin_count(); ++b) {
      worst = std::max(worst, rel_err(table_serial.at(a, b).total(), table_parallel.at(a, b).total()));
    }
  }
  const auto model = reference_vehicle_model(MapMode::FleetShared);
  const auto mc1 = monte_carlo_workload(model, 300, 1e-3, 7200, 9, {1800, 1});
  const auto mc4 = monte_carlo_workload(model, 300, 1e-3, 7200, 9, {1800, 4});
  worst = std::max(worst, rel_err(mc1.total_bytes, mc4.total_bytes));
  o.require(worst <= 1e-9, "parallel vs serial rel err " + num(worst));
  o.note(std::to_string(files) + " CSVs byte-identical, parallel/serial max rel err " + num(worst));
  fs::remove_all(dir);
  return o;
}

// --- 7 -----------------------------------------------------------------------

Outcome minicity_demo() {
  Outcome o;
  const auto cfg = load_run_config(oracle::data_path("minicity_config.json"));
  const auto runs = run_generate(cfg);
  const auto& full = runs.back();
  double peak = 0.0, trough = INFINITY;
  for (std::size_t b = 0; b < cfg.bins.bin_count(); ++b) {
    peak = std::max(peak, full.result.series.total(b));
    trough = std::min(trough, full.result.series.total(b));
  }
  o.require(peak > 1.5 * trough, "peak " + num(peak) + " not > 1.5x trough " + num(trough));
  const auto ap = run_ap_load(cfg);
  o.require(ap.summary.gini > 0.0, "gini " + num(ap.summary.gini));
  o.note("peak/trough " + (trough > 0 ? num(peak / trough) : std::string("inf")) + ", AP Gini " + num(ap.summary.gini));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_seconds;  // 0 = no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 worked-model reproduction", 1.0, worked_model},
      {"2 penetration linearity", 30.0, penetration_linearity},
      {"3 oracle equivalence", 60.0, oracle_equivalence},
      {"4 spatial conservation", 10.0, spatial_conservation},
      {"5 intensity normalization", 0.0, intensity_normalization},
      {"6 determinism", 0.0, determinism},
      {"7 mini-city demo shape", 0.0, minicity_demo},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds > 0.0) o.require(secs < c.limit_seconds, "runtime over " + num(c.limit_seconds) + " s");
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << num(secs) << " s): " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
