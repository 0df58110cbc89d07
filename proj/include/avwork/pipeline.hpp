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

#pragma once

// End-to-end runs behind the CLI subcommands: model breakdown, per-penetration
// series generation, sweeps, AP load tables and baseline comparison.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <memory>
#include <mutex>
#include <exception>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "avwork/attribution.hpp"
#include "avwork/config.hpp"
#include "avwork/csv.hpp"
#include "avwork/error.hpp"
#include "avwork/intensity.hpp"
#include "avwork/io.hpp"
#include "avwork/series.hpp"
#include "avwork/spatial.hpp"
#include "avwork/trace.hpp"
#include "avwork/trace_reader.hpp"
#include "avwork/workload_model.hpp"

namespace avwork {

inline constexpr double kConservationTolerance = 1e-9;

// --- model breakdown --------------------------------------------------------

struct ModelReport {
  struct SensorLine {
    std::string modality;
    double raw_bps;
  };
  std::vector<SensorLine> sensors;
  double raw_bps = 0.0;              // R_sv
  double telemetry_bps = 0.0;        // R_T
  double learning_artifact_bytes = 0.0;  // S_L
  double lambda = 0.0;
  double learning_bps = 0.0;         // R_L
  double map_artifact_bytes = 0.0;   // S_M
  double map_bps = 0.0;              // R_M
  WorkloadRates vehicle;             // R_v
  WorkloadRates fleet;               // R_fleet
  std::uint64_t fleet_size = 0;
  double window_seconds = 0.0;
  MapMode mode = MapMode::PerVehicle;
};

inline ModelReport run_model(const RunConfig& cfg) {
  ModelReport r;
  for (const auto& s : cfg.model.sensors()) r.sensors.push_back({s.modality, raw_rate(s)});
  r.raw_bps = vehicle_raw_rate(cfg.model);
  r.telemetry_bps = telemetry_rate(cfg.model);
  r.learning_artifact_bytes = learning_artifact_size(cfg.model);
  r.lambda = cfg.mean_learning_rate;
  r.learning_bps = learning_rate(cfg.model, r.lambda);
  r.map_artifact_bytes = map_artifact_size(cfg.model);
  r.map_bps = map_rate(cfg.model, cfg.fleet_size, cfg.window_seconds);
  r.vehicle = vehicle_rate(cfg.model, r.lambda, cfg.fleet_size, cfg.window_seconds);
  r.fleet = fleet_rate(cfg.model, cfg.fleet_size, r.lambda, cfg.window_seconds);
  r.fleet_size = cfg.fleet_size;
  r.window_seconds = cfg.window_seconds;
  r.mode = cfg.map_mode();
  return r;
}

inline void print_model_report(std::ostream& out, const ModelReport& r) {
  auto f = [](double v) { return format_significant(v); };
  out << "map_mode = " << to_string(r.mode) << '\n';
  out << "fleet_size = " << r.fleet_size << '\n';
  out << "window_seconds = " << f(r.window_seconds) << " s\n";
  out << "lambda_L = " << f(r.lambda) << " events/vehicle/s\n";
  for (const auto& s : r.sensors) out << "R_s[" << s.modality << "] = " << f(s.raw_bps) << " B/s\n";
  out << "R_sv = " << f(r.raw_bps) << " B/s\n";
  out << "R_T = " << f(r.telemetry_bps) << " B/s\n";
  out << "S_L = " << f(r.learning_artifact_bytes) << " B\n";
  out << "R_L = " << f(r.learning_bps) << " B/s\n";
  out << "S_M = " << f(r.map_artifact_bytes) << " B\n";
  out << "R_M = " << f(r.map_bps) << " B/s\n";
  out << "R_v = " << f(r.vehicle.total_bps) << " B/s (" << f(bytes_per_second_to_mbps(r.vehicle.total_bps))
      << " Mbps)\n";
  out << "R_fleet = " << f(r.fleet.total_bps) << " B/s (" << f(bytes_per_second_to_mbps(r.fleet.total_bps))
      << " Mbps)\n";
  out << "R_fleet[telemetry] = " << f(r.fleet.telemetry_bps) << " B/s\n";
  out << "R_fleet[learning] = " << f(r.fleet.learning_bps) << " B/s\n";
  out << "R_fleet[map] = " << f(r.fleet.map_bps) << " B/s\n";
}

// --- trace pipeline ---------------------------------------------------------

inline IntensityProfile make_profile(const RunConfig& cfg) {
  std::optional<std::array<double, 24>> counts = cfg.hourly_counts;
  if (!cfg.paths.hourly_counts.empty()) {
    std::ifstream in(cfg.paths.hourly_counts);
    if (!in) throw IoError("cannot open hourly counts '" + cfg.paths.hourly_counts.string() + "'");
    counts = read_hourly_counts_csv(in, cfg.paths.hourly_counts.string());
  }
  if (!counts || cfg.mean_learning_rate == 0.0) return IntensityProfile::constant(cfg.mean_learning_rate);
  return build_profile(*counts, cfg.mean_learning_rate);
}

inline std::optional<EquirectangularProjection> make_projection(const RunConfig& cfg) {
  if (!cfg.geo_coordinates) return std::nullopt;
  if (!cfg.region) throw ConfigError("geo_coordinates requires a region to centre the projection");
  const Point c = cfg.region->centroid();
  return EquirectangularProjection(c.x, c.y);
}

inline std::vector<AccessPoint> load_access_points(const RunConfig& cfg) {
  if (cfg.paths.aps.empty()) throw ConfigError("no access point list configured (paths.aps)");
  std::ifstream in(cfg.paths.aps);
  if (!in) throw IoError("cannot open access points '" + cfg.paths.aps.string() + "'");
  auto aps = read_access_points_csv(in, cfg.paths.aps.string());
  if (auto proj = make_projection(cfg)) {
    for (auto& ap : aps) {
      const Point p = proj->project(ap.x, ap.y);
      ap.x = p.x;
      ap.y = p.y;
    }
  }
  return aps;
}

struct StageStats {
  std::uint64_t samples_read = 0;
  StreamStats region;
  StreamStats penetration;
  std::uint64_t selected_vehicles = 0;
  std::uint64_t rejected_vehicles = 0;
};

/// trace file -> [projection] -> [region filter] -> penetration sampler.
class TracePipeline final : public SampleSource {
 public:
  TracePipeline(const RunConfig& cfg, double fraction) {
    if (cfg.paths.trace.empty()) throw ConfigError("no trace configured (paths.trace or --trace)");
    file_ = std::make_unique<TraceFile>(cfg.paths.trace);
    counting_ = std::make_unique<Counting>(*file_);
    SampleSource* tail = counting_.get();
    if (auto proj = make_projection(cfg)) {
      projecting_ = std::make_unique<ProjectingSource>(*tail, *proj);
      tail = projecting_.get();
      region_ = std::make_unique<RegionFilter>(*tail, proj->project(*cfg.region));
      tail = region_.get();
    } else if (cfg.region) {
      region_ = std::make_unique<RegionFilter>(*tail, *cfg.region);
      tail = region_.get();
    }
    sampler_ = std::make_unique<PenetrationSampler>(*tail, fraction, cfg.seed);
  }

  std::optional<TraceSample> next() override { return sampler_->next(); }

  StageStats stats() const {
    StageStats s;
    s.samples_read = counting_->count;
    if (region_) {
      s.region = region_->stats();
    } else {
      s.region = {counting_->count, counting_->count, 0};
    }
    s.penetration = sampler_->stats();
    s.selected_vehicles = sampler_->selected_vehicles();
    s.rejected_vehicles = sampler_->rejected_vehicles();
    return s;
  }

 private:
  struct Counting final : SampleSource {
    explicit Counting(SampleSource& up) : upstream(up) {}
    std::optional<TraceSample> next() override {
      auto s = upstream.next();
      if (s) ++count;
      return s;
    }
    SampleSource& upstream;
    std::uint64_t count = 0;
  };

  std::unique_ptr<TraceFile> file_;
  std::unique_ptr<Counting> counting_;
  std::unique_ptr<ProjectingSource> projecting_;
  std::unique_ptr<RegionFilter> region_;
  std::unique_ptr<PenetrationSampler> sampler_;
};

inline nlohmann::json to_json(const StageStats& s) {
  auto stage = [](const StreamStats& st) { return nlohmann::json{{"in", st.in}, {"kept", st.kept}, {"dropped", st.dropped}}; };
  return {{"samples_read", s.samples_read},
          {"region_filter", stage(s.region)},
          {"penetration_sampler", stage(s.penetration)},
          {"selected_vehicles", s.selected_vehicles},
          {"rejected_vehicles", s.rejected_vehicles}};
}

inline void check_conservation(double binned, double streamed, const std::string& what) {
  const double scale = std::max(std::abs(binned), std::abs(streamed));
  if (scale > 0.0 && std::abs(binned - streamed) > kConservationTolerance * scale) {
    throw InvariantError(what + ": binned total " + format_double(binned) + " != stream total " +
                         format_double(streamed));
  }
}

struct FractionRun {
  double fraction = 0.0;
  SeriesResult result;
  StageStats stats;
};

inline std::string fraction_label(double fraction) { return "p" + format_double(fraction); }

inline FractionRun run_fraction(const RunConfig& cfg, double fraction, const IntensityProfile& profile) {
  TracePipeline pipeline(cfg, fraction);
  const SampleAttributor attributor(cfg.model, profile, cfg.window_seconds, cfg.sample_period_s);
  FractionRun run{fraction, accumulate_series(pipeline, attributor, cfg.bins, fraction_label(fraction)),
                  pipeline.stats()};
  check_conservation(run.result.series.grand_total(), run.result.stream_total_bytes,
                     "series " + run.result.series.label);
  return run;
}

/// Serial pass over every configured penetration fraction.
inline std::vector<FractionRun> run_generate(const RunConfig& cfg) {
  const IntensityProfile profile = make_profile(cfg);
  std::vector<FractionRun> runs;
  for (double f : cfg.penetration) runs.push_back(run_fraction(cfg, f, profile));
  return runs;
}

/// Same work as run_generate with fractions processed concurrently. Each
/// fraction is an independent deterministic pipeline.
inline std::vector<FractionRun> run_sweep(const RunConfig& cfg, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  const IntensityProfile profile = make_profile(cfg);
  std::vector<FractionRun> runs(cfg.penetration.size());
  std::size_t next = 0;
  std::mutex mu;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= runs.size() || error) return;
        i = next++;
      }
      try {
        runs[i] = run_fraction(cfg, cfg.penetration[i], profile);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, runs.size()); ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return runs;
}

struct ApLoadRun {
  ApWorkloadTable table;
  HotspotSummary summary;
  SeriesResult regional;  // the same samples without spatial assignment
  StageStats stats;
  double fraction = 1.0;
};

inline double largest_fraction(const RunConfig& cfg) {
  return *std::max_element(cfg.penetration.begin(), cfg.penetration.end());
}

inline ApLoadRun run_ap_load(const RunConfig& cfg) {
  const IntensityProfile profile = make_profile(cfg);
  const ApSet aps(load_access_points(cfg));
  const double fraction = largest_fraction(cfg);
  const SampleAttributor attributor(cfg.model, profile, cfg.window_seconds, cfg.sample_period_s);

  TracePipeline pipeline(cfg, fraction);
  ApLoadRun run;
  run.fraction = fraction;
  run.table = ApWorkloadTable(aps, cfg.bins);
  run.regional = SeriesResult{WorkloadSeries(fraction_label(fraction), cfg.bins)};
  GridApIndex index(aps);
  while (auto s = pipeline.next()) {
    const auto bin = cfg.bins.index_of(s->time_s);
    if (!bin) {
      ++run.table.overflow_samples;
      ++run.regional.overflow_samples;
      continue;
    }
    const ComponentBytes b = attributor.at(s->time_s);
    run.table.add(index.nearest(s->x, s->y), *bin, b);
    ++run.table.assigned_samples;
    run.regional.series.telemetry[*bin] += b.telemetry;
    run.regional.series.learning[*bin] += b.learning;
    run.regional.series.map[*bin] += b.map;
    run.regional.stream_total_bytes += b.total();
    ++run.regional.samples_in_grid;
  }
  run.stats = pipeline.stats();
  for (std::size_t bin = 0; bin < cfg.bins.bin_count(); ++bin) {
    check_conservation(run.table.bin_total(bin).total(), run.regional.series.total(bin),
                       "AP table bin " + std::to_string(bin));
  }
  run.summary = hotspot_summary(run.table);
  return run;
}

struct CompareRun {
  ComparisonReport report;
  RateSeries av;
  double fraction = 1.0;
};

inline CompareRun run_compare(const RunConfig& cfg, std::optional<double> baseline_bin_seconds = std::nullopt) {
  if (cfg.paths.baseline.empty()) throw ConfigError("no baseline series configured (paths.baseline)");
  std::ifstream in(cfg.paths.baseline);
  if (!in) throw IoError("cannot open baseline '" + cfg.paths.baseline.string() + "'");
  const RateSeries baseline = read_baseline_csv(in, cfg.paths.baseline.string(), baseline_bin_seconds);
  const double fraction = largest_fraction(cfg);
  FractionRun run = run_fraction(cfg, fraction, make_profile(cfg));
  CompareRun out;
  out.fraction = fraction;
  out.av = to_mbps(run.result.series);
  out.report = compare_baseline(out.av, baseline);
  return out;
}

// --- output -----------------------------------------------------------------

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

/// Metadata common to every command. `generated_at` is the only
/// non-deterministic field.
inline nlohmann::json run_metadata(const RunConfig& cfg, std::string_view command) {
  return {{"command", command},
          {"generated_at", utc_timestamp()},
          {"map_mode", std::string(to_string(cfg.map_mode()))},
          {"spatial_map_attribution", "per-vehicle"},
          {"window_seconds", cfg.window_seconds},
          {"sample_period_s", cfg.sample_period_s},
          {"seed", cfg.seed},
          {"mean_learning_rate", cfg.mean_learning_rate},
          {"penetration_hash", "splitmix64_mix(fnv1a64(le64(seed) || vehicle_id)) >> 11, * 2^-53 < fraction"},
          {"units", {{"bytes", "decimal"}, {"mbps", "1e6 bit/s"}}}};
}

inline void prepare_output_dir(const RunConfig& cfg) {
  if (cfg.paths.out.empty()) throw ConfigError("no output directory configured (paths.out or --out)");
  std::error_code ec;
  std::filesystem::create_directories(cfg.paths.out, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.paths.out.string() + "': " + ec.message());
  write_json_file(cfg.paths.out / "effective_config.json", to_json(cfg));
}

inline void write_fraction_runs(const RunConfig& cfg, const std::vector<FractionRun>& runs, std::string_view command) {
  prepare_output_dir(cfg);
  nlohmann::json meta = run_metadata(cfg, command);
  nlohmann::json fractions = nlohmann::json::array();
  for (const auto& r : runs) {
    const auto name = "series_" + fraction_label(r.fraction) + ".csv";
    auto out = open_output(cfg.paths.out / name);
    write_series_csv(out, r.result.series);
    fractions.push_back({{"fraction", r.fraction},
                         {"file", name},
                         {"total_bytes", r.result.series.grand_total()},
                         {"stream_total_bytes", r.result.stream_total_bytes},
                         {"samples_in_grid", r.result.samples_in_grid},
                         {"overflow_samples", r.result.overflow_samples},
                         {"stages", to_json(r.stats)}});
  }
  meta["fractions"] = fractions;
  write_json_file(cfg.paths.out / (std::string(command) + "_metadata.json"), meta);
}

inline void write_sweep_summary(const RunConfig& cfg, const std::vector<FractionRun>& runs) {
  auto out = open_output(cfg.paths.out / "sweep_summary.csv");
  out << "fraction,selected_vehicles,selected_samples,total_bytes,mean_mbps\n";
  for (const auto& r : runs) {
    const double span = cfg.bins.bin_seconds() * static_cast<double>(cfg.bins.bin_count());
    out << format_double(r.fraction) << ',' << r.stats.selected_vehicles << ',' << r.result.samples_in_grid << ','
        << format_double(r.result.series.grand_total()) << ','
        << format_double(r.result.series.grand_total() * 8.0 / (span * 1e6)) << '\n';
  }
}

inline void write_ap_load(const RunConfig& cfg, const ApLoadRun& run) {
  prepare_output_dir(cfg);
  {
    auto out = open_output(cfg.paths.out / "ap_workload.csv");
    write_ap_table_csv(out, run.table);
  }
  {
    auto out = open_output(cfg.paths.out / "ap_hotspots.csv");
    write_hotspots_csv(out, run.summary);
  }
  nlohmann::json doc = run_metadata(cfg, "ap-load");
  doc["fraction"] = run.fraction;
  doc["stages"] = to_json(run.stats);
  doc["table"] = to_json(run.table);
  doc["hotspots"] = to_json(run.summary);
  write_json_file(cfg.paths.out / "ap_workload.json", doc);
}

inline void write_compare(const RunConfig& cfg, const CompareRun& run) {
  prepare_output_dir(cfg);
  {
    auto out = open_output(cfg.paths.out / "comparison.csv");
    write_comparison_csv(out, run.report);
  }
  nlohmann::json doc = run_metadata(cfg, "compare");
  doc["fraction"] = run.fraction;
  doc["statistics"] = to_json(run.report);
  write_json_file(cfg.paths.out / "comparison.json", doc);
}

}  // namespace avwork
