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

// avwork: command-line front end for the offloading workload generator.
//
//   avwork model    [--config c.json]                 print the per-vehicle and fleet breakdown
//   avwork generate --config c.json --out dir         one series per penetration fraction
//   avwork sweep    --config c.json --out dir         fractions in parallel + sweep_summary.csv
//   avwork ap-load  --config c.json --out dir         per-AP, per-bin workload table
//   avwork compare  --config c.json --out dir         AV series vs. a baseline Mbps series
//
// Exit codes: 0 success, 1 usage/config error, 2 input parse error,
// 3 internal invariant violation. Failures print one line to stderr:
//   error: <category>: <message>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avwork/config.hpp"
#include "avwork/error.hpp"
#include "avwork/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string trace;
  std::string out;
  std::string aps;
  std::string baseline;
  std::string hourly_counts;
  std::optional<std::uint64_t> seed;
  std::optional<double> bin_seconds;
  std::optional<double> baseline_bin_seconds;
  std::vector<double> penetration;
  std::string map_mode;
  std::optional<std::uint64_t> fleet_size;
  unsigned threads = 0;
};

std::string absolute(const std::string& p) { return std::filesystem::absolute(p).generic_string(); }

avwork::RunConfig effective_config(const Flags& f) {
  namespace fs = std::filesystem;
  avwork::json doc = avwork::json::object();
  fs::path base = fs::current_path();
  if (!f.config.empty()) {
    doc = avwork::read_json_file(f.config);
    if (!doc.is_object()) throw avwork::ConfigError("configuration document must be a JSON object");
    base = fs::absolute(f.config).parent_path();
  }
  auto set_path = [&](const char* key, const std::string& value) {
    if (!value.empty()) doc["paths"][key] = absolute(value);
  };
  set_path("trace", f.trace);
  set_path("out", f.out);
  set_path("aps", f.aps);
  set_path("baseline", f.baseline);
  if (!f.hourly_counts.empty()) {
    doc.erase("hourly_counts");
    set_path("hourly_counts", f.hourly_counts);
  }
  if (f.seed) doc["seed"] = *f.seed;
  if (!f.penetration.empty()) doc["penetration"] = f.penetration;
  if (!f.map_mode.empty()) doc["map_mode"] = f.map_mode;
  if (f.fleet_size) doc["fleet_size"] = *f.fleet_size;
  if (f.bin_seconds) {
    // Keep the configured horizon; re-derive the bin count for the new width.
    const auto current = avwork::run_config_from_json(doc, base).bins;
    const double span = current.bin_seconds() * static_cast<double>(current.bin_count());
    doc["bins"]["start_s"] = current.start_s();
    doc["bins"]["bin_seconds"] = *f.bin_seconds;
    if (!(*f.bin_seconds > 0.0)) throw avwork::ConfigError("--bin-seconds must be > 0");
    doc["bins"]["bin_count"] = static_cast<std::uint64_t>(std::ceil(span / *f.bin_seconds - 1e-9));
  }
  return avwork::run_config_from_json(doc, base);
}

int exit_code(avwork::ErrorCategory c) {
  switch (c) {
    case avwork::ErrorCategory::Parse: return 2;
    case avwork::ErrorCategory::Invariant: return 3;
    default: return 1;
  }
}

void report(std::string_view category, std::string message) {
  for (auto& ch : message) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  std::cerr << "error: " << category << ": " << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Autonomous-vehicle edge-to-cloud offloading workload generator", "avwork"};
  app.require_subcommand(1);
  Flags f;

  auto add_common = [&f](CLI::App* cmd) {
    cmd->add_option("--config", f.config, "JSON configuration document");
    cmd->add_option("--trace", f.trace, "FCD (.xml) or CSV mobility trace");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--seed", f.seed, "Penetration selection seed");
    cmd->add_option("--bin-seconds", f.bin_seconds, "Time bin width in seconds");
    cmd->add_option("--penetration", f.penetration, "Penetration fractions, e.g. 0.2,0.4,1.0")->delimiter(',');
    cmd->add_option("--map-mode", f.map_mode, "Map-update rate reading")
        ->check(CLI::IsMember({"fleet-shared", "per-vehicle"}));
    cmd->add_option("--hourly-counts", f.hourly_counts, "CSV of hourly event counts (hour,count)");
    cmd->add_option("--fleet-size", f.fleet_size, "Fleet size for the model breakdown");
  };

  auto* model = app.add_subcommand("model", "Print the per-vehicle and fleet rate breakdown");
  auto* generate = app.add_subcommand("generate", "Write one workload series per penetration fraction");
  auto* sweep = app.add_subcommand("sweep", "Penetration sweep with fractions run in parallel");
  auto* ap_load = app.add_subcommand("ap-load", "Per-access-point workload table and hotspot summary");
  auto* compare = app.add_subcommand("compare", "Compare the AV series with a baseline Mbps series");
  for (auto* cmd : {model, generate, sweep, ap_load, compare}) add_common(cmd);
  sweep->add_option("--threads", f.threads, "Worker threads (0 = hardware concurrency)");
  ap_load->add_option("--aps", f.aps, "Access point CSV (ap_id,x,y)");
  compare->add_option("--baseline", f.baseline, "Baseline CSV (bin_start_s,mbps)");
  compare->add_option("--baseline-bin-seconds", f.baseline_bin_seconds, "Baseline bin width if not inferable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return 1;
  }

  try {
    const avwork::RunConfig cfg = effective_config(f);
    if (model->parsed()) {
      avwork::print_model_report(std::cout, avwork::run_model(cfg));
    } else if (generate->parsed()) {
      avwork::write_fraction_runs(cfg, avwork::run_generate(cfg), "generate");
    } else if (sweep->parsed()) {
      const auto runs = avwork::run_sweep(cfg, f.threads);
      avwork::write_fraction_runs(cfg, runs, "sweep");
      avwork::write_sweep_summary(cfg, runs);
    } else if (ap_load->parsed()) {
      const auto run = avwork::run_ap_load(cfg);
      avwork::write_ap_load(cfg, run);
      std::cout << "gini = " << avwork::format_double(run.summary.gini) << '\n';
    } else if (compare->parsed()) {
      const auto run = avwork::run_compare(cfg, f.baseline_bin_seconds);
      avwork::write_compare(cfg, run);
      std::cout << "pearson_correlation = " << avwork::format_double(run.report.correlation) << '\n';
    }
  } catch (const avwork::Error& e) {
    report(avwork::category_name(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    report("internal", e.what());
    return 3;
  }
  return 0;
}
