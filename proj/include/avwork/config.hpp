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

// Run configuration: a JSON document mirroring the model types plus the
// pipeline settings. Relative paths resolve against the document's directory.
//
//   {
//     "vehicle_model": {
//       "sensors": [{"modality": "camera", "count": 13, "frequency_hz": 10,
//                    "sample_bytes": 200000, "telemetry_fraction": 0.002,
//                    "learning_fraction": 0.1, "learning_compression": 0.1}],
//       "learning_segment_seconds": 5,
//       "map_policy": {"artifact_probability": 0.05, "features_per_artifact": 50,
//                      "bytes_per_feature": 200}
//     },
//     "map_mode": "per-vehicle",
//     "window_seconds": 3600,
//     "fleet_size": 100,
//     "region": {"box": [x_min, y_min, x_max, y_max]}  |  {"polygon": [[x, y], ...]},
//     "geo_coordinates": false,
//     "bins": {"start_s": 0, "bin_seconds": 3600, "bin_count": 24},
//     "penetration": [0.2, 0.4, 0.6, 0.8, 1.0],
//     "seed": 1,
//     "mean_learning_rate": 1e-4,
//     "hourly_counts": [24 numbers],
//     "sample_period_s": 1,
//     "paths": {"trace": "...", "aps": "...", "hourly_counts": "...",
//               "baseline": "...", "out": "..."}
//   }

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avwork/error.hpp"
#include "avwork/intensity.hpp"
#include "avwork/trace.hpp"
#include "avwork/workload_model.hpp"

namespace avwork {

using json = nlohmann::json;

/// Reference vehicle: 13 cameras, 4 LiDARs,
/// 6 radars at 10 Hz; decimal kilobytes.
inline VehicleModel reference_vehicle_model(MapMode mode = MapMode::PerVehicle) {
  return VehicleModel(
      {
          {"camera", 13, 10.0, 200e3, 0.002, 0.1, 0.1},
          {"lidar", 4, 10.0, 300e3, 0.001, 0.1, 0.1},
          {"radar", 6, 10.0, 2e3, 0.003, 0.1, 0.1},
      },
      5.0, MapPolicy{0.05, 50, 200.0, mode});
}

struct RunPaths {
  std::filesystem::path trace;
  std::filesystem::path aps;
  std::filesystem::path hourly_counts;
  std::filesystem::path baseline;
  std::filesystem::path out;
};

struct RunConfig {
  VehicleModel model = reference_vehicle_model();
  double window_seconds = kDefaultWindowSeconds;
  std::uint64_t fleet_size = 100;
  std::optional<Region> region;
  bool geo_coordinates = false;
  BinGrid bins{0.0, 3600.0, 24};
  std::vector<double> penetration{1.0};
  std::uint64_t seed = 1;
  double mean_learning_rate = kDefaultMeanLearningRate;
  std::optional<std::array<double, 24>> hourly_counts;
  double sample_period_s = 1.0;
  RunPaths paths;

  MapMode map_mode() const noexcept { return model.map_mode(); }
};

namespace detail {

inline void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(where));
  return get_or<T>(j, key, T{});
}

inline std::uint64_t get_count(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + std::string(where));
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("'" + std::string(key) + "' in " + std::string(where) + " must be a non-negative integer");
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace detail

inline SensorSpec sensor_from_json(const json& j) {
  detail::check_keys(j, "sensor", {"modality", "count", "frequency_hz", "sample_bytes", "telemetry_fraction",
                                   "learning_fraction", "learning_compression"});
  SensorSpec s;
  s.modality = detail::get_required<std::string>(j, "modality", "sensor");
  s.count = detail::get_count(j, "count", "sensor");
  s.frequency_hz = detail::get_required<double>(j, "frequency_hz", "sensor");
  s.sample_bytes = detail::get_required<double>(j, "sample_bytes", "sensor");
  s.telemetry_fraction = detail::get_or<double>(j, "telemetry_fraction", 0.0);
  s.learning_fraction = detail::get_or<double>(j, "learning_fraction", 0.0);
  s.learning_compression = detail::get_or<double>(j, "learning_compression", 0.0);
  return s;
}

inline VehicleModel vehicle_model_from_json(const json& j, MapMode mode = MapMode::PerVehicle) {
  detail::check_keys(j, "vehicle_model", {"sensors", "learning_segment_seconds", "map_policy"});
  std::vector<SensorSpec> sensors;
  if (j.contains("sensors")) {
    if (!j.at("sensors").is_array()) throw ConfigError("vehicle_model.sensors must be an array");
    for (const auto& s : j.at("sensors")) sensors.push_back(sensor_from_json(s));
  }
  MapPolicy policy;
  policy.mode = mode;
  if (j.contains("map_policy")) {
    const auto& m = j.at("map_policy");
    detail::check_keys(m, "map_policy", {"artifact_probability", "features_per_artifact", "bytes_per_feature"});
    policy.artifact_probability = detail::get_or<double>(m, "artifact_probability", 0.0);
    policy.features_per_artifact = m.contains("features_per_artifact")
                                       ? detail::get_count(m, "features_per_artifact", "map_policy")
                                       : 0;
    policy.bytes_per_feature = detail::get_or<double>(m, "bytes_per_feature", 0.0);
  }
  try {
    return VehicleModel(std::move(sensors), detail::get_or<double>(j, "learning_segment_seconds", 0.0), policy);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid vehicle_model: ") + e.what());
  }
}

inline json to_json(const VehicleModel& model) {
  json sensors = json::array();
  for (const auto& s : model.sensors()) {
    sensors.push_back({{"modality", s.modality},
                       {"count", s.count},
                       {"frequency_hz", s.frequency_hz},
                       {"sample_bytes", s.sample_bytes},
                       {"telemetry_fraction", s.telemetry_fraction},
                       {"learning_fraction", s.learning_fraction},
                       {"learning_compression", s.learning_compression}});
  }
  const auto& m = model.map_policy();
  return {{"sensors", sensors},
          {"learning_segment_seconds", model.learning_segment_seconds()},
          {"map_policy",
           {{"artifact_probability", m.artifact_probability},
            {"features_per_artifact", m.features_per_artifact},
            {"bytes_per_feature", m.bytes_per_feature}}}};
}

inline Region region_from_json(const json& j) {
  detail::check_keys(j, "region", {"box", "polygon"});
  try {
    if (j.contains("box") == j.contains("polygon")) throw ConfigError("region needs exactly one of 'box' or 'polygon'");
    if (j.contains("box")) {
      const auto b = j.at("box").get<std::vector<double>>();
      if (b.size() != 4) throw ConfigError("region.box must be [x_min, y_min, x_max, y_max]");
      return Region::box(b[0], b[1], b[2], b[3]);
    }
    Region::Polygon poly;
    for (const auto& v : j.at("polygon")) {
      const auto xy = v.get<std::vector<double>>();
      if (xy.size() != 2) throw ConfigError("region.polygon vertices must be [x, y]");
      poly.push_back({xy[0], xy[1]});
    }
    return Region::polygon(std::move(poly));
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("invalid region: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid region: ") + e.what());
  }
}

inline json to_json(const Region& r) {
  if (const auto* b = r.as_box()) return {{"box", {b->x_min, b->y_min, b->x_max, b->y_max}}};
  json poly = json::array();
  for (const auto& v : *r.as_polygon()) poly.push_back({v.x, v.y});
  return {{"polygon", poly}};
}

inline RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  detail::check_keys(j, "config",
                     {"vehicle_model", "map_mode", "window_seconds", "fleet_size", "region", "geo_coordinates",
                      "bins", "penetration", "seed", "mean_learning_rate", "hourly_counts", "sample_period_s",
                      "paths"});
  RunConfig c;
  const MapMode mode = parse_map_mode(detail::get_or<std::string>(j, "map_mode", "per-vehicle"));
  c.model = j.contains("vehicle_model") ? vehicle_model_from_json(j.at("vehicle_model"), mode)
                                        : reference_vehicle_model(mode);
  c.window_seconds = detail::get_or<double>(j, "window_seconds", kDefaultWindowSeconds);
  if (!(c.window_seconds > 0.0)) throw ConfigError("window_seconds must be > 0");
  if (j.contains("fleet_size")) c.fleet_size = detail::get_count(j, "fleet_size", "config");
  if (j.contains("region")) c.region = region_from_json(j.at("region"));
  c.geo_coordinates = detail::get_or<bool>(j, "geo_coordinates", false);
  if (j.contains("bins")) {
    const auto& b = j.at("bins");
    detail::check_keys(b, "bins", {"start_s", "bin_seconds", "bin_count"});
    try {
      c.bins = BinGrid(detail::get_or<double>(b, "start_s", 0.0), detail::get_or<double>(b, "bin_seconds", 3600.0),
                       b.contains("bin_count") ? detail::get_count(b, "bin_count", "bins") : 24);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("invalid bins: ") + e.what());
    }
  }
  if (j.contains("penetration")) {
    c.penetration = detail::get_or<std::vector<double>>(j, "penetration", {});
    if (c.penetration.empty()) throw ConfigError("penetration list is empty");
    for (double f : c.penetration) {
      if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("penetration fractions must be in [0,1]");
    }
  }
  if (j.contains("seed")) c.seed = detail::get_count(j, "seed", "config");
  c.mean_learning_rate = detail::get_or<double>(j, "mean_learning_rate", kDefaultMeanLearningRate);
  if (!(c.mean_learning_rate >= 0.0)) throw ConfigError("mean_learning_rate must be >= 0");
  if (j.contains("hourly_counts")) {
    const auto v = detail::get_or<std::vector<double>>(j, "hourly_counts", {});
    if (v.size() != 24) throw ConfigError("hourly_counts must have 24 entries");
    std::array<double, 24> a{};
    std::copy(v.begin(), v.end(), a.begin());
    c.hourly_counts = a;
  }
  c.sample_period_s = detail::get_or<double>(j, "sample_period_s", 1.0);
  if (!(c.sample_period_s > 0.0)) throw ConfigError("sample_period_s must be > 0");
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    detail::check_keys(p, "paths", {"trace", "aps", "hourly_counts", "baseline", "out"});
    c.paths.trace = detail::resolve(base_dir, detail::get_or<std::string>(p, "trace", ""));
    c.paths.aps = detail::resolve(base_dir, detail::get_or<std::string>(p, "aps", ""));
    c.paths.hourly_counts = detail::resolve(base_dir, detail::get_or<std::string>(p, "hourly_counts", ""));
    c.paths.baseline = detail::resolve(base_dir, detail::get_or<std::string>(p, "baseline", ""));
    c.paths.out = detail::resolve(base_dir, detail::get_or<std::string>(p, "out", ""));
  }
  if (c.hourly_counts && !c.paths.hourly_counts.empty()) {
    throw ConfigError("give hourly_counts inline or as a path, not both");
  }
  return c;
}

/// Effective configuration as a JSON document (paths absolute).
inline json to_json(const RunConfig& c) {
  json j{{"vehicle_model", to_json(c.model)},
         {"map_mode", std::string(to_string(c.map_mode()))},
         {"window_seconds", c.window_seconds},
         {"fleet_size", c.fleet_size},
         {"geo_coordinates", c.geo_coordinates},
         {"bins", {{"start_s", c.bins.start_s()}, {"bin_seconds", c.bins.bin_seconds()}, {"bin_count", c.bins.bin_count()}}},
         {"penetration", c.penetration},
         {"seed", c.seed},
         {"mean_learning_rate", c.mean_learning_rate},
         {"sample_period_s", c.sample_period_s}};
  if (c.region) j["region"] = to_json(*c.region);
  if (c.hourly_counts) j["hourly_counts"] = std::vector<double>(c.hourly_counts->begin(), c.hourly_counts->end());
  json paths = json::object();
  auto put = [&](const char* key, const std::filesystem::path& p) {
    if (!p.empty()) paths[key] = p.generic_string();
  };
  put("trace", c.paths.trace);
  put("aps", c.paths.aps);
  put("hourly_counts", c.paths.hourly_counts);
  put("baseline", c.paths.baseline);
  put("out", c.paths.out);
  if (!paths.empty()) j["paths"] = paths;
  return j;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path), path.parent_path());
}

}  // namespace avwork
