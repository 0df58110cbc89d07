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

// Analytic per-vehicle and fleet offloading model.
//
// Three offloaded data categories are modelled for each vehicle:
//   telemetry  continuous, a fixed fraction of each sensor's raw stream
//   learning   event-driven segments of length T_L, selected and compressed
//   map        compact feature sets uploaded with probability p_M per window
//
// Units: bytes, seconds, bytes per second. The learning intensity is in events
// per vehicle per second; p_M is a probability per observation window.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "avwork/error.hpp"

namespace avwork {

inline constexpr double kDefaultWindowSeconds = 3600.0;

struct SensorSpec {
  std::string modality;
  std::uint64_t count = 0;           // sensors of this type per vehicle
  double frequency_hz = 0.0;         // measurements per second per sensor
  double sample_bytes = 0.0;         // encoded bytes per measurement
  double telemetry_fraction = 0.0;   // share of the raw stream sent as telemetry
  double learning_fraction = 0.0;    // share selected during a learning event
  double learning_compression = 0.0; // size factor applied before upload

  void validate() const {
    auto unit = [&](double v, std::string_view name) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ParameterError("sensor '" + modality + "': " + std::string(name) +
                             " must be in [0,1], got " + std::to_string(v));
      }
    };
    auto nonneg = [&](double v, std::string_view name) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ParameterError("sensor '" + modality + "': " + std::string(name) +
                             " must be finite and >= 0, got " + std::to_string(v));
      }
    };
    if (modality.empty()) throw ParameterError("sensor modality label must not be empty");
    nonneg(frequency_hz, "frequency_hz");
    nonneg(sample_bytes, "sample_bytes");
    unit(telemetry_fraction, "telemetry_fraction");
    unit(learning_fraction, "learning_fraction");
    unit(learning_compression, "learning_compression");
  }
};

/// How the fleet factor in the map-update rate is read.
///   FleetShared: R_M = N p_M S_M / window  (fleet total then scales as N^2)
///   PerVehicle:    R_M = p_M S_M / window    (fleet total scales as N)
enum class MapMode { FleetShared, PerVehicle };

inline std::string_view to_string(MapMode m) {
  return m == MapMode::FleetShared ? "fleet-shared" : "per-vehicle";
}

inline MapMode parse_map_mode(std::string_view s) {
  if (s == "fleet-shared" || s == "FleetShared") return MapMode::FleetShared;
  if (s == "per-vehicle" || s == "PerVehicle") return MapMode::PerVehicle;
  throw ConfigError("unknown map mode '" + std::string(s) + "' (expected fleet-shared|per-vehicle)");
}

struct MapPolicy {
  double artifact_probability = 0.0;     // p_M, per observation window
  std::uint64_t features_per_artifact = 0;
  double bytes_per_feature = 0.0;
  MapMode mode = MapMode::PerVehicle;

  void validate() const {
    if (!(artifact_probability >= 0.0 && artifact_probability <= 1.0)) {
      throw ParameterError("map artifact_probability must be in [0,1], got " +
                           std::to_string(artifact_probability));
    }
    if (!(bytes_per_feature >= 0.0) || !std::isfinite(bytes_per_feature)) {
      throw ParameterError("map bytes_per_feature must be finite and >= 0");
    }
  }
};

/// Validated per-vehicle parameterization. Sensors are held sorted by modality
/// label so every sum over sensors has a fixed order.
class VehicleModel {
 public:
  VehicleModel() = default;

  VehicleModel(std::vector<SensorSpec> sensors, double learning_segment_seconds, MapPolicy map_policy)
      : sensors_(std::move(sensors)),
        learning_segment_seconds_(learning_segment_seconds),
        map_policy_(map_policy) {
    if (!(learning_segment_seconds_ >= 0.0) || !std::isfinite(learning_segment_seconds_)) {
      throw ParameterError("learning_segment_seconds must be finite and >= 0");
    }
    map_policy_.validate();
    for (const auto& s : sensors_) s.validate();
    std::sort(sensors_.begin(), sensors_.end(),
              [](const SensorSpec& a, const SensorSpec& b) { return a.modality < b.modality; });
    auto dup = std::adjacent_find(sensors_.begin(), sensors_.end(),
                                  [](const SensorSpec& a, const SensorSpec& b) {
                                    return a.modality == b.modality;
                                  });
    if (dup != sensors_.end()) {
      throw ParameterError("duplicate sensor modality '" + dup->modality + "'");
    }
  }

  const std::vector<SensorSpec>& sensors() const noexcept { return sensors_; }
  double learning_segment_seconds() const noexcept { return learning_segment_seconds_; }
  const MapPolicy& map_policy() const noexcept { return map_policy_; }
  MapMode map_mode() const noexcept { return map_policy_.mode; }

  VehicleModel with_map_mode(MapMode mode) const {
    VehicleModel copy = *this;
    copy.map_policy_.mode = mode;
    return copy;
  }

 private:
  std::vector<SensorSpec> sensors_;
  double learning_segment_seconds_ = 0.0;
  MapPolicy map_policy_;
};

struct WorkloadRates {
  double telemetry_bps = 0.0;
  double learning_bps = 0.0;
  double map_bps = 0.0;
  double total_bps = 0.0;
};

inline double raw_rate(const SensorSpec& spec) {
  return static_cast<double>(spec.count) * spec.frequency_hz * spec.sample_bytes;
}

inline double vehicle_raw_rate(const VehicleModel& model) {
  double sum = 0.0;
  for (const auto& s : model.sensors()) sum += raw_rate(s);
  return sum;
}

inline double telemetry_rate(const VehicleModel& model) {
  double sum = 0.0;
  for (const auto& s : model.sensors()) sum += s.telemetry_fraction * raw_rate(s);
  return sum;
}

/// Expected bytes in one fleet-learning upload.
inline double learning_artifact_size(const VehicleModel& model) {
  double sum = 0.0;
  for (const auto& s : model.sensors()) {
    sum += s.learning_compression * s.learning_fraction * raw_rate(s);
  }
  return model.learning_segment_seconds() * sum;
}

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("learning event rate must be finite and >= 0, got " + std::to_string(lambda));
  }
}

inline void check_window(double window_seconds) {
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) {
    throw ParameterError("window_seconds must be finite and > 0, got " + std::to_string(window_seconds));
  }
}

inline double learning_rate(const VehicleModel& model, double lambda_events_per_vehicle_second) {
  check_lambda(lambda_events_per_vehicle_second);
  return lambda_events_per_vehicle_second * learning_artifact_size(model);
}

inline double map_artifact_size(const VehicleModel& model) {
  return static_cast<double>(model.map_policy().features_per_artifact) *
         model.map_policy().bytes_per_feature;
}

/// Map-update rate under the model's map mode. fleet_size only matters for
/// FleetShared.
inline double map_rate(const VehicleModel& model, std::uint64_t fleet_size, double window_seconds) {
  check_window(window_seconds);
  const double per_window = model.map_policy().artifact_probability * map_artifact_size(model);
  if (model.map_mode() == MapMode::FleetShared) {
    return static_cast<double>(fleet_size) * per_window / window_seconds;
  }
  return per_window / window_seconds;
}

inline WorkloadRates vehicle_rate(const VehicleModel& model, double lambda, std::uint64_t fleet_size,
                                  double window_seconds) {
  WorkloadRates r;
  r.telemetry_bps = telemetry_rate(model);
  r.learning_bps = learning_rate(model, lambda);
  r.map_bps = map_rate(model, fleet_size, window_seconds);
  r.total_bps = r.telemetry_bps + r.learning_bps + r.map_bps;
  return r;
}

/// Fleet aggregate: fleet_size times the per-vehicle rates, componentwise.
inline WorkloadRates fleet_rate(const VehicleModel& model, std::uint64_t fleet_size, double lambda,
                                double window_seconds) {
  const WorkloadRates v = vehicle_rate(model, lambda, fleet_size, window_seconds);
  const double n = static_cast<double>(fleet_size);
  WorkloadRates r;
  r.telemetry_bps = n * v.telemetry_bps;
  r.learning_bps = n * v.learning_bps;
  r.map_bps = n * v.map_bps;
  r.total_bps = r.telemetry_bps + r.learning_bps + r.map_bps;
  return r;
}

inline constexpr double bytes_per_second_to_mbps(double bps) { return bps * 8.0 / 1e6; }

}  // namespace avwork
