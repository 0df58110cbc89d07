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

#include "avwork/intensity.hpp"
#include "avwork/workload_model.hpp"

namespace avwork {

struct ComponentBytes {
  double telemetry = 0.0;
  double learning = 0.0;
  double map = 0.0;

  double total() const noexcept { return telemetry + learning + map; }

  ComponentBytes& operator+=(const ComponentBytes& o) noexcept {
    telemetry += o.telemetry;
    learning += o.learning;
    map += o.map;
    return *this;
  }
};

/// Expected bytes a vehicle offloads during one trace sample period starting
/// at t. Map updates always use the per-vehicle rate here: a fleet-coupled
/// rate has no meaning for a single sample.
class SampleAttributor {
 public:
  SampleAttributor(const VehicleModel& model, IntensityProfile profile, double window_seconds,
                   double sample_period_s)
      : profile_(std::move(profile)), sample_period_s_(sample_period_s) {
    if (!(sample_period_s > 0.0) || !std::isfinite(sample_period_s)) {
      throw ParameterError("sample_period_s must be finite and > 0");
    }
    telemetry_bps_ = telemetry_rate(model);
    learning_size_ = learning_artifact_size(model);
    map_bps_ = map_rate(model.with_map_mode(MapMode::PerVehicle), 1, window_seconds);
  }

  ComponentBytes at(double t) const {
    return {telemetry_bps_ * sample_period_s_, profile_.at(t) * learning_size_ * sample_period_s_,
            map_bps_ * sample_period_s_};
  }

  double sample_period_s() const noexcept { return sample_period_s_; }
  const IntensityProfile& profile() const noexcept { return profile_; }

 private:
  IntensityProfile profile_;
  double sample_period_s_;
  double telemetry_bps_ = 0.0;
  double learning_size_ = 0.0;
  double map_bps_ = 0.0;
};

}  // namespace avwork
