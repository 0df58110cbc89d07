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

// Event-level simulation of the offloading processes, used to cross-check the
// analytic expectations in workload_model.hpp.
//
// Every vehicle draws from its own substreams keyed by (seed, vehicle index,
// component), so results do not depend on how vehicles are split over threads.
// Per-vehicle tallies are reduced in vehicle order; serial and parallel runs are
// bit-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "avwork/hash.hpp"
#include "avwork/workload_model.hpp"

namespace avwork {

struct MonteCarloOptions {
  double window_seconds = kDefaultWindowSeconds;
  unsigned threads = 1;
};

struct MonteCarloResult {
  double telemetry_bytes = 0.0;
  double learning_bytes = 0.0;
  double map_bytes = 0.0;
  double total_bytes = 0.0;
  std::uint64_t learning_events = 0;
  std::uint64_t map_artifacts = 0;
};

namespace detail {

enum class Substream : std::uint64_t { Learning = 1, Map = 2 };

// Uniform on (0, 1]; never returns 0 so log() is always finite.
inline double open_unit(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

// Arrivals of a homogeneous Poisson process on [0, horizon) by inversion of
// exponential inter-arrival times.
inline std::uint64_t poisson_arrivals(std::mt19937_64& rng, double rate, double horizon) {
  if (rate <= 0.0) return 0;
  std::uint64_t n = 0;
  double t = -std::log(open_unit(rng)) / rate;
  while (t < horizon) {
    ++n;
    t += -std::log(open_unit(rng)) / rate;
  }
  return n;
}

// Successes among `trials` Bernoulli(p) trials, by geometric skipping between
// successes. Expected cost O(trials * p).
inline std::uint64_t bernoulli_successes(std::mt19937_64& rng, std::uint64_t trials, double p) {
  if (trials == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return trials;
  const double log_q = std::log1p(-p);
  std::uint64_t successes = 0;
  double position = 0.0;  // index of the next candidate trial
  for (;;) {
    // Number of failures before the next success.
    position += std::floor(std::log(open_unit(rng)) / log_q);
    if (position >= static_cast<double>(trials)) break;
    ++successes;
    position += 1.0;
  }
  return successes;
}

struct VehicleTally {
  std::uint64_t learning_events = 0;
  std::uint64_t map_artifacts = 0;
};

}  // namespace detail

/// Simulates fleet_size vehicles over [0, horizon_seconds):
///  - telemetry accrues deterministically at telemetry_rate;
///  - learning events arrive as a Poisson process of rate lambda per vehicle,
///    each adding learning_artifact_size bytes;
///  - each full map window holds Bernoulli(p_M) artifact trials (fleet_size
///    trials per vehicle under FleetShared, one under PerVehicle); a trailing
///    partial window of fraction r uses success probability r * p_M.
inline MonteCarloResult monte_carlo_workload(const VehicleModel& model, std::uint64_t fleet_size,
                                             double lambda, double horizon_seconds, std::uint64_t seed,
                                             const MonteCarloOptions& options = {}) {
  check_lambda(lambda);
  check_window(options.window_seconds);
  if (!(horizon_seconds > 0.0) || !std::isfinite(horizon_seconds)) {
    throw ParameterError("horizon_seconds must be finite and > 0");
  }

  const double p = model.map_policy().artifact_probability;
  const std::uint64_t trials_per_window =
      model.map_mode() == MapMode::FleetShared ? fleet_size : 1;
  const double windows = horizon_seconds / options.window_seconds;
  const auto full_windows = static_cast<std::uint64_t>(std::floor(windows));
  const double partial = windows - static_cast<double>(full_windows);

  std::vector<detail::VehicleTally> tallies(fleet_size);
  auto simulate = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t v = begin; v < end; ++v) {
      std::mt19937_64 learning_rng(
          derive_seed(seed, v, static_cast<std::uint64_t>(detail::Substream::Learning)));
      std::mt19937_64 map_rng(derive_seed(seed, v, static_cast<std::uint64_t>(detail::Substream::Map)));
      auto& t = tallies[v];
      t.learning_events = detail::poisson_arrivals(learning_rng, lambda, horizon_seconds);
      t.map_artifacts = detail::bernoulli_successes(map_rng, full_windows * trials_per_window, p);
      if (partial > 0.0) {
        t.map_artifacts += detail::bernoulli_successes(map_rng, trials_per_window, partial * p);
      }
    }
  };

  const unsigned threads = std::max(1U, options.threads);
  if (threads == 1 || fleet_size < 2) {
    simulate(0, fleet_size);
  } else {
    std::vector<std::jthread> workers;
    const std::uint64_t chunk = (fleet_size + threads - 1) / threads;
    for (std::uint64_t begin = 0; begin < fleet_size; begin += chunk) {
      workers.emplace_back(simulate, begin, std::min(fleet_size, begin + chunk));
    }
  }

  const double telemetry_per_vehicle = telemetry_rate(model) * horizon_seconds;
  const double s_learning = learning_artifact_size(model);
  const double s_map = map_artifact_size(model);

  MonteCarloResult out;
  for (const auto& t : tallies) {
    out.telemetry_bytes += telemetry_per_vehicle;
    out.learning_bytes += static_cast<double>(t.learning_events) * s_learning;
    out.map_bytes += static_cast<double>(t.map_artifacts) * s_map;
    out.learning_events += t.learning_events;
    out.map_artifacts += t.map_artifacts;
  }
  out.total_bytes = out.telemetry_bytes + out.learning_bytes + out.map_bytes;
  return out;
}

}  // namespace avwork
