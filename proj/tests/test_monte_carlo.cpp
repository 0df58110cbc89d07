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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "avwork/config.hpp"
#include "avwork/monte_carlo.hpp"

using namespace avwork;

namespace {

VehicleModel reference_without_map() {
  const auto m = reference_vehicle_model();
  return VehicleModel(m.sensors(), m.learning_segment_seconds(), MapPolicy{0.0, 50, 200.0});
}

}  // namespace

TEST(MonteCarlo, TelemetryOnlyIsExact) {
  const auto r = monte_carlo_workload(reference_without_map(), 1, 0.0, 10.0, 42);
  EXPECT_EQ(r.total_bytes, 643'600.0);
  EXPECT_EQ(r.telemetry_bytes, 643'600.0);
  EXPECT_EQ(r.learning_bytes, 0.0);
  EXPECT_EQ(r.map_bytes, 0.0);
}

TEST(MonteCarlo, EmptyFleet) {
  const auto r = monte_carlo_workload(reference_vehicle_model(), 0, 1e-4, 3600.0, 1);
  EXPECT_EQ(r.total_bytes, 0.0);
  EXPECT_EQ(r.learning_events, 0U);
}

TEST(MonteCarlo, RejectsBadParameters) {
  EXPECT_THROW(monte_carlo_workload(reference_vehicle_model(), 1, 1e-4, 0.0, 1), ParameterError);
  EXPECT_THROW(monte_carlo_workload(reference_vehicle_model(), 1, -1.0, 10.0, 1), ParameterError);
  EXPECT_THROW(monte_carlo_workload(reference_vehicle_model(), 1, 1e-4, 10.0, 1, {0.0, 1}), ParameterError);
}

TEST(MonteCarlo, DeterministicPerSeed) {
  const auto m = reference_vehicle_model();
  const auto a = monte_carlo_workload(m, 200, 1e-3, 3600.0, 99);
  const auto b = monte_carlo_workload(m, 200, 1e-3, 3600.0, 99);
  const auto c = monte_carlo_workload(m, 200, 1e-3, 3600.0, 100);
  EXPECT_EQ(a.total_bytes, b.total_bytes);
  EXPECT_EQ(a.learning_events, b.learning_events);
  EXPECT_NE(a.learning_events, c.learning_events);
}

TEST(MonteCarlo, ParallelMatchesSerialBitForBit) {
  const auto m = reference_vehicle_model(MapMode::FleetShared);
  const auto serial = monte_carlo_workload(m, 333, 5e-4, 7200.0, 5, {1800.0, 1});
  for (unsigned threads : {2U, 3U, 8U}) {
    const auto par = monte_carlo_workload(m, 333, 5e-4, 7200.0, 5, {1800.0, threads});
    EXPECT_EQ(serial.total_bytes, par.total_bytes);
    EXPECT_EQ(serial.learning_bytes, par.learning_bytes);
    EXPECT_EQ(serial.map_bytes, par.map_bytes);
    EXPECT_EQ(serial.map_artifacts, par.map_artifacts);
  }
}

TEST(MonteCarlo, PrefixOfFleetIsStable) {
  // Vehicle substreams do not depend on fleet size (PerVehicle mode).
  const auto m = reference_vehicle_model();
  const auto small = monte_carlo_workload(m, 1, 1e-2, 3600.0, 8);
  const auto large = monte_carlo_workload(m, 1, 1e-2, 3600.0, 8, {3600.0, 4});
  EXPECT_EQ(small.learning_events, large.learning_events);
}

// Mean over seeds within 3 standard errors of the analytic expectation, for
// each component separately and for both map readings.
TEST(MonteCarlo, MeanMatchesAnalyticExpectation) {
  for (auto mode : {MapMode::PerVehicle, MapMode::FleetShared}) {
    const auto m = reference_vehicle_model(mode);
    const std::uint64_t n = 50;
    const double horizon = 5400.0, window = 600.0, lambda = 2e-3;  // 9 windows, 10.8 events/veh
    const auto expect = fleet_rate(m, n, lambda, window);
    std::vector<double> learning, map;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const auto r = monte_carlo_workload(m, n, lambda, horizon, seed, {window, 1});
      EXPECT_EQ(r.telemetry_bytes, expect.telemetry_bps * horizon);
      learning.push_back(r.learning_bytes);
      map.push_back(r.map_bytes);
    }
    auto check = [](const std::vector<double>& xs, double target) {
      const double k = static_cast<double>(xs.size());
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double se = std::sqrt(ss / (k - 1.0) / k);
      EXPECT_LE(std::abs(mean - target), 3.0 * se) << "mean " << mean << " target " << target;
    };
    check(learning, expect.learning_bps * horizon);
    check(map, expect.map_bps * horizon);
  }
}

TEST(MonteCarlo, PartialWindowScalesProbability) {
  // Half a window with p = 1: each trial succeeds with probability 0.5.
  const VehicleModel m({}, 0.0, MapPolicy{1.0, 1, 1.0});
  const auto r = monte_carlo_workload(m, 20000, 0.0, 1800.0, 3, {3600.0, 1});
  const double expected = 10000.0, sd = std::sqrt(20000 * 0.25);
  EXPECT_NEAR(static_cast<double>(r.map_artifacts), expected, 4 * sd);
}

TEST(Samplers, BernoulliSuccessesEdgeCases) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(detail::bernoulli_successes(rng, 0, 0.5), 0U);
  EXPECT_EQ(detail::bernoulli_successes(rng, 100, 0.0), 0U);
  EXPECT_EQ(detail::bernoulli_successes(rng, 100, 1.0), 100U);
  const auto k = detail::bernoulli_successes(rng, 1'000'000, 0.3);
  EXPECT_NEAR(static_cast<double>(k), 300000.0, 4 * std::sqrt(1e6 * 0.21));
}

TEST(Samplers, PoissonArrivalsMeanAndVariance) {
  std::mt19937_64 rng(2);
  const int reps = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double k = static_cast<double>(detail::poisson_arrivals(rng, 0.5, 8.0));
    sum += k;
    sq += k * k;
  }
  const double mean = sum / reps, var = sq / reps - mean * mean;
  EXPECT_NEAR(mean, 4.0, 4 * std::sqrt(4.0 / reps));
  EXPECT_NEAR(var, 4.0, 0.25);
  EXPECT_EQ(detail::poisson_arrivals(rng, 0.0, 8.0), 0U);
}
