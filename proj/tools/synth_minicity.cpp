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

// synth_minicity: writes the bundled synthetic mini-city demo inputs.
//
// A 4 km x 3 km Manhattan street grid with a dense downtown in the south-west.
// Trip departures follow a two-peak diurnal profile; each vehicle makes one
// trip, driving x-then-y along streets at a fixed speed. Output is fully
// determined by --seed.
//
//   synth_minicity --out data/ [--seed 7] [--trips 600] [--sample-period 10]

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "avwork/csv.hpp"
#include "avwork/trace.hpp"

namespace {

constexpr double kWidth = 4000.0;
constexpr double kHeight = 3000.0;
constexpr double kBlock = 250.0;
constexpr double kSpeed = 10.0;  // m/s
constexpr avwork::Point kDowntown{1000.0, 900.0};

// Relative trip departures per hour of day.
constexpr std::array<double, 24> kDepartureShape = {2, 1, 1, 1, 2,  4,  8,  14, 18, 12, 9,  9,
                                                    10, 10, 10, 11, 14, 17, 15, 10, 7, 5, 4, 3};

// Relative accident counts per hour of day; smoother than departures with a
// late-afternoon maximum.
constexpr std::array<double, 24> kAccidentShape = {6,  4,  3,  3,  3,  5,  9,  16, 20, 16, 15, 16,
                                                   18, 19, 20, 23, 26, 27, 22, 16, 12, 10, 9,  7};

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double in(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

double snap(double v) { return std::round(v / kBlock) * kBlock; }

avwork::Point random_place(Uniform& u) {
  if (u() < 0.6) {
    // Downtown: within ~600 m of the centre.
    return {std::clamp(snap(kDowntown.x + u.in(-600, 600)), 0.0, kWidth),
            std::clamp(snap(kDowntown.y + u.in(-600, 600)), 0.0, kHeight)};
  }
  return {snap(u.in(0, kWidth)), snap(u.in(0, kHeight))};
}

std::size_t pick_hour(Uniform& u) {
  double total = 0.0;
  for (double w : kDepartureShape) total += w;
  double r = u() * total;
  for (std::size_t h = 0; h < 24; ++h) {
    r -= kDepartureShape[h];
    if (r < 0.0) return h;
  }
  return 23;
}

struct Row {
  double t;
  std::string id;
  double x, y;
  double speed;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic mini-city trace and companion inputs", "synth_minicity"};
  std::string out_dir = "data";
  std::uint64_t seed = 7;
  int trips = 600;
  double period = 10.0;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--trips", trips, "Number of trips (one vehicle each)");
  app.add_option("--sample-period", period, "Seconds between trace samples");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Uniform u(seed);

  std::vector<Row> rows;
  for (int k = 0; k < trips; ++k) {
    const std::string id = "veh" + std::to_string(k);
    const double depart = std::floor((static_cast<double>(pick_hour(u)) * 3600.0 + u.in(0, 3600)) / period) * period;
    const avwork::Point a = random_place(u);
    avwork::Point b = random_place(u);
    if (a == b) b.x = std::fmod(b.x + 2 * kBlock, kWidth);
    // Piecewise path a -> (b.x, a.y) -> b.
    const double leg1 = std::abs(b.x - a.x), leg2 = std::abs(b.y - a.y);
    const double length = leg1 + leg2;
    for (double s = 0.0;; s += kSpeed * period) {
      const double d = std::min(s, length);
      avwork::Point p;
      if (d <= leg1) {
        p = {a.x + std::copysign(d, b.x - a.x), a.y};
      } else {
        p = {b.x, a.y + std::copysign(d - leg1, b.y - a.y)};
      }
      const double t = depart + s / kSpeed;
      if (t >= 86400.0) break;
      rows.push_back({t, id, p.x, p.y, s < length ? kSpeed : 0.0});
      if (s >= length) break;
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& l, const Row& r) { return std::tie(l.t, l.id) < std::tie(r.t, r.id); });

  {
    std::ofstream out(fs::path(out_dir) / "minicity_trace.csv", std::ios::binary);
    out << "time_s,vehicle_id,x,y,speed_mps\n";
    for (const auto& r : rows) {
      out << avwork::format_double(r.t) << ',' << r.id << ',' << avwork::format_double(r.x) << ','
          << avwork::format_double(r.y) << ',' << avwork::format_double(r.speed) << '\n';
    }
  }
  {
    // Denser deployment downtown, sparse elsewhere.
    std::ofstream out(fs::path(out_dir) / "minicity_aps.csv", std::ios::binary);
    out << "ap_id,x,y\n"
        << "ap01,750,650\nap02,1250,650\nap03,750,1150\nap04,1250,1150\n"
        << "ap05,2500,500\nap06,3500,1500\nap07,2500,2500\nap08,500,2500\n";
  }
  {
    std::ofstream out(fs::path(out_dir) / "minicity_hourly_counts.csv", std::ios::binary);
    out << "hour,count\n";
    for (std::size_t h = 0; h < 24; ++h) out << h << ',' << avwork::format_double(kAccidentShape[h]) << '\n';
  }
  {
    // Synthetic IoT-like baseline at 5-minute resolution: diurnal sinusoid with
    // an evening peak plus noise.
    std::ofstream out(fs::path(out_dir) / "minicity_baseline.csv", std::ios::binary);
    out << "bin_start_s,mbps\n";
    for (int i = 0; i < 288; ++i) {
      const double t = i * 300.0;
      const double phase = 2.0 * 3.141592653589793 * (t / 86400.0 - 0.25);
      const double mbps = 60.0 + 35.0 * std::sin(phase - 0.6) + u.in(-4.0, 4.0);
      out << avwork::format_double(t) << ',' << avwork::format_double(std::round(mbps * 1000.0) / 1000.0) << '\n';
    }
  }
  std::cout << "wrote " << rows.size() << " samples for " << trips << " vehicles to " << out_dir << '\n';
  return 0;
}
