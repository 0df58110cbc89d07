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

// Piecewise-constant fleet-learning intensity, in events per vehicle per second.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "avwork/csv.hpp"
#include "avwork/error.hpp"

namespace avwork {

inline constexpr double kDefaultMeanLearningRate = 1e-4;
inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kSecondsPerDay = 86400.0;

class IntensityProfile {
 public:
  /// Intervals are half-open: [breakpoints[i], breakpoints[i+1]) has rates[i].
  IntensityProfile(std::vector<double> breakpoints, std::vector<double> rates, bool wraparound = false)
      : breakpoints_(std::move(breakpoints)), rates_(std::move(rates)), wraparound_(wraparound) {
    if (breakpoints_.size() < 2) throw ParameterError("intensity profile needs at least two breakpoints");
    if (rates_.size() + 1 != breakpoints_.size()) {
      throw ParameterError("intensity profile needs exactly one rate per interval");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i])) throw ParameterError("intensity breakpoints must be finite");
      if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
        throw ParameterError("intensity breakpoints must be strictly ascending");
      }
    }
    for (double r : rates_) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw ParameterError("intensity rates must be finite and >= 0");
    }
  }

  static IntensityProfile constant(double rate, double span_seconds = kSecondsPerDay) {
    return IntensityProfile({0.0, span_seconds}, {rate}, true);
  }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& rates() const noexcept { return rates_; }
  bool wraparound() const noexcept { return wraparound_; }
  double start() const noexcept { return breakpoints_.front(); }
  double span() const noexcept { return breakpoints_.back() - breakpoints_.front(); }

  double at(double t) const {
    if (!std::isfinite(t)) throw RangeError("intensity lookup at non-finite time");
    double u = t;
    if (u < start() || u >= breakpoints_.back()) {
      if (!wraparound_) {
        throw RangeError("time " + std::to_string(t) + " s is outside the intensity profile span");
      }
      u = start() + std::fmod(t - start(), span());
      if (u < start()) u += span();
      if (u >= breakpoints_.back()) u = start();  // fmod rounding at the top edge
    }
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
    return rates_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

  /// Integral of the rate over one span.
  double integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) sum += rates_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
    return sum;
  }

  double time_average() const { return integral() / span(); }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> rates_;
  bool wraparound_;
};

/// Diurnal profile from 24 hourly event counts: the counts fix the shape and
/// the profile is scaled so its time average equals mean_rate.
inline IntensityProfile build_profile(std::span<const double> hourly_counts, double mean_rate) {
  if (hourly_counts.size() != 24) {
    throw ParameterError("hourly counts must have 24 entries, got " + std::to_string(hourly_counts.size()));
  }
  if (!(mean_rate > 0.0) || !std::isfinite(mean_rate)) {
    throw ParameterError("mean learning rate must be finite and > 0");
  }
  double sum = 0.0;
  for (double c : hourly_counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("hourly counts must be finite and >= 0");
    sum += c;
  }
  if (sum <= 0.0) throw ParameterError("hourly counts are all zero; profile shape is undefined");
  const double mean_count = sum / 24.0;
  std::vector<double> breakpoints(25);
  std::vector<double> rates(24);
  for (std::size_t h = 0; h <= 24; ++h) breakpoints[h] = static_cast<double>(h) * kSecondsPerHour;
  for (std::size_t h = 0; h < 24; ++h) rates[h] = mean_rate * (hourly_counts[h] / mean_count);
  return IntensityProfile(std::move(breakpoints), std::move(rates), true);
}

/// Reads `hour,count` CSV with each hour 0..23 exactly once.
inline std::array<double, 24> read_hourly_counts_csv(std::istream& in, const std::string& source = "<hourly>") {
  std::array<double, 24> counts{};
  std::array<bool, 24> seen{};
  std::string line;
  std::vector<std::string> fields;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_ending(line);
    if (line_no == 1) {
      strip_bom(line);
      if (line != "hour,count") throw ParseError(source, 1, 1, "expected header 'hour,count'");
      continue;
    }
    if (line.empty()) continue;
    if (auto err = split_csv_row(line, fields); !err.empty()) throw ParseError(source, line_no, 1, err);
    if (fields.size() != 2) throw ParseError(source, line_no, 1, "expected 2 fields");
    const auto hour = parse_double(fields[0]);
    if (!hour || *hour < 0 || *hour > 23 || std::floor(*hour) != *hour) {
      throw ParseError(source, line_no, 1, "hour must be an integer in 0..23");
    }
    const auto count = parse_double(fields[1]);
    if (!count || *count < 0) throw ParseError(source, line_no, 2, "count must be a finite number >= 0");
    const auto h = static_cast<std::size_t>(*hour);
    if (seen[h]) throw ParseError(source, line_no, 1, "duplicate hour " + std::to_string(h));
    seen[h] = true;
    counts[h] = *count;
  }
  for (std::size_t h = 0; h < 24; ++h) {
    if (!seen[h]) throw ParseError(source, line_no, 1, "missing hour " + std::to_string(h));
  }
  return counts;
}

}  // namespace avwork
