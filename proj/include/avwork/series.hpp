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

// Regional workload time series, Mbps conversion and baseline comparison.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avwork/attribution.hpp"
#include "avwork/csv.hpp"
#include "avwork/error.hpp"
#include "avwork/trace.hpp"

namespace avwork {

/// Time-binned expected offload bytes, per component.
struct WorkloadSeries {
  std::string label;
  BinGrid bins;
  std::vector<double> telemetry;
  std::vector<double> learning;
  std::vector<double> map;

  WorkloadSeries() = default;
  WorkloadSeries(std::string label_, BinGrid bins_)
      : label(std::move(label_)),
        bins(bins_),
        telemetry(bins_.bin_count(), 0.0),
        learning(bins_.bin_count(), 0.0),
        map(bins_.bin_count(), 0.0) {}

  double total(std::size_t i) const { return telemetry[i] + learning[i] + map[i]; }

  double grand_total() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < bins.bin_count(); ++i) sum += total(i);
    return sum;
  }
};

struct SeriesResult {
  WorkloadSeries series;
  double stream_total_bytes = 0.0;  // running per-sample counter, independent of binning
  std::uint64_t samples_in_grid = 0;
  std::uint64_t overflow_samples = 0;
};

inline SeriesResult accumulate_series(SampleSource& samples, const SampleAttributor& attributor,
                                      const BinGrid& bins, std::string label = {}) {
  SeriesResult out{WorkloadSeries(std::move(label), bins)};
  while (auto s = samples.next()) {
    const auto bin = bins.index_of(s->time_s);
    if (!bin) {
      ++out.overflow_samples;
      continue;
    }
    const ComponentBytes b = attributor.at(s->time_s);
    out.series.telemetry[*bin] += b.telemetry;
    out.series.learning[*bin] += b.learning;
    out.series.map[*bin] += b.map;
    out.stream_total_bytes += b.total();
    ++out.samples_in_grid;
  }
  return out;
}

struct RateSeries {
  std::string label;
  BinGrid bins;
  std::vector<double> mbps;
};

inline RateSeries to_mbps(const WorkloadSeries& series) {
  RateSeries out{series.label, series.bins, {}};
  out.mbps.reserve(series.bins.bin_count());
  for (std::size_t i = 0; i < series.bins.bin_count(); ++i) {
    out.mbps.push_back(series.total(i) * 8.0 / (series.bins.bin_seconds() * 1e6));
  }
  return out;
}

/// Reads `bin_start_s,mbps`. Bins must be uniform; their width is taken from
/// the first two rows unless given.
inline RateSeries read_baseline_csv(std::istream& in, const std::string& source = "<baseline>",
                                    std::optional<double> bin_seconds = std::nullopt) {
  std::vector<double> starts, values;
  std::vector<std::string> fields;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_ending(line);
    if (line_no == 1) {
      strip_bom(line);
      if (line != "bin_start_s,mbps") throw ParseError(source, 1, 1, "expected header 'bin_start_s,mbps'");
      continue;
    }
    if (line.empty()) continue;
    if (auto err = split_csv_row(line, fields); !err.empty()) throw ParseError(source, line_no, 1, err);
    if (fields.size() != 2) throw ParseError(source, line_no, 1, "expected 2 fields");
    const auto t = parse_double(fields[0]);
    if (!t) throw ParseError(source, line_no, 1, "bin_start_s is not a finite number");
    const auto v = parse_double(fields[1]);
    if (!v || *v < 0) throw ParseError(source, line_no, 2, "mbps must be a finite number >= 0");
    starts.push_back(*t);
    values.push_back(*v);
  }
  if (starts.empty()) throw ParseError(source, line_no, 1, "baseline series has no rows");
  double width = 0.0;
  if (bin_seconds) {
    width = *bin_seconds;
  } else {
    if (starts.size() < 2) throw ParseError(source, line_no, 1, "cannot infer bin width from a single row");
    width = starts[1] - starts[0];
  }
  if (!(width > 0.0)) throw ParseError(source, 3, 1, "baseline bin starts must be strictly increasing");
  for (std::size_t i = 1; i < starts.size(); ++i) {
    const double expected = starts[0] + static_cast<double>(i) * width;
    if (std::abs(starts[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw ParseError(source, i + 2, 1, "baseline bins are not uniform");
    }
  }
  return RateSeries{"baseline", BinGrid(starts[0], width, starts.size()), std::move(values)};
}

namespace detail {

// Time-weighted mean of `s` over [a, b); nullopt if `s` has no coverage there.
inline std::optional<double> mean_over(const RateSeries& s, double a, double b) {
  const auto& g = s.bins;
  double weight = 0.0, acc = 0.0;
  const double first = std::max(0.0, std::floor((a - g.start_s()) / g.bin_seconds()) - 1.0);
  for (auto k = static_cast<std::size_t>(first); k < g.bin_count(); ++k) {
    const double lo = g.bin_start(k), hi = lo + g.bin_seconds();
    if (lo >= b) break;
    const double overlap = std::min(hi, b) - std::max(lo, a);
    if (overlap > 0.0) {
      weight += overlap;
      acc += overlap * s.mbps[k];
    }
  }
  if (weight <= 0.0) return std::nullopt;
  return acc / weight;
}

}  // namespace detail

/// Block-averages both series onto the coarser of the two grids, restricted to
/// their common time span. Each target value is the time-weighted mean of the
/// source bins overlapping it, which preserves traffic volume.
inline std::pair<RateSeries, RateSeries> resample_common(const RateSeries& a, const RateSeries& b) {
  const double lo = std::max(a.bins.start_s(), b.bins.start_s());
  const double hi = std::min(a.bins.end_s(), b.bins.end_s());
  if (!(hi > lo)) throw RangeError("series '" + a.label + "' and '" + b.label + "' do not overlap in time");
  const BinGrid& coarse = a.bins.bin_seconds() >= b.bins.bin_seconds() ? a.bins : b.bins;
  // Coarse bins that intersect [lo, hi).
  std::size_t first = 0;
  while (first < coarse.bin_count() && coarse.bin_start(first) + coarse.bin_seconds() <= lo) ++first;
  std::size_t last = first;
  while (last < coarse.bin_count() && coarse.bin_start(last) < hi) ++last;
  if (last == first) throw RangeError("series do not overlap on a common bin");
  const BinGrid target(coarse.bin_start(first), coarse.bin_seconds(), last - first);

  RateSeries ra{a.label, target, {}}, rb{b.label, target, {}};
  for (std::size_t i = 0; i < target.bin_count(); ++i) {
    const double s = std::max(lo, target.bin_start(i));
    const double e = std::min(hi, target.bin_start(i) + target.bin_seconds());
    ra.mbps.push_back(detail::mean_over(a, s, e).value_or(0.0));
    rb.mbps.push_back(detail::mean_over(b, s, e).value_or(0.0));
  }
  return {std::move(ra), std::move(rb)};
}

/// Pearson correlation; NaN when either side has zero variance or fewer than two points.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

inline int hour_of_day(double t) {
  double u = std::fmod(t, 86400.0);
  if (u < 0) u += 86400.0;
  return static_cast<int>(std::floor(u / 3600.0));
}

struct ComparisonReport {
  RateSeries av;        // resampled onto the common grid
  RateSeries baseline;  // same grid
  double peak_ratio = 0.0;
  double mean_ratio = 0.0;
  double correlation = 0.0;
  double av_peak_bin_start_s = 0.0;
  double baseline_peak_bin_start_s = 0.0;
  double av_trough_bin_start_s = 0.0;
  double baseline_trough_bin_start_s = 0.0;
  int av_peak_hour = 0;
  int baseline_peak_hour = 0;
  std::vector<std::string> notes;
};

inline ComparisonReport compare_baseline(const RateSeries& av, const RateSeries& baseline) {
  auto [ra, rb] = resample_common(av, baseline);
  ComparisonReport rep;
  rep.av = std::move(ra);
  rep.baseline = std::move(rb);
  const auto& a = rep.av.mbps;
  const auto& b = rep.baseline.mbps;
  const auto& g = rep.av.bins;
  const auto nan = std::numeric_limits<double>::quiet_NaN();

  const auto a_max = std::max_element(a.begin(), a.end()), b_max = std::max_element(b.begin(), b.end());
  const auto a_min = std::min_element(a.begin(), a.end()), b_min = std::min_element(b.begin(), b.end());
  rep.av_peak_bin_start_s = g.bin_start(static_cast<std::size_t>(a_max - a.begin()));
  rep.baseline_peak_bin_start_s = g.bin_start(static_cast<std::size_t>(b_max - b.begin()));
  rep.av_trough_bin_start_s = g.bin_start(static_cast<std::size_t>(a_min - a.begin()));
  rep.baseline_trough_bin_start_s = g.bin_start(static_cast<std::size_t>(b_min - b.begin()));
  rep.av_peak_hour = hour_of_day(rep.av_peak_bin_start_s);
  rep.baseline_peak_hour = hour_of_day(rep.baseline_peak_bin_start_s);

  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
  rep.peak_ratio = *b_max > 0.0 ? *a_max / *b_max : nan;
  rep.mean_ratio = mean_b > 0.0 ? mean_a / mean_b : nan;
  if (*b_max <= 0.0) rep.notes.push_back("baseline is all zero; ratios undefined");

  rep.correlation = pearson(a, b);
  if (std::isnan(rep.correlation)) {
    rep.notes.push_back(a.size() < 2 ? "fewer than two common bins; correlation undefined"
                                     : "a series has zero variance; correlation undefined");
  }
  return rep;
}

}  // namespace avwork
