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

// Nearest access point assignment and per-AP, per-bin workload tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "avwork/attribution.hpp"
#include "avwork/error.hpp"
#include "avwork/trace.hpp"

namespace avwork {

struct AccessPoint {
  std::string ap_id;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const AccessPoint&, const AccessPoint&) = default;
};

/// Validated AP list held in ap_id order. Indices into it are stable and
/// independent of input order.
class ApSet {
 public:
  ApSet() = default;

  explicit ApSet(std::vector<AccessPoint> aps) : aps_(std::move(aps)) {
    if (aps_.empty()) throw ConfigError("access point list is empty");
    for (const auto& ap : aps_) {
      if (ap.ap_id.empty()) throw ConfigError("access point with empty ap_id");
      if (!std::isfinite(ap.x) || !std::isfinite(ap.y)) {
        throw ConfigError("access point '" + ap.ap_id + "' has non-finite coordinates");
      }
    }
    std::sort(aps_.begin(), aps_.end(), [](const auto& a, const auto& b) { return a.ap_id < b.ap_id; });
    for (std::size_t i = 1; i < aps_.size(); ++i) {
      if (aps_[i].ap_id == aps_[i - 1].ap_id) throw ConfigError("duplicate ap_id '" + aps_[i].ap_id + "'");
    }
  }

  std::size_t size() const noexcept { return aps_.size(); }
  const AccessPoint& operator[](std::size_t i) const { return aps_[i]; }
  std::span<const AccessPoint> aps() const noexcept { return aps_; }

  /// Brute force reference: minimum squared distance, ties to the smallest ap_id
  /// (the lowest index, since the set is sorted by id).
  std::size_t nearest(double x, double y) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < aps_.size(); ++i) {
      const double dx = aps_[i].x - x, dy = aps_[i].y - y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

 private:
  std::vector<AccessPoint> aps_;
};

inline std::string assign_nearest_ap(const TraceSample& sample, std::span<const AccessPoint> aps) {
  if (aps.empty()) throw ConfigError("access point list is empty");
  const AccessPoint* best = nullptr;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& ap : aps) {
    const double dx = ap.x - sample.x, dy = ap.y - sample.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best_d2 || (d2 == best_d2 && best && ap.ap_id < best->ap_id)) {
      best_d2 = d2;
      best = &ap;
    }
  }
  return best->ap_id;
}

/// Uniform-grid index over an ApSet. Returns the same AP as ApSet::nearest for
/// every query; points far outside the AP bounding box fall back to brute force.
class GridApIndex {
 public:
  explicit GridApIndex(const ApSet& aps, std::size_t target_per_cell = 2) : aps_(&aps) {
    double x_min = aps[0].x, x_max = aps[0].x, y_min = aps[0].y, y_max = aps[0].y;
    for (const auto& ap : aps.aps()) {
      x_min = std::min(x_min, ap.x);
      x_max = std::max(x_max, ap.x);
      y_min = std::min(y_min, ap.y);
      y_max = std::max(y_max, ap.y);
    }
    const double w = std::max(x_max - x_min, 1e-9), h = std::max(y_max - y_min, 1e-9);
    const double cells = std::max(1.0, static_cast<double>(aps.size()) / static_cast<double>(target_per_cell));
    // The second bound keeps degenerate (collinear) layouts at <= cells + 1 cells per axis.
    cell_ = std::max(std::sqrt(w * h / cells), std::max(w, h) / cells);
    if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = std::max(w, h);
    x0_ = x_min;
    y0_ = y_min;
    nx_ = static_cast<std::int64_t>(std::floor(w / cell_)) + 1;
    ny_ = static_cast<std::int64_t>(std::floor(h / cell_)) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t i = 0; i < aps.size(); ++i) {
      buckets_[static_cast<std::size_t>(cell_y(aps[i].y) * nx_ + cell_x(aps[i].x))].push_back(i);
    }
  }

  std::size_t nearest(double x, double y) const {
    const double margin = 2.0 * cell_;
    if (x < x0_ - margin || y < y0_ - margin || x > x0_ + static_cast<double>(nx_) * cell_ + margin ||
        y > y0_ + static_cast<double>(ny_) * cell_ + margin) {
      return aps_->nearest(x, y);
    }
    const auto qx = static_cast<std::int64_t>(std::floor((x - x0_) / cell_));
    const auto qy = static_cast<std::int64_t>(std::floor((y - y0_) / cell_));
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    const std::int64_t max_ring = std::max(nx_, ny_) + 4;
    for (std::int64_t r = 0; r <= max_ring; ++r) {
      // Every cell on ring r is at least (r - 1) cells away from the query.
      if (best != std::numeric_limits<std::size_t>::max()) {
        const double lb = static_cast<double>(r - 1) * cell_;
        if (lb > 0.0 && lb * lb * (1.0 - 1e-12) > best_d2) break;
      }
      for (std::int64_t cy = qy - r; cy <= qy + r; ++cy) {
        if (cy < 0 || cy >= ny_) continue;
        const bool edge_row = cy == qy - r || cy == qy + r;
        for (std::int64_t cx = qx - r; cx <= qx + r; cx += (edge_row || r == 0) ? 1 : 2 * r) {
          if (cx < 0 || cx >= nx_) continue;
          for (std::size_t i : buckets_[static_cast<std::size_t>(cy * nx_ + cx)]) {
            const auto& ap = (*aps_)[i];
            const double dx = ap.x - x, dy = ap.y - y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
              best_d2 = d2;
              best = i;
            }
          }
        }
      }
    }
    return best;
  }

 private:
  std::int64_t cell_x(double x) const {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((x - x0_) / cell_)), 0, nx_ - 1);
  }
  std::int64_t cell_y(double y) const {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((y - y0_) / cell_)), 0, ny_ - 1);
  }

  const ApSet* aps_;
  double x0_ = 0.0, y0_ = 0.0, cell_ = 1.0;
  std::int64_t nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> buckets_;
};

/// bytes[ap][bin] split into components; flat row-major storage.
class ApWorkloadTable {
 public:
  ApWorkloadTable() = default;
  ApWorkloadTable(ApSet aps, BinGrid bins)
      : aps_(std::move(aps)), bins_(bins), cells_(aps_.size() * bins_.bin_count()) {}

  const ApSet& aps() const noexcept { return aps_; }
  const BinGrid& bins() const noexcept { return bins_; }

  const ComponentBytes& at(std::size_t ap, std::size_t bin) const { return cells_[ap * bins_.bin_count() + bin]; }
  void add(std::size_t ap, std::size_t bin, const ComponentBytes& b) { cells_[ap * bins_.bin_count() + bin] += b; }

  std::uint64_t overflow_samples = 0;
  std::uint64_t assigned_samples = 0;

  ComponentBytes bin_total(std::size_t bin) const {
    ComponentBytes sum;
    for (std::size_t ap = 0; ap < aps_.size(); ++ap) sum += at(ap, bin);
    return sum;
  }

  double ap_total(std::size_t ap) const {
    double sum = 0.0;
    for (std::size_t bin = 0; bin < bins_.bin_count(); ++bin) sum += at(ap, bin).total();
    return sum;
  }

  /// Elementwise sum; both tables must share APs and bins.
  void merge(const ApWorkloadTable& other) {
    if (!(other.bins_ == bins_) || other.aps_.size() != aps_.size()) {
      throw InvariantError("cannot merge AP tables of different shape");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
    overflow_samples += other.overflow_samples;
    assigned_samples += other.assigned_samples;
  }

 private:
  ApSet aps_;
  BinGrid bins_;
  std::vector<ComponentBytes> cells_;
};

enum class NearestSearch { BruteForce, Grid };

namespace detail {

template <typename Next>
void fill_ap_table(ApWorkloadTable& table, const SampleAttributor& attributor, NearestSearch search,
                   Next&& next) {
  std::optional<GridApIndex> grid;
  if (search == NearestSearch::Grid) grid.emplace(table.aps());
  while (const TraceSample* s = next()) {
    const auto bin = table.bins().index_of(s->time_s);
    if (!bin) {
      ++table.overflow_samples;
      continue;
    }
    const std::size_t ap = grid ? grid->nearest(s->x, s->y) : table.aps().nearest(s->x, s->y);
    table.add(ap, *bin, attributor.at(s->time_s));
    ++table.assigned_samples;
  }
}

}  // namespace detail

/// Streams samples into a per-AP table using expected-value attribution.
inline ApWorkloadTable accumulate_ap_workload(SampleSource& samples, const ApSet& aps,
                                              const SampleAttributor& attributor, const BinGrid& bins,
                                              NearestSearch search = NearestSearch::Grid) {
  ApWorkloadTable table(aps, bins);
  std::optional<TraceSample> current;
  detail::fill_ap_table(table, attributor, search, [&]() -> const TraceSample* {
    current = samples.next();
    return current ? &*current : nullptr;
  });
  return table;
}

inline ApWorkloadTable accumulate_ap_workload(SampleSource& samples, const ApSet& aps,
                                              const VehicleModel& model, const IntensityProfile& profile,
                                              const BinGrid& bins, double sample_period_s,
                                              double window_seconds = kDefaultWindowSeconds) {
  return accumulate_ap_workload(samples, aps, SampleAttributor(model, profile, window_seconds, sample_period_s),
                                bins);
}

/// Chunk-parallel accumulation over an in-memory sample range; per-chunk
/// tables are merged in chunk order.
inline ApWorkloadTable accumulate_ap_workload_parallel(std::span<const TraceSample> samples, const ApSet& aps,
                                                       const SampleAttributor& attributor, const BinGrid& bins,
                                                       unsigned threads) {
  threads = std::max(1U, threads);
  const std::size_t chunk = (samples.size() + threads - 1) / std::max<std::size_t>(threads, 1);
  std::vector<ApWorkloadTable> parts;
  for (std::size_t begin = 0; begin < samples.size(); begin += std::max<std::size_t>(chunk, 1)) {
    parts.emplace_back(aps, bins);
  }
  {
    std::vector<std::jthread> workers;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      workers.emplace_back([&, k] {
        const std::size_t begin = k * chunk, end = std::min(samples.size(), begin + chunk);
        std::size_t i = begin;
        detail::fill_ap_table(parts[k], attributor, NearestSearch::Grid,
                              [&]() -> const TraceSample* { return i < end ? &samples[i++] : nullptr; });
      });
    }
  }
  ApWorkloadTable table(aps, bins);
  for (const auto& p : parts) table.merge(p);
  return table;
}

/// Gini coefficient by mean absolute difference: sum_i sum_j |x_i - x_j| / (2 n^2 mean).
/// Zero for an empty or all-zero load vector.
inline double gini(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (sum <= 0.0) return 0.0;
  // For sorted values sum_i sum_j |x_i - x_j| = 2 sum_i (2i - n + 1) x_i (0-based i).
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weighted += (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) * v[i];
  }
  return weighted / (static_cast<double>(n) * sum);
}

struct HotspotSummary {
  struct Entry {
    std::string ap_id;
    double total_bytes;
  };
  std::vector<Entry> ranking;  // descending by load, ties by ap_id
  double max_bytes = 0.0;
  double min_bytes = 0.0;
  double mean_bytes = 0.0;
  double gini = 0.0;
};

inline HotspotSummary hotspot_summary(const ApWorkloadTable& table) {
  HotspotSummary out;
  std::vector<double> totals;
  for (std::size_t ap = 0; ap < table.aps().size(); ++ap) {
    totals.push_back(table.ap_total(ap));
    out.ranking.push_back({table.aps()[ap].ap_id, totals.back()});
  }
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const auto& a, const auto& b) { return a.total_bytes > b.total_bytes; });
  if (!totals.empty()) {
    out.max_bytes = *std::max_element(totals.begin(), totals.end());
    out.min_bytes = *std::min_element(totals.begin(), totals.end());
    out.mean_bytes = std::accumulate(totals.begin(), totals.end(), 0.0) / static_cast<double>(totals.size());
  }
  out.gini = gini(totals);
  return out;
}

}  // namespace avwork
