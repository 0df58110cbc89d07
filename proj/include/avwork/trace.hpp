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

// Mobility trace samples and the streaming stages applied to them: region
// filtering, penetration sub-sampling, coordinate projection and per-bin
// active-vehicle counting.
//
// Stages are pull-based: each wraps an upstream SampleSource and yields
// samples one at a time, so memory never grows with trace length.

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "avwork/error.hpp"
#include "avwork/hash.hpp"

namespace avwork {

struct TraceSample {
  std::string vehicle_id;
  double time_s = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::optional<double> speed_mps;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Uniform time bins covering [start_s, start_s + bin_count * bin_seconds).
class BinGrid {
 public:
  BinGrid() = default;

  BinGrid(double start_s, double bin_seconds, std::size_t bin_count)
      : start_s_(start_s), bin_seconds_(bin_seconds), bin_count_(bin_count) {
    if (!std::isfinite(start_s_)) throw ParameterError("bin grid start must be finite");
    if (!(bin_seconds_ > 0.0) || !std::isfinite(bin_seconds_)) {
      throw ParameterError("bin_seconds must be finite and > 0");
    }
    if (bin_count_ == 0) throw ParameterError("bin_count must be positive");
  }

  double start_s() const noexcept { return start_s_; }
  double bin_seconds() const noexcept { return bin_seconds_; }
  std::size_t bin_count() const noexcept { return bin_count_; }
  double end_s() const noexcept { return start_s_ + static_cast<double>(bin_count_) * bin_seconds_; }
  double bin_start(std::size_t i) const noexcept {
    return start_s_ + static_cast<double>(i) * bin_seconds_;
  }

  std::optional<std::size_t> index_of(double t) const noexcept {
    if (!(t >= start_s_)) return std::nullopt;
    const double k = std::floor((t - start_s_) / bin_seconds_);
    if (k >= static_cast<double>(bin_count_)) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

  friend bool operator==(const BinGrid&, const BinGrid&) = default;

 private:
  double start_s_ = 0.0;
  double bin_seconds_ = 3600.0;
  std::size_t bin_count_ = 24;
};

namespace detail {

inline double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool on_segment(Point p, Point a, Point b) {
  return cross(a, b, p) == 0.0 && std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

inline int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  return (v > 0.0) - (v < 0.0);
}

inline bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
         (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

}  // namespace detail

/// Closed planar region: an axis-aligned box or a simple polygon. Membership is
/// boundary-inclusive.
class Region {
 public:
  struct Box {
    double x_min, y_min, x_max, y_max;
  };
  using Polygon = std::vector<Point>;

  static Region box(double x_min, double y_min, double x_max, double y_max) {
    if (!(x_min < x_max) || !(y_min < y_max)) {
      throw ParameterError("region box requires x_min < x_max and y_min < y_max");
    }
    return Region(Box{x_min, y_min, x_max, y_max});
  }

  static Region polygon(Polygon vertices) {
    if (vertices.size() >= 2 && vertices.front() == vertices.back()) vertices.pop_back();
    const std::size_t n = vertices.size();
    if (n < 3) throw ParameterError("region polygon needs at least 3 vertices");
    for (const auto& v : vertices) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
        throw ParameterError("region polygon vertices must be finite");
      }
    }
    // Non-adjacent edges must not touch; adjacent edges may only share their vertex.
    for (std::size_t i = 0; i < n; ++i) {
      const Point a = vertices[i], b = vertices[(i + 1) % n];
      if (a == b) throw ParameterError("region polygon has a repeated vertex");
      for (std::size_t j = i + 1; j < n; ++j) {
        const Point c = vertices[j], d = vertices[(j + 1) % n];
        const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
        if (adjacent) {
          const Point shared = (j == i + 1) ? b : a;
          const Point other_i = (j == i + 1) ? a : b;
          const Point other_j = (j == i + 1) ? d : c;
          // Collinear folding back over the shared vertex counts as self-intersection.
          if (detail::orientation(other_i, shared, other_j) == 0 &&
              (detail::on_segment(other_j, other_i, shared) ||
               detail::on_segment(other_i, shared, other_j))) {
            throw ParameterError("region polygon is self-intersecting");
          }
          continue;
        }
        if (detail::segments_intersect(a, b, c, d)) {
          throw ParameterError("region polygon is self-intersecting");
        }
      }
    }
    return Region(std::move(vertices));
  }

  bool is_box() const noexcept { return std::holds_alternative<Box>(shape_); }
  const Box* as_box() const noexcept { return std::get_if<Box>(&shape_); }
  const Polygon* as_polygon() const noexcept { return std::get_if<Polygon>(&shape_); }

  bool contains(double x, double y) const {
    if (const auto* b = as_box()) {
      return x >= b->x_min && x <= b->x_max && y >= b->y_min && y <= b->y_max;
    }
    const auto& poly = std::get<Polygon>(shape_);
    const Point p{x, y};
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point a = poly[j], b = poly[i];
      if (detail::on_segment(p, a, b)) return true;
      if ((b.y > y) != (a.y > y)) {
        const double x_cross = b.x + (y - b.y) * (a.x - b.x) / (a.y - b.y);
        if (x < x_cross) inside = !inside;
      }
    }
    return inside;
  }

  /// Vertex mean (polygon) or box centre; used as the projection origin.
  Point centroid() const {
    if (const auto* b = as_box()) return {(b->x_min + b->x_max) / 2.0, (b->y_min + b->y_max) / 2.0};
    Point c;
    const auto& poly = std::get<Polygon>(shape_);
    for (const auto& v : poly) {
      c.x += v.x;
      c.y += v.y;
    }
    c.x /= static_cast<double>(poly.size());
    c.y /= static_cast<double>(poly.size());
    return c;
  }

 private:
  explicit Region(std::variant<Box, Polygon> shape) : shape_(std::move(shape)) {}

  std::variant<Box, Polygon> shape_;
};

/// Local equirectangular projection of (longitude, latitude) degrees to metres
/// around an origin.
class EquirectangularProjection {
 public:
  static constexpr double kEarthRadiusM = 6371008.8;

  EquirectangularProjection(double lon0, double lat0) : lon0_(lon0), lat0_(lat0) {
    if (!looks_geographic(lon0, lat0)) {
      throw ParameterError("projection origin is not a longitude/latitude pair");
    }
    cos_lat0_ = std::cos(lat0 * std::numbers::pi / 180.0);
  }

  static bool looks_geographic(double lon, double lat) {
    return lon >= -180.0 && lon <= 180.0 && lat >= -90.0 && lat <= 90.0;
  }

  Point project(double lon, double lat) const {
    constexpr double deg = std::numbers::pi / 180.0;
    return {kEarthRadiusM * (lon - lon0_) * deg * cos_lat0_, kEarthRadiusM * (lat - lat0_) * deg};
  }

  Region project(const Region& region) const {
    if (const auto* b = region.as_box()) {
      const Point lo = project(b->x_min, b->y_min), hi = project(b->x_max, b->y_max);
      return Region::box(lo.x, lo.y, hi.x, hi.y);
    }
    Region::Polygon out;
    for (const auto& v : *region.as_polygon()) out.push_back(project(v.x, v.y));
    return Region::polygon(std::move(out));
  }

 private:
  double lon0_;
  double lat0_;
  double cos_lat0_ = 1.0;
};

/// Pull-based stream of samples.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::optional<TraceSample> next() = 0;
};

class VectorSource final : public SampleSource {
 public:
  explicit VectorSource(std::vector<TraceSample> samples) : samples_(std::move(samples)) {}

  std::optional<TraceSample> next() override {
    if (pos_ >= samples_.size()) return std::nullopt;
    return samples_[pos_++];
  }

 private:
  std::vector<TraceSample> samples_;
  std::size_t pos_ = 0;
};

inline std::vector<TraceSample> drain(SampleSource& source) {
  std::vector<TraceSample> out;
  while (auto s = source.next()) out.push_back(std::move(*s));
  return out;
}

/// Sample counts for one filter stage. in == kept + dropped.
struct StreamStats {
  std::uint64_t in = 0;
  std::uint64_t kept = 0;
  std::uint64_t dropped = 0;
};

class RegionFilter final : public SampleSource {
 public:
  RegionFilter(SampleSource& upstream, Region region) : upstream_(upstream), region_(std::move(region)) {}

  std::optional<TraceSample> next() override {
    while (auto s = upstream_.next()) {
      ++stats_.in;
      if (region_.contains(s->x, s->y)) {
        ++stats_.kept;
        return s;
      }
      ++stats_.dropped;
    }
    return std::nullopt;
  }

  const StreamStats& stats() const noexcept { return stats_; }

 private:
  SampleSource& upstream_;
  Region region_;
  StreamStats stats_;
};

inline void check_fraction(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ParameterError("penetration fraction must be in [0,1], got " + std::to_string(fraction));
  }
}

/// Threshold-hash selection: a vehicle is an AV at fraction f iff
/// unit_interval(hash64(seed, id)) < f. Selections are nested in f.
inline bool penetration_selected(std::uint64_t seed, std::string_view vehicle_id, double fraction) {
  return unit_interval(hash64(seed, vehicle_id)) < fraction;
}

class PenetrationSampler final : public SampleSource {
 public:
  PenetrationSampler(SampleSource& upstream, double fraction, std::uint64_t seed)
      : upstream_(upstream), fraction_(fraction), seed_(seed) {
    check_fraction(fraction);
  }

  std::optional<TraceSample> next() override {
    while (auto s = upstream_.next()) {
      ++stats_.in;
      auto [it, inserted] = decisions_.try_emplace(s->vehicle_id, false);
      if (inserted) {
        it->second = penetration_selected(seed_, s->vehicle_id, fraction_);
        ++(it->second ? selected_vehicles_ : rejected_vehicles_);
      }
      if (it->second) {
        ++stats_.kept;
        return s;
      }
      ++stats_.dropped;
    }
    return std::nullopt;
  }

  const StreamStats& stats() const noexcept { return stats_; }
  std::uint64_t selected_vehicles() const noexcept { return selected_vehicles_; }
  std::uint64_t rejected_vehicles() const noexcept { return rejected_vehicles_; }

 private:
  SampleSource& upstream_;
  double fraction_;
  std::uint64_t seed_;
  std::unordered_map<std::string, bool> decisions_;
  std::uint64_t selected_vehicles_ = 0;
  std::uint64_t rejected_vehicles_ = 0;
  StreamStats stats_;
};

/// Projects geographic samples to metres. Any sample outside the lon/lat range
/// is rejected with a parse error.
class ProjectingSource final : public SampleSource {
 public:
  ProjectingSource(SampleSource& upstream, EquirectangularProjection projection)
      : upstream_(upstream), projection_(projection) {}

  std::optional<TraceSample> next() override {
    auto s = upstream_.next();
    if (!s) return s;
    if (!EquirectangularProjection::looks_geographic(s->x, s->y)) {
      throw ParseError("trace", 0, 0,
                       "vehicle '" + s->vehicle_id + "' at t=" + std::to_string(s->time_s) +
                           " has coordinates outside longitude/latitude range");
    }
    const Point p = projection_.project(s->x, s->y);
    s->x = p.x;
    s->y = p.y;
    return s;
  }

 private:
  SampleSource& upstream_;
  EquirectangularProjection projection_;
};

/// Rejects a trace in which any vehicle's timestamps go backwards.
class TimeOrderGuard {
 public:
  // Returns an error message, or empty on success.
  std::string check(const TraceSample& s) {
    auto [it, inserted] = last_time_.try_emplace(s.vehicle_id, s.time_s);
    if (!inserted) {
      if (s.time_s < it->second) {
        return "vehicle '" + s.vehicle_id + "' goes back in time: t=" + std::to_string(s.time_s) +
               " after t=" + std::to_string(it->second);
      }
      it->second = s.time_s;
    }
    return {};
  }

 private:
  std::unordered_map<std::string, double> last_time_;
};

struct ActiveCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t overflow = 0;  // samples outside the grid
};

/// Distinct vehicles per bin. Relies on per-vehicle non-decreasing time, so
/// remembering each vehicle's last counted bin is enough for distinctness.
class ActiveVehicleCounter {
 public:
  explicit ActiveVehicleCounter(BinGrid bins) : bins_(bins) { result_.counts.assign(bins.bin_count(), 0); }

  void add(const TraceSample& s) {
    const auto bin = bins_.index_of(s.time_s);
    if (!bin) {
      ++result_.overflow;
      return;
    }
    auto [it, inserted] = last_bin_.try_emplace(s.vehicle_id, *bin);
    if (inserted || it->second != *bin) {
      it->second = *bin;
      ++result_.counts[*bin];
    }
  }

  const ActiveCounts& result() const noexcept { return result_; }

 private:
  BinGrid bins_;
  std::unordered_map<std::string, std::size_t> last_bin_;
  ActiveCounts result_;
};

inline ActiveCounts active_vehicle_counts(SampleSource& samples, const BinGrid& bins) {
  ActiveVehicleCounter counter(bins);
  while (auto s = samples.next()) counter.add(*s);
  return counter.result();
}

}  // namespace avwork
