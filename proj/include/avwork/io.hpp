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

// CSV and JSON serialization of pipeline inputs and outputs.

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avwork/csv.hpp"
#include "avwork/error.hpp"
#include "avwork/series.hpp"
#include "avwork/spatial.hpp"

namespace avwork {

/// Reads `ap_id,x,y`.
inline std::vector<AccessPoint> read_access_points_csv(std::istream& in, const std::string& source = "<aps>") {
  std::vector<AccessPoint> aps;
  std::vector<std::string> fields;
  std::string line;
  std::uint64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_ending(line);
    if (line_no == 1) {
      strip_bom(line);
      if (line != "ap_id,x,y") throw ParseError(source, 1, 1, "expected header 'ap_id,x,y'");
      continue;
    }
    if (line.empty()) continue;
    if (auto err = split_csv_row(line, fields); !err.empty()) throw ParseError(source, line_no, 1, err);
    if (fields.size() != 3) throw ParseError(source, line_no, 1, "expected 3 fields");
    const auto x = parse_double(fields[1]);
    const auto y = parse_double(fields[2]);
    if (!x) throw ParseError(source, line_no, 2, "x is not a finite number");
    if (!y) throw ParseError(source, line_no, 3, "y is not a finite number");
    aps.push_back({fields[0], *x, *y});
  }
  return aps;
}

inline void write_series_csv(std::ostream& out, const WorkloadSeries& s) {
  out << "bin_start_s,telemetry_bytes,learning_bytes,map_bytes,total_bytes,mbps\n";
  for (std::size_t i = 0; i < s.bins.bin_count(); ++i) {
    const double total = s.total(i);
    out << format_double(s.bins.bin_start(i)) << ',' << format_double(s.telemetry[i]) << ','
        << format_double(s.learning[i]) << ',' << format_double(s.map[i]) << ',' << format_double(total) << ','
        << format_double(total * 8.0 / (s.bins.bin_seconds() * 1e6)) << '\n';
  }
}

inline void write_ap_table_csv(std::ostream& out, const ApWorkloadTable& t) {
  out << "ap_id,bin_start_s,telemetry_bytes,learning_bytes,map_bytes,total_bytes\n";
  for (std::size_t ap = 0; ap < t.aps().size(); ++ap) {
    for (std::size_t bin = 0; bin < t.bins().bin_count(); ++bin) {
      const auto& c = t.at(ap, bin);
      out << csv_escape(t.aps()[ap].ap_id) << ',' << format_double(t.bins().bin_start(bin)) << ','
          << format_double(c.telemetry) << ',' << format_double(c.learning) << ',' << format_double(c.map) << ','
          << format_double(c.total()) << '\n';
    }
  }
}

inline void write_hotspots_csv(std::ostream& out, const HotspotSummary& h) {
  out << "rank,ap_id,total_bytes\n";
  for (std::size_t i = 0; i < h.ranking.size(); ++i) {
    out << i + 1 << ',' << csv_escape(h.ranking[i].ap_id) << ',' << format_double(h.ranking[i].total_bytes) << '\n';
  }
}

inline void write_comparison_csv(std::ostream& out, const ComparisonReport& r) {
  out << "bin_start_s,av_mbps,baseline_mbps\n";
  for (std::size_t i = 0; i < r.av.mbps.size(); ++i) {
    out << format_double(r.av.bins.bin_start(i)) << ',' << format_double(r.av.mbps[i]) << ','
        << format_double(r.baseline.mbps[i]) << '\n';
  }
}

namespace detail {
// JSON has no NaN; undefined statistics serialize as null.
inline nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }
}  // namespace detail

inline nlohmann::json to_json(const HotspotSummary& h) {
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& e : h.ranking) ranking.push_back({{"ap_id", e.ap_id}, {"total_bytes", e.total_bytes}});
  return {{"ranking", ranking},
          {"max_bytes", h.max_bytes},
          {"min_bytes", h.min_bytes},
          {"mean_bytes", h.mean_bytes},
          {"gini", h.gini}};
}

inline nlohmann::json to_json(const ApWorkloadTable& t) {
  nlohmann::json aps = nlohmann::json::array();
  for (std::size_t ap = 0; ap < t.aps().size(); ++ap) {
    nlohmann::json tel = nlohmann::json::array(), lrn = nlohmann::json::array(), map = nlohmann::json::array();
    for (std::size_t bin = 0; bin < t.bins().bin_count(); ++bin) {
      tel.push_back(t.at(ap, bin).telemetry);
      lrn.push_back(t.at(ap, bin).learning);
      map.push_back(t.at(ap, bin).map);
    }
    aps.push_back({{"ap_id", t.aps()[ap].ap_id},
                   {"x", t.aps()[ap].x},
                   {"y", t.aps()[ap].y},
                   {"telemetry_bytes", tel},
                   {"learning_bytes", lrn},
                   {"map_bytes", map}});
  }
  return {{"bins",
           {{"start_s", t.bins().start_s()}, {"bin_seconds", t.bins().bin_seconds()}, {"bin_count", t.bins().bin_count()}}},
          {"aps", aps},
          {"assigned_samples", t.assigned_samples},
          {"overflow_samples", t.overflow_samples}};
}

inline nlohmann::json to_json(const ComparisonReport& r) {
  return {{"common_grid",
           {{"start_s", r.av.bins.start_s()}, {"bin_seconds", r.av.bins.bin_seconds()}, {"bin_count", r.av.bins.bin_count()}}},
          {"resampling", "time-weighted block mean onto the coarser grid over the common span"},
          {"peak_ratio", detail::number_or_null(r.peak_ratio)},
          {"mean_ratio", detail::number_or_null(r.mean_ratio)},
          {"pearson_correlation", detail::number_or_null(r.correlation)},
          {"av_peak_bin_start_s", r.av_peak_bin_start_s},
          {"baseline_peak_bin_start_s", r.baseline_peak_bin_start_s},
          {"av_peak_hour", r.av_peak_hour},
          {"baseline_peak_hour", r.baseline_peak_hour},
          {"av_trough_bin_start_s", r.av_trough_bin_start_s},
          {"baseline_trough_bin_start_s", r.baseline_trough_bin_start_s},
          {"notes", r.notes}};
}

}  // namespace avwork
