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

// Streaming readers for floating-car-data traces.
//
// FCD markup:
//   <fcd-export>
//     <timestep time="0.00">
//       <vehicle id="v1" x="10.0" y="20.0" speed="5.0" .../>
//     </timestep>
//   </fcd-export>
// Unknown elements and attributes are skipped. Only the open-element stack is
// held in memory.
//
// CSV: header `time_s,vehicle_id,x,y,speed_mps`; speed_mps may be empty.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avwork/csv.hpp"
#include "avwork/error.hpp"
#include "avwork/trace.hpp"

namespace avwork {

class FcdReader final : public SampleSource {
 public:
  explicit FcdReader(std::istream& in, std::string source_name = "<fcd>")
      : in_(in), source_(std::move(source_name)) {}

  std::optional<TraceSample> next() override {
    for (;;) {
      int c = get();
      if (c == EOF) {
        if (!stack_.empty()) fail("unexpected end of input inside <" + stack_.back() + ">");
        return std::nullopt;
      }
      if (c != '<') continue;  // character data is ignored
      if (auto sample = read_markup()) return sample;
    }
  }

  std::uint64_t line() const noexcept { return line_; }

 private:
  static bool is_space(int c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_name_char(int c) {
    return c != EOF && !is_space(c) && c != '/' && c != '>' && c != '=' && c != '<' && c != '"' &&
           c != '\'';
  }

  int get() {
    const int c = in_.get();
    if (c == '\n') {
      ++line_;
      column_ = 0;
    } else if (c != EOF) {
      ++column_;
    }
    return c;
  }
  int peek() { return in_.peek(); }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(source_, line_, column_, message);
  }

  void skip_space() {
    while (is_space(peek())) get();
  }

  void skip_until(std::string_view terminator) {
    std::size_t matched = 0;
    for (;;) {
      const int c = get();
      if (c == EOF) fail("unterminated markup, expected '" + std::string(terminator) + "'");
      if (c == terminator[matched]) {
        if (++matched == terminator.size()) return;
      } else {
        matched = (c == terminator[0]) ? 1 : 0;
      }
    }
  }

  std::string read_name() {
    std::string name;
    while (is_name_char(peek())) name.push_back(static_cast<char>(get()));
    if (name.empty()) fail("expected a name");
    return name;
  }

  std::string decode_entity() {
    std::string entity;
    for (;;) {
      const int c = get();
      if (c == EOF || c == '<') fail("unterminated entity reference");
      if (c == ';') break;
      entity.push_back(static_cast<char>(c));
      if (entity.size() > 16) fail("entity reference too long");
    }
    if (entity == "amp") return "&";
    if (entity == "lt") return "<";
    if (entity == "gt") return ">";
    if (entity == "quot") return "\"";
    if (entity == "apos") return "'";
    if (entity.size() > 1 && entity[0] == '#') {
      const bool hex = entity[1] == 'x' || entity[1] == 'X';
      const std::string_view digits = std::string_view(entity).substr(hex ? 2 : 1);
      unsigned long code = 0;
      const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code, hex ? 16 : 10);
      if (ec != std::errc() || p != digits.data() + digits.size() || digits.empty()) {
        fail("bad character reference '&" + entity + ";'");
      }
      return utf8_encode(code);
    }
    fail("unknown entity '&" + entity + ";'");
  }

  std::string utf8_encode(unsigned long cp) const {
    std::string out;
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x110000) {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      fail("character reference out of range");
    }
    return out;
  }

  struct Tag {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    bool self_closing = false;

    const std::string* find(std::string_view key) const {
      for (const auto& [k, v] : attributes) {
        if (k == key) return &v;
      }
      return nullptr;
    }
  };

  Tag read_tag() {
    Tag tag;
    tag.name = read_name();
    for (;;) {
      skip_space();
      const int c = peek();
      if (c == EOF) fail("unexpected end of input in <" + tag.name + ">");
      if (c == '>') {
        get();
        return tag;
      }
      if (c == '/') {
        get();
        if (get() != '>') fail("expected '>' after '/' in <" + tag.name + ">");
        tag.self_closing = true;
        return tag;
      }
      std::string key = read_name();
      skip_space();
      if (get() != '=') fail("expected '=' after attribute '" + key + "'");
      skip_space();
      const int quote = get();
      if (quote != '"' && quote != '\'') fail("expected quoted value for attribute '" + key + "'");
      std::string value;
      for (;;) {
        const int v = get();
        if (v == EOF) fail("unterminated value for attribute '" + key + "'");
        if (v == quote) break;
        if (v == '<') fail("'<' in value of attribute '" + key + "'");
        if (v == '&') {
          value += decode_entity();
        } else {
          value.push_back(static_cast<char>(v));
        }
      }
      tag.attributes.emplace_back(std::move(key), std::move(value));
    }
  }

  double number_attr(const Tag& tag, std::string_view key, bool required, double fallback = 0.0) {
    const std::string* v = tag.find(key);
    if (!v) {
      if (required) fail("<" + tag.name + "> is missing attribute '" + std::string(key) + "'");
      return fallback;
    }
    const auto parsed = parse_double(*v);
    if (!parsed) fail("attribute '" + std::string(key) + "' is not a finite number: '" + *v + "'");
    return *parsed;
  }

  // Consumes one markup construct after '<'. Returns a sample if it was a vehicle.
  std::optional<TraceSample> read_markup() {
    const int c = peek();
    if (c == '?') {
      skip_until("?>");
      return std::nullopt;
    }
    if (c == '!') {
      get();
      if (peek() == '-') {
        get();
        if (get() != '-') fail("malformed comment");
        skip_until("-->");
      } else if (peek() == '[') {
        skip_until("]]>");
      } else {
        skip_declaration();
      }
      return std::nullopt;
    }
    if (c == '/') {
      get();
      const std::string name = read_name();
      skip_space();
      if (get() != '>') fail("expected '>' to close </" + name + ">");
      if (stack_.empty() || stack_.back() != name) {
        fail("unexpected closing tag </" + name + ">" +
             (stack_.empty() ? std::string() : " while <" + stack_.back() + "> is open"));
      }
      stack_.pop_back();
      if (name == "timestep") in_timestep_ = false;
      return std::nullopt;
    }

    Tag tag = read_tag();
    std::optional<TraceSample> sample;
    if (tag.name == "timestep") {
      if (in_timestep_) fail("nested <timestep>");
      time_ = number_attr(tag, "time", true);
      if (time_ < 0.0) fail("negative timestep time");
      in_timestep_ = !tag.self_closing;
    } else if (tag.name == "vehicle" && in_timestep_ && stack_.back() == "timestep") {
      TraceSample s;
      const std::string* id = tag.find("id");
      if (!id) fail("<vehicle> is missing attribute 'id'");
      s.vehicle_id = *id;
      s.time_s = time_;
      s.x = number_attr(tag, "x", true);
      s.y = number_attr(tag, "y", true);
      if (tag.find("speed")) s.speed_mps = number_attr(tag, "speed", true);
      if (auto err = order_.check(s); !err.empty()) fail(err);
      sample = std::move(s);
    } else if (tag.name == "vehicle" && !in_timestep_) {
      fail("<vehicle> outside of <timestep>");
    }
    if (!tag.self_closing) stack_.push_back(std::move(tag.name));
    return sample;
  }

  void skip_declaration() {
    int depth = 0;
    for (;;) {
      const int c = get();
      if (c == EOF) fail("unterminated declaration");
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth <= 0) return;
    }
  }

  std::istream& in_;
  std::string source_;
  std::uint64_t line_ = 1;
  std::uint64_t column_ = 0;
  std::vector<std::string> stack_;
  bool in_timestep_ = false;
  double time_ = 0.0;
  TimeOrderGuard order_;
};

class CsvTraceReader final : public SampleSource {
 public:
  static constexpr std::string_view kHeader = "time_s,vehicle_id,x,y,speed_mps";

  explicit CsvTraceReader(std::istream& in, std::string source_name = "<csv>")
      : in_(in), source_(std::move(source_name)) {}

  std::optional<TraceSample> next() override {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      strip_line_ending(line);
      if (line_ == 1) {
        strip_bom(line);
        if (line != kHeader) {
          throw ParseError(source_, 1, 1, "expected header '" + std::string(kHeader) + "'");
        }
        continue;
      }
      if (line.empty()) continue;
      return parse_row(line);
    }
    if (line_ == 0) throw ParseError(source_, 1, 1, "empty input, expected CSV header");
    return std::nullopt;
  }

 private:
  TraceSample parse_row(const std::string& line) {
    std::vector<std::string> fields;
    if (auto err = split_csv_row(line, fields); !err.empty()) {
      throw ParseError(source_, line_, 1, err);
    }
    if (fields.size() != 5) {
      throw ParseError(source_, line_, 1, "expected 5 fields, got " + std::to_string(fields.size()));
    }
    auto number = [&](std::size_t i, std::string_view name) {
      auto v = parse_double(fields[i]);
      if (!v) {
        throw ParseError(source_, line_, i + 1,
                         std::string(name) + " is not a finite number: '" + fields[i] + "'");
      }
      return *v;
    };
    TraceSample s;
    s.time_s = number(0, "time_s");
    if (s.time_s < 0.0) throw ParseError(source_, line_, 1, "negative time_s");
    s.vehicle_id = fields[1];
    if (s.vehicle_id.empty()) throw ParseError(source_, line_, 2, "empty vehicle_id");
    s.x = number(2, "x");
    s.y = number(3, "y");
    if (!fields[4].empty()) s.speed_mps = number(4, "speed_mps");
    if (auto err = order_.check(s); !err.empty()) throw ParseError(source_, line_, 1, err);
    return s;
  }

  std::istream& in_;
  std::string source_;
  std::uint64_t line_ = 0;
  TimeOrderGuard order_;
};

enum class TraceFormat { Fcd, Csv };

/// Owns the file stream and the reader for a trace on disk.
class TraceFile final : public SampleSource {
 public:
  explicit TraceFile(const std::filesystem::path& path) : stream_(path, std::ios::binary) {
    if (!stream_) throw IoError("cannot open trace '" + path.string() + "'");
    if (detect(path) == TraceFormat::Fcd) {
      reader_ = std::make_unique<FcdReader>(stream_, path.string());
    } else {
      reader_ = std::make_unique<CsvTraceReader>(stream_, path.string());
    }
  }

  std::optional<TraceSample> next() override { return reader_->next(); }

 private:
  TraceFormat detect(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".csv") return TraceFormat::Csv;
    if (ext == ".xml" || ext == ".fcd") return TraceFormat::Fcd;
    // Sniff: markup starts with '<' after optional whitespace / BOM.
    const auto start = stream_.tellg();
    int c;
    while ((c = stream_.get()) != EOF && (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == 0xEF ||
                                          c == 0xBB || c == 0xBF)) {
    }
    stream_.clear();
    stream_.seekg(start);
    return c == '<' ? TraceFormat::Fcd : TraceFormat::Csv;
  }

  std::ifstream stream_;
  std::unique_ptr<SampleSource> reader_;
};

}  // namespace avwork
