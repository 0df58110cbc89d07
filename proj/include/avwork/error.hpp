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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace avwork {

enum class ErrorCategory { Parameter, Config, Parse, Range, Io, Invariant };

inline std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Parameter: return "parameter";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Range: return "range";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Invariant: return "invariant";
  }
  return "unknown";
}

// Base for every error the library raises. The category drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorCategory::Parameter, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorCategory::Range, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorCategory::Invariant, what) {}
};

/// Malformed input. Carries the source name plus 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::uint64_t line, std::uint64_t column, const std::string& message)
      : Error(ErrorCategory::Parse, source + ":" + std::to_string(line) + ":" +
                                        std::to_string(column) + ": " + message),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const noexcept { return source_; }
  std::uint64_t line() const noexcept { return line_; }
  std::uint64_t column() const noexcept { return column_; }

 private:
  std::string source_;
  std::uint64_t line_;
  std::uint64_t column_;
};

}  // namespace avwork
