// Copyright 2026 The coalition-attrib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coalition_attrib {

// Stable error codes. The CLI exits with status 1 for errors raised while
// loading and validating a run, and 2 for errors raised while computing.
enum class ErrorCode {
  kSyntax,
  kUnknownFeature,
  kMissingFeature,
  kDivisionByZero,
  kIo,
  kRaggedRow,
  kNonNumericCell,
  kUnsupportedLaw,
  kNoSupport,
  kQuadratureUnavailable,
  kTooManyFeatures,
  kGraphSchemaMismatch,
  kInvalidArgument,
  kConfig,
  kParse,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSyntax: return "SyntaxError";
    case ErrorCode::kUnknownFeature: return "UnknownFeature";
    case ErrorCode::kMissingFeature: return "MissingFeature";
    case ErrorCode::kDivisionByZero: return "DivisionByZero";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kRaggedRow: return "RaggedRow";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kUnsupportedLaw: return "UnsupportedLaw";
    case ErrorCode::kNoSupport: return "NoSupport";
    case ErrorCode::kQuadratureUnavailable: return "QuadratureUnavailable";
    case ErrorCode::kTooManyFeatures: return "TooManyFeatures";
    case ErrorCode::kGraphSchemaMismatch: return "GraphSchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& detail = {})
      : Error(ErrorCode::kSyntax, format(position, expected, detail)),
        position_(position),
        expected_(std::move(expected)) {}

  // Zero-based byte offset into the source text.
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  static std::string format(std::size_t position,
                            const std::vector<std::string>& expected,
                            const std::string& detail) {
    std::string msg = "syntax error at position " + std::to_string(position);
    if (!detail.empty()) msg += ": " + detail;
    if (!expected.empty()) {
      msg += "; expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
        msg += expected[i];
      }
    }
    return msg;
  }

  std::size_t position_;
  std::vector<std::string> expected_;
};

class UnknownFeature : public Error {
 public:
  explicit UnknownFeature(const std::string& name)
      : Error(ErrorCode::kUnknownFeature, "unknown feature '" + name + "'"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class MissingFeature : public Error {
 public:
  explicit MissingFeature(const std::string& name)
      : Error(ErrorCode::kMissingFeature,
              "instance has no value for feature '" + name + "'"),
        name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error(ErrorCode::kDivisionByZero, "division by zero") {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCode::kIo, message) {}
};

class RaggedRow : public Error {
 public:
  RaggedRow(std::size_t line, std::size_t got, std::size_t want)
      : Error(ErrorCode::kRaggedRow,
              "line " + std::to_string(line) + " has " + std::to_string(got) +
                  " cells, header has " + std::to_string(want)),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Line and column are 1-based; line 1 is the header.
class NonNumericCell : public Error {
 public:
  NonNumericCell(std::size_t line, std::size_t column, const std::string& cell)
      : Error(ErrorCode::kNonNumericCell,
              "non-numeric cell '" + cell + "' at line " +
                  std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnsupportedLaw : public Error {
 public:
  explicit UnsupportedLaw(const std::string& message)
      : Error(ErrorCode::kUnsupportedLaw, message) {}
};

class NoSupport : public Error {
 public:
  explicit NoSupport(const std::string& message)
      : Error(ErrorCode::kNoSupport, message) {}
};

class QuadratureUnavailable : public Error {
 public:
  explicit QuadratureUnavailable(const std::string& message)
      : Error(ErrorCode::kQuadratureUnavailable, message) {}
};

class TooManyFeatures : public Error {
 public:
  TooManyFeatures(std::size_t features, std::size_t limit,
                  const std::string& hint)
      : Error(ErrorCode::kTooManyFeatures,
              std::to_string(features) + " features exceeds the limit of " +
                  std::to_string(limit) + "; " + hint),
        features_(features) {}
  std::size_t features() const { return features_; }

 private:
  std::size_t features_;
};

class GraphSchemaMismatch : public Error {
 public:
  explicit GraphSchemaMismatch(const std::string& message)
      : Error(ErrorCode::kGraphSchemaMismatch, message) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error(ErrorCode::kInvalidArgument, message) {}
};

// `field` is a dotted path into the run configuration, e.g. "reference.graph".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCode::kConfig, "ConfigError(\"" + field + "\"): " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorCode::kParse,
              "ParseError(line " + std::to_string(line) + "): " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace coalition_attrib
