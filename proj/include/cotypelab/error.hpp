/*
 * Copyright 2026 The cotypelab Authors
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

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cotypelab {

enum class ErrorCode {
  NonSquare,
  LabelMismatch,
  AsymmetricEntry,
  NegativeEntry,
  NonFiniteEntry,
  NonzeroDiagonal,
  ZeroDistance,
  TriangleViolation,
  BadParameter,
  EmptyArgument,
  TooSmall,
  TooLarge,
  NoValidSplit,
  DimensionMismatch,
  IdentityMismatch,
  Overflow,
  OutOfRange,
  BudgetTooSmall,
  TooLargeForExhaustive,
  EmptySource,
  NotDense,
  ParseError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::AsymmetricEntry: return "AsymmetricEntry";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::TriangleViolation: return "TriangleViolation";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::EmptyArgument: return "EmptyArgument";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NoValidSplit: return "NoValidSplit";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IdentityMismatch: return "IdentityMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::TooLargeForExhaustive: return "TooLargeForExhaustive";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::NotDense: return "NotDense";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// A named failure plus the point/vertex indices that witness it, e.g.
// TriangleViolation(0,2,1).
struct Witnessed {
  ErrorCode code;
  std::vector<std::size_t> witness;

  std::string describe() const {
    std::ostringstream os;
    os << to_string(code);
    if (!witness.empty()) {
      os << '(';
      for (std::size_t i = 0; i < witness.size(); ++i) os << (i ? "," : "") << witness[i];
      os << ')';
    }
    return os.str();
  }
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::vector<std::size_t> witness = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        witness_(std::move(witness)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::size_t>& witness() const noexcept { return witness_; }

 private:
  ErrorCode code_;
  std::vector<std::size_t> witness_;
};

// Thrown by validate_metric; carries one witness per violated axiom.
class MetricError : public Error {
 public:
  explicit MetricError(std::vector<Witnessed> violations)
      : Error(violations.empty() ? ErrorCode::BadParameter : violations.front().code,
              summarize(violations),
              violations.empty() ? std::vector<std::size_t>{} : violations.front().witness),
        violations_(std::move(violations)) {}

  const std::vector<Witnessed>& violations() const noexcept { return violations_; }

 private:
  static std::string summarize(const std::vector<Witnessed>& v) {
    std::string s = "invalid metric:";
    for (const auto& w : v) s += " " + w.describe();
    return s;
  }

  std::vector<Witnessed> violations_;
};

}  // namespace cotypelab
