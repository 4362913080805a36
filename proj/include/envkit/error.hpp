#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace envkit {

enum class ErrorCode {
  InvalidMatrix,
  NotPositiveDefinite,
  DimensionError,
  NonFiniteObjective,
  InvalidPenalty,
  DegenerateWeights,
  OverflowGuard,
  RankDeficient,
  NonConvergence,
  Separation,
  TooManyFailures,
  InvalidConfig,
  ParseError,
  FamilyMismatch,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` lets callers
// (bootstrap retry, CLI exit paths) branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace envkit
