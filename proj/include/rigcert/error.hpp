#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rigcert {

enum class ErrorCode {
  DetNonPositive,
  Singular,
  DimensionMismatch,
  EmptyDomain,
  BadExponents,
  DegenerateFamily,
  OutsideDomain,
  SetEscapesDomain,
  NotEquilibrium,
  LineSearchStall,
  MaxIterations,
  SingularTangent,
  DeterminantViolation,
  BoundaryMismatch,
  DetBelowFloor,
  DegenerateMean,
  ConfigError,
  NonPositiveK,
  HypothesisUnmet,
  NotInjective,
  DegenerateNormal,
  ParseError,
  IoError,
  CheckFailed,
  EigenFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace rigcert
