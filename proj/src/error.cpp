#include "rigcert/error.hpp"

namespace rigcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DetNonPositive: return "DetNonPositive";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::BadExponents: return "BadExponents";
    case ErrorCode::DegenerateFamily: return "DegenerateFamily";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::SetEscapesDomain: return "SetEscapesDomain";
    case ErrorCode::NotEquilibrium: return "NotEquilibrium";
    case ErrorCode::LineSearchStall: return "LineSearchStall";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::SingularTangent: return "SingularTangent";
    case ErrorCode::DeterminantViolation: return "DeterminantViolation";
    case ErrorCode::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorCode::DetBelowFloor: return "DetBelowFloor";
    case ErrorCode::DegenerateMean: return "DegenerateMean";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::NonPositiveK: return "NonPositiveK";
    case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
    case ErrorCode::NotInjective: return "NotInjective";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CheckFailed: return "CheckFailed";
    case ErrorCode::EigenFailure: return "EigenFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rigcert
