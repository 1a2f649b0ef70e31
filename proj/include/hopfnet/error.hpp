#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hopfnet {

enum class ErrorCode {
  InvalidSize,
  InvalidBulk,
  LeadingInsideBulk,
  BulkNotNegative,
  NotSymmetric,
  ConvergenceFailure,
  NonNegativeBulk,
  DegenerateLeading,
  DegenerateDenominator,
  DimensionMismatch,
  NonFiniteState,
  EmptyGrid,
  DaleViolation,
  AsymmetricC,
  PreconditionViolation,
  ParseError,
  UnknownKey,
  MissingRequired,
  InvalidValue,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::InvalidBulk: return "InvalidBulk";
    case ErrorCode::LeadingInsideBulk: return "LeadingInsideBulk";
    case ErrorCode::BulkNotNegative: return "BulkNotNegative";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NonNegativeBulk: return "NonNegativeBulk";
    case ErrorCode::DegenerateLeading: return "DegenerateLeading";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::DaleViolation: return "DaleViolation";
    case ErrorCode::AsymmetricC: return "AsymmetricC";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every recoverable failure in the library is raised as an Error; code()
/// lets callers branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hopfnet
