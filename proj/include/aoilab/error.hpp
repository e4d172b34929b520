#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aoilab {

enum class ErrorCode {
  NonPositiveSize,
  NegativeGeneration,
  GenerationBeyondHorizon,
  InitialGenerationTooLarge,
  NonPositiveHorizon,
  InvalidTrace,
  RangeOutOfBounds,
  PolicyProtocolViolation,
  InstanceTooLarge,
  GridTooFine,
  InvalidSpecParams,
  DegenerateOptimal,
  PreconditionUnmet,
  ParseError,
  IoError,
  UnknownPolicy,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveSize: return "NonPositiveSize";
    case ErrorCode::NegativeGeneration: return "NegativeGeneration";
    case ErrorCode::GenerationBeyondHorizon: return "GenerationBeyondHorizon";
    case ErrorCode::InitialGenerationTooLarge: return "InitialGenerationTooLarge";
    case ErrorCode::NonPositiveHorizon: return "NonPositiveHorizon";
    case ErrorCode::InvalidTrace: return "InvalidTrace";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::PolicyProtocolViolation: return "PolicyProtocolViolation";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::GridTooFine: return "GridTooFine";
    case ErrorCode::InvalidSpecParams: return "InvalidSpecParams";
    case ErrorCode::DegenerateOptimal: return "DegenerateOptimal";
    case ErrorCode::PreconditionUnmet: return "PreconditionUnmet";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownPolicy: return "UnknownPolicy";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aoilab
