#pragma once

#include <stdexcept>
#include <string>

namespace levi {

/// Machine-readable failure codes. Every levi::Error carries exactly one.
enum class ErrorCode {
  DimensionMismatch,
  IndexOutOfRange,
  SingularLinearPart,
  InvalidInput,
  AlgebraMismatch,
  DegreeTooHigh,
  NotACocycle,
  Obstructed,
  NotPoisson,
  NotAnAlgebroid,
  InternalCocycleFailure,
  LogUndefined,
  NoConvergence,
  SpreadTooLarge,
  DefectTooLarge,
  HypothesisViolated,
  NotAGraph,
  UnknownIsometry,
  ParseError,
  UnknownKind,
  UsageError,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularLinearPart: return "SingularLinearPart";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::NotACocycle: return "NotACocycle";
    case ErrorCode::Obstructed: return "Obstructed";
    case ErrorCode::NotPoisson: return "NotPoisson";
    case ErrorCode::NotAnAlgebroid: return "NotAnAlgebroid";
    case ErrorCode::InternalCocycleFailure: return "InternalCocycleFailure";
    case ErrorCode::LogUndefined: return "LogUndefined";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SpreadTooLarge: return "SpreadTooLarge";
    case ErrorCode::DefectTooLarge: return "DefectTooLarge";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NotAGraph: return "NotAGraph";
    case ErrorCode::UnknownIsometry: return "UnknownIsometry";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace levi
