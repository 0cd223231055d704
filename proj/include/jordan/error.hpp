#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jordan {

enum class ErrorCode {
  OrderMismatch,
  NotAUnit,
  DivergentContraction,
  FuelExhausted,
  DegreeCapExceeded,
  UnknownGenerator,
  UnmappedGenerator,
  NonNilpotentArgument,
  ArityMismatch,
  TypeMismatch,
  DivisionByZero,
  NoTriangularOrder,
  MissingRMatrixSpec,
  UnknownEntry,
  ValidationFailed,
  UnresolvedExponential,
  MissingDerivative,
  InstabilityDetected,
  ParseError,
  ConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::DivergentContraction: return "DivergentContraction";
    case ErrorCode::FuelExhausted: return "FuelExhausted";
    case ErrorCode::DegreeCapExceeded: return "DegreeCapExceeded";
    case ErrorCode::UnknownGenerator: return "UnknownGenerator";
    case ErrorCode::UnmappedGenerator: return "UnmappedGenerator";
    case ErrorCode::NonNilpotentArgument: return "NonNilpotentArgument";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NoTriangularOrder: return "NoTriangularOrder";
    case ErrorCode::MissingRMatrixSpec: return "MissingRMatrixSpec";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::UnresolvedExponential: return "UnresolvedExponential";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::InstabilityDetected: return "InstabilityDetected";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Structured error carrying a machine-checkable code. `detail` holds an
/// integer payload where one is meaningful (e.g. the offending ε-degree of a
/// divergent contraction), `location` a file:line or entity reference.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string location = {}, long detail = 0)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message),
        location_(std::move(location)),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& location() const noexcept { return location_; }
  long detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::string location_;
  long detail_;
};

}  // namespace jordan
