#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlsctl {

enum class ErrorCode {
  ShapeMismatch,
  Aliasing,
  DirichletViolation,
  InvalidPotential,
  InvalidArgument,
  NotNormalized,
  LocalExistenceExceeded,
  TimeGridMismatch,
  SpanDeficient,
  DivisionByStructuralZero,
  IllPosed,
  ControlDeficient,
  NotInControlSpan,
  ParseError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code. `what()` is prefixed with the
/// code name, e.g. "SPAN_DEFICIENT: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "SHAPE_MISMATCH";
    case ErrorCode::Aliasing: return "ALIASING";
    case ErrorCode::DirichletViolation: return "DIRICHLET_VIOLATION";
    case ErrorCode::InvalidPotential: return "INVALID_POTENTIAL";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::NotNormalized: return "NOT_NORMALIZED";
    case ErrorCode::LocalExistenceExceeded: return "LOCAL_EXISTENCE_EXCEEDED";
    case ErrorCode::TimeGridMismatch: return "TIME_GRID_MISMATCH";
    case ErrorCode::SpanDeficient: return "SPAN_DEFICIENT";
    case ErrorCode::DivisionByStructuralZero: return "DIVISION_BY_STRUCTURAL_ZERO";
    case ErrorCode::IllPosed: return "ILL_POSED";
    case ErrorCode::ControlDeficient: return "CONTROL_DEFICIENT";
    case ErrorCode::NotInControlSpan: return "NOT_IN_CONTROL_SPAN";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::ConfigError: return "CONFIG_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace nlsctl
