#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rigcov {

/// Failure categories surfaced by the library. The CLI maps validation-type
/// kinds to exit code 1 and everything else to exit code 2.
enum class ErrorKind {
  kInvalidInput,
  kInvalidStep,
  kDegenerateEdge,
  kDegenerateSites,
  kDegenerateMass,
  kRecoveryInfeasible,
  kUnsupportedDimension,
  kNoSteadyState,
  kNotStabilizable,
  kInvalidScaling,
  kTerminalSetEmpty,
  kInfeasible,
  kRecursiveFeasibilityViolation,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidStep: return "invalid-step";
    case ErrorKind::kDegenerateEdge: return "degenerate-edge";
    case ErrorKind::kDegenerateSites: return "degenerate-sites";
    case ErrorKind::kDegenerateMass: return "degenerate-mass";
    case ErrorKind::kRecoveryInfeasible: return "recovery-infeasible";
    case ErrorKind::kUnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::kNoSteadyState: return "no-steady-state";
    case ErrorKind::kNotStabilizable: return "not-stabilizable";
    case ErrorKind::kInvalidScaling: return "invalid-scaling";
    case ErrorKind::kTerminalSetEmpty: return "terminal-set-empty";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kRecursiveFeasibilityViolation:
      return "recursive-feasibility-violation";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace rigcov
