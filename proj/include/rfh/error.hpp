#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfh {

enum class ErrorCode {
  InvalidArgument,
  ZeroEigenvalue,
  DimensionMismatch,
  QuadratureUnderresolved,
  NoZeroCrossing,
  MultipleCrossings,
  NotACircle,
  NewtonStagnation,
  WindowEmpty,
  PersistentDegeneracy,
  DegenerateHessian,
  BlowUp,
  IndexGapInvalid,
  NoConvergence,
  BoundarySquareNonzero,
  MissingCounts,
  UnboundedDifference,
  IndexMismatch,
  ChainMapViolation,
  NonConvergence,
  ParseError,
  ValidationError,
  MissingArtifact,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the engine; `code()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rfh
