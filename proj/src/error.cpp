#include "rfh/error.hpp"

namespace rfh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::QuadratureUnderresolved: return "QuadratureUnderresolved";
    case ErrorCode::NoZeroCrossing: return "NoZeroCrossing";
    case ErrorCode::MultipleCrossings: return "MultipleCrossings";
    case ErrorCode::NotACircle: return "NotACircle";
    case ErrorCode::NewtonStagnation: return "NewtonStagnation";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::PersistentDegeneracy: return "PersistentDegeneracy";
    case ErrorCode::DegenerateHessian: return "DegenerateHessian";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::IndexGapInvalid: return "IndexGapInvalid";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BoundarySquareNonzero: return "BoundarySquareNonzero";
    case ErrorCode::MissingCounts: return "MissingCounts";
    case ErrorCode::UnboundedDifference: return "UnboundedDifference";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::ChainMapViolation: return "ChainMapViolation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

}  // namespace rfh
