#include "qpkam/errors.hpp"

namespace qpkam {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::AliasingBudgetExceeded: return "AliasingBudgetExceeded";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NonzeroAverage: return "NonzeroAverage";
    case ErrorCode::ResonantMode: return "ResonantMode";
    case ErrorCode::DegenerateFrequency: return "DegenerateFrequency";
    case ErrorCode::CompositionDomainExceeded: return "CompositionDomainExceeded";
    case ErrorCode::NeumannDivergence: return "NeumannDivergence";
    case ErrorCode::NondegeneracyLost: return "NondegeneracyLost";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace qpkam
