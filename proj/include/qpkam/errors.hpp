#ifndef QPKAM_ERRORS_HPP
#define QPKAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qpkam {

// Structured failure classes. The solver front end maps these onto flagged
// outcomes (a failed run is data); only genuine usage/IO errors become
// nonzero process exit codes.
enum class ErrorCode {
  DimensionMismatch,
  AliasingBudgetExceeded,
  SymmetryViolation,
  NearSingular,
  NonzeroAverage,
  ResonantMode,
  DegenerateFrequency,
  CompositionDomainExceeded,
  NeumannDivergence,
  NondegeneracyLost,
  NoConvergence,
  InsufficientHistory,
  BoundViolated,
  ParseError,
  ValidationError,
  FormatError,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qpkam

#endif
