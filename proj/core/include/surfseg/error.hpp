#pragma once

#include <stdexcept>
#include <string>

namespace surfseg {

/// Structured error codes. InputError-class codes map to CLI exit 2,
/// NumericError-class codes to exit 3.
enum class ErrorCode {
  NegativeValue,
  NonFinite,
  DegenerateColumn,
  ConstantColumn,
  NonPositiveSigma,
  NegativeWeight,
  SolveFailure,
  TruthOutOfRange,
  NotADistribution,
  NonFiniteGradient,
  LengthMismatch,
  ExtentMismatch,
  EmptyRegion,
  EmptySplit,
  SpecInfeasible,
  TrainingDiverged,
  BadConfig,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  /// True for failures of numerical routines (solver breakdown,
  /// non-finite gradients, training divergence) as opposed to bad input.
  bool numeric() const {
    switch (code_) {
      case ErrorCode::SolveFailure:
      case ErrorCode::NonFiniteGradient:
      case ErrorCode::TrainingDiverged:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorCode code_;
};

}  // namespace surfseg
