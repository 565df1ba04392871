#include "matgibbs/error.hpp"

namespace matgibbs {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidWord: return "invalid-word";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
    case ErrorCode::kNotIrreducible: return "not-irreducible";
    case ErrorCode::kNonSimpleDominant: return "non-simple-dominant";
    case ErrorCode::kNotConeNonnegative: return "not-cone-nonnegative";
    case ErrorCode::kNotInvertible: return "not-invertible";
    case ErrorCode::kInvalidExponent: return "invalid-exponent";
    case ErrorCode::kDimensionBudget: return "dimension-budget";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace matgibbs
