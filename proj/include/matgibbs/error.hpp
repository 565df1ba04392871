#pragma once

#include <stdexcept>
#include <string>

namespace matgibbs {

// Values double as CLI exit codes; 1 is reserved for "ran, but an asserted
// invariant failed".
enum class ErrorCode : int {
  kInvalidArgument = 2,
  kInvalidWord = 3,
  kBudgetExceeded = 4,
  kNotIrreducible = 5,
  kNonSimpleDominant = 6,
  kNotConeNonnegative = 7,
  kNotInvertible = 8,
  kInvalidExponent = 9,
  kDimensionBudget = 10,
  kPrecondition = 11,
  kOverflow = 12,
  kConfig = 13,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace matgibbs
