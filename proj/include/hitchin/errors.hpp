#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitchin {

enum class ErrorCode {
  // input / validation
  InvalidArgument,
  InvalidCurve,
  UnsupportedFamily,
  ShapeMismatch,
  AtBranchPoint,
  PathBlocked,
  DegenerateModel,
  // numeric
  ZeroPolynomial,
  DegenerateLeadingCoefficient,
  ContinuationStalled,
  QuadratureNotConverged,
  SheetCollision,
  NearDiscriminant,
  SheetMatchFailed,
  DegenerateDivisor,
  NoSolution,
  NewtonDiverged,
  FDUnstable,
};

std::string_view to_string(ErrorCode code);

// True for failures caused by malformed or out-of-contract input, false for
// failures of a numeric procedure on well-formed input.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hitchin
