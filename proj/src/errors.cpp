#include "hitchin/errors.hpp"

namespace hitchin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AtBranchPoint: return "AtBranchPoint";
    case ErrorCode::PathBlocked: return "PathBlocked";
    case ErrorCode::DegenerateModel: return "DegenerateModel";
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorCode::ContinuationStalled: return "ContinuationStalled";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::SheetCollision: return "SheetCollision";
    case ErrorCode::NearDiscriminant: return "NearDiscriminant";
    case ErrorCode::SheetMatchFailed: return "SheetMatchFailed";
    case ErrorCode::DegenerateDivisor: return "DegenerateDivisor";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::FDUnstable: return "FDUnstable";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidCurve:
    case ErrorCode::UnsupportedFamily:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::AtBranchPoint:
    case ErrorCode::PathBlocked:
    case ErrorCode::DegenerateModel:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace hitchin
