#include "impzone/error.hpp"

namespace impzone {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonRationalEigenvalue: return "NonRationalEigenvalue";
    case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorCode::RepeatedEigenvalue: return "RepeatedEigenvalue";
    case ErrorCode::IllConditionedEigenbasis: return "IllConditionedEigenbasis";
    case ErrorCode::SingularMap: return "SingularMap";
    case ErrorCode::EmptyPolytope: return "EmptyPolytope";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::DegenerateHull: return "DegenerateHull";
    case ErrorCode::SingularEquilibriumMap: return "SingularEquilibriumMap";
    case ErrorCode::InfeasibleProblem: return "InfeasibleProblem";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace impzone
