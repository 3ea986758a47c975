#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace impzone {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NonRationalEigenvalue,
  ComplexSpectrum,
  RepeatedEigenvalue,
  IllConditionedEigenbasis,
  SingularMap,
  EmptyPolytope,
  UnsupportedDimension,
  NoConvergence,
  EmptyResult,
  SolverFailure,
  DegenerateHull,
  SingularEquilibriumMap,
  InfeasibleProblem,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure reported by the library. The code is
/// stable and is what the command line tool maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// message without the code prefix
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace impzone
