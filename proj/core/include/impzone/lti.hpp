#pragma once

#include <complex>
#include <vector>

#include "impzone/polytope.hpp"
#include "impzone/types.hpp"

namespace impzone {

/// Linear flow x' = A x between impulse times kT; at each impulse time the
/// input chosen one period earlier is added through B.
struct ImpulsiveSystem {
  Matrix A;
  Matrix B;
  double period = 1.0;
  Polytope state_set;
  Polytope input_set;

  ImpulsiveSystem() = default;
  /// Validates dimensions, T > 0, a nonempty state set and 0 in the input set.
  ImpulsiveSystem(Matrix A, Matrix B, double period, Polytope state_set, Polytope input_set);

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
};

struct RationalSpectrum {
  std::vector<long> etas;  // sorted increasing
  long rho = 1;
};

struct RationalizeOptions {
  double tol = 1e-6;
  long max_denominator = 1000;
};

RationalSpectrum rationalize_spectrum(const std::vector<std::complex<double>>& eigs,
                                      const RationalizeOptions& options = {});
RationalSpectrum rationalize_spectrum(const std::vector<double>& eigs, const RationalizeOptions& options = {});

/// Best rational approximation p/q with q <= max_denominator via continued
/// fractions; returns false when none is within tol.
bool rational_approximation(double value, double tol, long max_denominator, long& p, long& q);

struct ModalOptions {
  RationalizeOptions rational;
  double max_condition = 1e8;
};

/// Exact transition matrix in modal form: Phi(t) = sum_r phi_r exp(eta_r t / rho).
class ModalDecomposition {
 public:
  ModalDecomposition(const Matrix& A, const ModalOptions& options = {});

  Eigen::Index dim() const { return static_cast<Eigen::Index>(modal_.size()); }
  const std::vector<long>& etas() const { return spectrum_.etas; }
  long rho() const { return spectrum_.rho; }
  double eigenvalue(std::size_t r) const { return static_cast<double>(spectrum_.etas[r]) / spectrum_.rho; }
  const std::vector<Matrix>& modal_matrices() const { return modal_; }
  double eigenbasis_condition() const { return condition_; }

  Matrix transition(double t) const;
  Vector free_response(const Vector& x0, double t) const;

 private:
  RationalSpectrum spectrum_;
  std::vector<Matrix> modal_;
  double condition_ = 1.0;
};

ModalDecomposition modal_decompose(const ImpulsiveSystem& sys, const ModalOptions& options = {});

/// x(tau_{k+1}) = Ad x(tau_k) + Bd u(tau_k).
struct DiscreteSystem {
  Matrix Ad;
  Matrix Bd;

  Vector step(const Vector& x, const Vector& u) const { return Ad * x + Bd * u; }
};

DiscreteSystem discretize(const ImpulsiveSystem& sys, const ModalOptions& options = {});
DiscreteSystem discretize(const ImpulsiveSystem& sys, const ModalDecomposition& md);

Vector free_response(const ModalDecomposition& md, const Vector& x0, double t);

}  // namespace impzone
