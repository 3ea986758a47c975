#include "impzone/lti.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace impzone {

ImpulsiveSystem::ImpulsiveSystem(Matrix a, Matrix b, double t, Polytope x_set, Polytope u_set)
    : A(std::move(a)), B(std::move(b)), period(t), state_set(std::move(x_set)), input_set(std::move(u_set)) {
  if (A.rows() != A.cols() || A.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "A must be square");
  if (B.rows() != A.rows() || B.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "B must have n rows");
  if (!(period > 0.0) || !std::isfinite(period)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  if (state_set.dim() != A.rows()) throw Error(ErrorCode::DimensionMismatch, "state set dimension differs from A");
  if (input_set.dim() != B.cols()) throw Error(ErrorCode::DimensionMismatch, "input set dimension differs from B");
  if (state_set.is_empty() || !is_feasible(state_set)) throw Error(ErrorCode::InvalidArgument, "state set is empty");
  if (!contains(input_set, Vector::Zero(B.cols()), 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "input set must contain the origin");
  }
}

bool rational_approximation(double value, double tol, long max_denominator, long& p, long& q) {
  // Convergents h_k / k_k of the continued fraction of value.
  long h_prev = 1, h = static_cast<long>(std::floor(value));
  long k_prev = 0, k = 1;
  double frac = value - std::floor(value);
  for (int iter = 0; iter < 64; ++iter) {
    if (k > max_denominator) break;
    if (std::abs(value - static_cast<double>(h) / static_cast<double>(k)) < tol) {
      p = h;
      q = k;
      return true;
    }
    if (frac < 1e-15) break;
    const double inv = 1.0 / frac;
    const long a = static_cast<long>(std::floor(inv));
    frac = inv - static_cast<double>(a);
    const long h_next = a * h + h_prev;
    const long k_next = a * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return false;
}

RationalSpectrum rationalize_spectrum(const std::vector<std::complex<double>>& eigs,
                                      const RationalizeOptions& options) {
  std::vector<double> real;
  real.reserve(eigs.size());
  for (const auto& e : eigs) {
    if (std::abs(e.imag()) > options.tol) {
      throw Error(ErrorCode::ComplexSpectrum, "eigenvalue with imaginary part " + std::to_string(e.imag()));
    }
    real.push_back(e.real());
  }
  return rationalize_spectrum(real, options);
}

RationalSpectrum rationalize_spectrum(const std::vector<double>& eigs, const RationalizeOptions& options) {
  if (eigs.empty()) throw Error(ErrorCode::InvalidArgument, "empty spectrum");
  std::vector<double> sorted = eigs;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] <= options.tol) {
      throw Error(ErrorCode::RepeatedEigenvalue, "eigenvalues " + std::to_string(sorted[i - 1]) + " and " +
                                                     std::to_string(sorted[i]) + " coincide");
    }
  }
  long rho = 1;
  for (double e : sorted) {
    long p = 0, q = 1;
    if (!rational_approximation(e, options.tol, options.max_denominator, p, q)) {
      throw Error(ErrorCode::NonRationalEigenvalue,
                  "no rational p/q with q <= " + std::to_string(options.max_denominator) + " near " + std::to_string(e));
    }
    rho = std::lcm(rho, q);
  }
  RationalSpectrum out;
  out.rho = rho;
  for (double e : sorted) out.etas.push_back(std::lround(e * static_cast<double>(rho)));
  return out;
}

ModalDecomposition::ModalDecomposition(const Matrix& A, const ModalOptions& options) {
  if (A.rows() != A.cols() || A.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "A must be square");
  const Eigen::Index n = A.rows();
  Eigen::EigenSolver<Matrix> es(A, true);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "eigen decomposition failed");

  std::vector<std::complex<double>> eigs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  spectrum_ = rationalize_spectrum(eigs, options.rational);

  // Order eigenvectors by increasing eigenvalue to line up with the etas.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return es.eigenvalues()(a).real() < es.eigenvalues()(b).real(); });
  Matrix V(n, n);
  for (Eigen::Index i = 0; i < n; ++i) V.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]).real();

  const Eigen::JacobiSVD<Matrix> svd(V);
  const auto& sv = svd.singularValues();
  condition_ = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();
  if (!(condition_ <= options.max_condition)) {
    throw Error(ErrorCode::IllConditionedEigenbasis, "eigenvector matrix condition number " + std::to_string(condition_));
  }
  const Matrix Vinv = V.inverse();
  modal_.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) modal_.push_back(V.col(r) * Vinv.row(r));
}

Matrix ModalDecomposition::transition(double t) const {
  const Eigen::Index n = dim();
  Matrix phi = Matrix::Zero(n, n);
  for (std::size_t r = 0; r < modal_.size(); ++r) phi += modal_[r] * std::exp(eigenvalue(r) * t);
  return phi;
}

Vector ModalDecomposition::free_response(const Vector& x0, double t) const {
  Vector x = Vector::Zero(dim());
  for (std::size_t r = 0; r < modal_.size(); ++r) x += (modal_[r] * x0) * std::exp(eigenvalue(r) * t);
  return x;
}

ModalDecomposition modal_decompose(const ImpulsiveSystem& sys, const ModalOptions& options) {
  return ModalDecomposition(sys.A, options);
}

DiscreteSystem discretize(const ImpulsiveSystem& sys, const ModalDecomposition& md) {
  return DiscreteSystem{md.transition(sys.period), sys.B};
}

DiscreteSystem discretize(const ImpulsiveSystem& sys, const ModalOptions& options) {
  return discretize(sys, modal_decompose(sys, options));
}

Vector free_response(const ModalDecomposition& md, const Vector& x0, double t) { return md.free_response(x0, t); }

}  // namespace impzone
