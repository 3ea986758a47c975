#pragma once

#include <vector>

#include "impzone/lti.hpp"
#include "impzone/polytope.hpp"
#include "impzone/sdp.hpp"

namespace impzone {

/// Facet polynomials in w = exp(-t / rho) on [a, b] = [W, 1]:
///   P_i(w) = sum_d (M_i x + c_i)_d w^d  and  P_i(exp(-t/rho)) exp(shift t/rho) = v_i - h_i Phi(t) x.
struct PolynomialLift {
  std::vector<long> etas;
  long rho = 1;
  long shift = 0;  // max(0, eta_n)
  int degree = 0;  // shift - eta_1
  double a = 0.0;  // W = exp(-T / rho)
  double b = 1.0;
  std::vector<Matrix> M;
  std::vector<Vector> c;

  Eigen::Index num_facets() const { return static_cast<Eigen::Index>(M.size()); }
  Eigen::Index dim() const { return M.empty() ? 0 : M.front().cols(); }
  int exponent(std::size_t r) const { return static_cast<int>(shift - etas[r]); }

  Vector coefficients(Eigen::Index facet, const Vector& x) const;
  double evaluate(Eigen::Index facet, const Vector& x, double w) const;
};

PolynomialLift build_lift(const ModalDecomposition& md, const Polytope& Y, double period);

/// Evaluates sum_d coeffs(d) w^d.
double polyval(const Vector& coeffs, double w);

/// Markov-Lukasz parametrization of polynomials of even degree 2m that are
/// nonnegative on [a, b]:  p = L1(Y1) + L2(Y2), Y1 (m+1)x(m+1), Y2 m x m, both PSD.
/// An odd degree is padded by one.
class MarkovLukasz {
 public:
  struct Entry {
    int i;
    int j;
    double mult;  // 1 on the diagonal, 2 off it
  };

  MarkovLukasz(int degree, double a, double b);

  int degree() const { return 2 * m_; }
  int half() const { return m_; }
  double a() const { return a_; }
  double b() const { return b_; }

  Vector lambda1(const Matrix& Y1) const;
  Vector lambda2(const Matrix& Y2) const;
  Vector apply(const Matrix& Y1, const Matrix& Y2) const { return lambda1(Y1) + lambda2(Y2); }

  /// Upper-triangle entries of Y1 that stay free once the coefficient
  /// equalities are solved for one pivot entry per antidiagonal.
  const std::vector<Entry>& y1_free() const { return y1_free_; }
  const Entry& y1_pivot(int d) const { return y1_pivot_[static_cast<std::size_t>(d)]; }
  const std::vector<Entry>& y2_entries() const { return y2_entries_; }
  /// Coefficients of (w-a)(b-w) w^k: degrees k, k+1, k+2.
  double l2_weight(int offset) const;

 private:
  int m_;
  double a_;
  double b_;
  std::vector<Entry> y1_free_;
  std::vector<Entry> y1_pivot_;
  std::vector<Entry> y2_entries_;
};

MarkovLukasz ml_adjoints(int degree, double a, double b);

struct AdmissibilityOptions {
  /// Accept when the certified margin is at least -slack_tol.
  double slack_tol = 1e-7;
  /// Accepted points with margin below this are flagged marginal.
  double marginal_tol = 1e-5;
};

struct FacetCertificate {
  Matrix Y1;
  Matrix Y2;
  double margin = 0.0;
};

struct AdmissibilityResult {
  bool admissible = false;
  bool marginal = false;
  bool in_ambient = false;
  /// Smallest certified margin over facets (meaningful when in_ambient).
  double margin = 0.0;
  std::vector<FacetCertificate> certificates;
};

/// Exact admissible subset of an ambient polytope Y: states whose free
/// response stays in Y over one period.
class SpectrahedronSet {
 public:
  SpectrahedronSet(ModalDecomposition md, Polytope ambient, double period, AdmissibilityOptions options = {},
                   const SdpSolver& solver = default_sdp_solver());

  const ModalDecomposition& modal() const { return md_; }
  const Polytope& ambient() const { return ambient_; }
  const PolynomialLift& lift() const { return lift_; }
  const MarkovLukasz& ml() const { return ml_; }
  double period() const { return period_; }
  Eigen::Index dim() const { return ambient_.dim(); }
  const AdmissibilityOptions& options() const { return options_; }
  const SdpSolver& solver() const { return *solver_; }

  /// Lift coefficients padded to the Markov-Lukasz degree.
  Vector padded_coefficients(Eigen::Index facet, const Vector& x) const;

  /// Certificates are computed for q(s) = p(a + (b - a) s) on [0, 1], where the
  /// monomial basis is far better conditioned, and mapped back exactly.
  const MarkovLukasz& unit_ml() const { return unit_ml_; }
  /// Coefficients of q from coefficients of p.
  const Matrix& to_unit() const { return to_unit_; }
  /// Maps certificates on [0, 1] to certificates on [a, b].
  FacetCertificate from_unit(const Matrix& Y1, const Matrix& Y2, double margin) const;

 private:
  ModalDecomposition md_;
  Polytope ambient_;
  double period_;
  PolynomialLift lift_;
  MarkovLukasz ml_;
  MarkovLukasz unit_ml_;
  Matrix to_unit_;
  Matrix basis1_;  // s-monomials in terms of w-monomials, sizes m+1 and m
  Matrix basis2_;
  AdmissibilityOptions options_;
  const SdpSolver* solver_;
};

AdmissibilityResult is_admissible(const SpectrahedronSet& S, const Vector& x);

/// True iff the free response stays in Y (within tol) on a uniform grid of [0, T].
bool grid_oracle(const ModalDecomposition& md, const Polytope& Y, const Vector& x, double period, int samples,
                 double tol = 1e-9);

/// max direction'x over S.
Vector support_point(const SpectrahedronSet& S, const Vector& direction);

struct InteriorPoint {
  Vector x;
  double margin = 0.0;
};

/// Point of S maximizing the smallest certificate eigenvalue and ambient slack.
InteriorPoint interior_point(const SpectrahedronSet& S);

/// Best point x = x0 + L z with z in Z: maximizes the certified margin.
struct SliceOptimum {
  Vector z;
  double margin = 0.0;
};
SliceOptimum best_point_on_slice(const SpectrahedronSet& S, const Vector& x0, const Matrix& L, const Polytope& Z);

struct InnerPolytopeOptions {
  int directions = 16;
  unsigned seed = 0;
  /// Relative pull of each support point toward the interior point.
  double shrink = 1e-6;
};

/// Unit directions: uniform angles in 2D, Fibonacci sphere in 3D, +-1 in 1D.
PointList sample_directions(Eigen::Index dim, int count, unsigned seed = 0);

Polytope inner_polytope(const SpectrahedronSet& S, const InnerPolytopeOptions& options = {});
inline Polytope inner_polytope(const SpectrahedronSet& S, int K) {
  InnerPolytopeOptions o;
  o.directions = K;
  return inner_polytope(S, o);
}

}  // namespace impzone
