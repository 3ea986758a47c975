#include "impzone/admissible.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace impzone {

namespace {

using Index = Eigen::Index;

Matrix unit(Index size, int i, int j) {
  Matrix e = Matrix::Zero(size, size);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

struct Assembly {
  std::vector<Index> y1_block;
  std::vector<Index> y2_block;  // -1 when the second multiplier is empty
};

Index certificate_vars(const MarkovLukasz& ml) {
  return static_cast<Index>(ml.y1_free().size() + ml.y2_entries().size());
}

// Adds both Markov-Lukasz blocks for one facet with coefficients p = p0 + PL z,
// z occupying variables [z_off, z_off + PL.cols()). Free certificate entries are
// taken from next_var onward; t_var >= 0 subtracts t I from each block.
void add_facet_blocks(LmiProblem& prob, const MarkovLukasz& ml, const Vector& p0, const Matrix& PL, Index z_off,
                      Index& next_var, Index t_var, Assembly& out) {
  const int m = ml.half();
  const Index s1 = m + 1;
  const Index s2 = m;

  Matrix c1 = Matrix::Zero(s1, s1);
  for (int d = 0; d <= 2 * m; ++d) {
    const auto& pv = ml.y1_pivot(d);
    c1 += (p0(d) / pv.mult) * unit(s1, pv.i, pv.j);
  }
  const Index b1 = prob.add_block(c1);
  const Index b2 = s2 > 0 ? prob.add_block(Matrix::Zero(s2, s2)) : -1;
  out.y1_block.push_back(b1);
  out.y2_block.push_back(b2);

  for (Index k = 0; k < PL.cols(); ++k) {
    Matrix f = Matrix::Zero(s1, s1);
    for (int d = 0; d <= 2 * m; ++d) {
      const auto& pv = ml.y1_pivot(d);
      f += (PL(d, k) / pv.mult) * unit(s1, pv.i, pv.j);
    }
    if (!f.isZero(0.0)) prob.add_term(b1, z_off + k, f);
  }
  for (const auto& e : ml.y1_free()) {
    const auto& pv = ml.y1_pivot(e.i + e.j);
    prob.add_term(b1, next_var, unit(s1, e.i, e.j) - (e.mult / pv.mult) * unit(s1, pv.i, pv.j));
    ++next_var;
  }
  for (const auto& e : ml.y2_entries()) {
    prob.add_term(b2, next_var, unit(s2, e.i, e.j));
    Matrix f = Matrix::Zero(s1, s1);
    for (int off = 0; off <= 2; ++off) {
      const auto& pv = ml.y1_pivot(e.i + e.j + off);
      f -= (e.mult * ml.l2_weight(off) / pv.mult) * unit(s1, pv.i, pv.j);
    }
    prob.add_term(b1, next_var, f);
    ++next_var;
  }
  if (t_var >= 0) {
    prob.add_term(b1, t_var, -Matrix::Identity(s1, s1));
    if (b2 >= 0) prob.add_term(b2, t_var, -Matrix::Identity(s2, s2));
  }
}

// Coefficient map of facet i restricted to x = x0 + L z, padded.
void facet_map(const SpectrahedronSet& S, Index i, const Vector& x0, const Matrix& L, Vector& p0, Matrix& PL) {
  const PolynomialLift& lift = S.lift();
  const Index rows = S.ml().degree() + 1;
  p0 = Vector::Zero(rows);
  PL = Matrix::Zero(rows, L.cols());
  p0.head(lift.degree + 1) = lift.M[static_cast<std::size_t>(i)] * x0 + lift.c[static_cast<std::size_t>(i)];
  PL.topRows(lift.degree + 1) = lift.M[static_cast<std::size_t>(i)] * L;
  p0 = S.to_unit() * p0;
  PL = S.to_unit() * PL;
}

SdpResult solve_checked(const SpectrahedronSet& S, const LmiProblem& prob, const char* what) {
  SdpResult r = S.solver().solve(prob);
  if (r.status == SdpStatus::Unbounded) {
    throw Error(ErrorCode::SolverFailure, std::string(what) + ": unbounded (ambient set not compact?)");
  }
  if (!r.optimal()) {
    throw Error(ErrorCode::SolverFailure, std::string(what) + ": SDP status " + std::string(to_string(r.status)));
  }
  return r;
}

// Ambient rows  v - H (x0 + L z) - t >= 0  (rows are unit norm).
void add_ambient_rows(LmiProblem& prob, const Polytope& Y, const Vector& x0, const Matrix& L, Index z_off, Index t_var) {
  for (Index i = 0; i < Y.num_facets(); ++i) {
    RowVector row = RowVector::Zero(prob.num_variables());
    row.segment(z_off, L.cols()) = -Y.H().row(i) * L;
    if (t_var >= 0) row(t_var) = -1.0;
    prob.add_linear_inequality(Y.v()(i) - Y.H().row(i).dot(x0), row);
  }
}

}  // namespace

double polyval(const Vector& coeffs, double w) {
  double acc = 0.0;
  for (Index d = coeffs.size(); d-- > 0;) acc = acc * w + coeffs(d);
  return acc;
}

Vector PolynomialLift::coefficients(Index facet, const Vector& x) const {
  return M[static_cast<std::size_t>(facet)] * x + c[static_cast<std::size_t>(facet)];
}

double PolynomialLift::evaluate(Index facet, const Vector& x, double w) const {
  return polyval(coefficients(facet, x), w);
}

PolynomialLift build_lift(const ModalDecomposition& md, const Polytope& Y, double period) {
  if (Y.dim() != md.dim()) throw Error(ErrorCode::DimensionMismatch, "ambient polytope dimension differs from A");
  if (!(period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  PolynomialLift lift;
  lift.etas = md.etas();
  lift.rho = md.rho();
  lift.shift = std::max(0L, lift.etas.back());
  lift.degree = static_cast<int>(lift.shift - lift.etas.front());
  lift.a = std::exp(-period / static_cast<double>(lift.rho));
  lift.b = 1.0;
  const Index n = md.dim();
  for (Index i = 0; i < Y.num_facets(); ++i) {
    Matrix Mi = Matrix::Zero(lift.degree + 1, n);
    Vector ci = Vector::Zero(lift.degree + 1);
    for (std::size_t r = 0; r < lift.etas.size(); ++r) {
      Mi.row(lift.exponent(r)) -= Y.H().row(i) * md.modal_matrices()[r];
    }
    ci(lift.shift) = Y.v()(i);
    lift.M.push_back(std::move(Mi));
    lift.c.push_back(std::move(ci));
  }
  return lift;
}

MarkovLukasz::MarkovLukasz(int degree, double a, double b) : m_((degree + 1) / 2), a_(a), b_(b) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  if (!(a < b)) throw Error(ErrorCode::InvalidArgument, "interval must satisfy a < b");
  for (int d = 0; d <= 2 * m_; ++d) {
    const int i = d <= m_ ? 0 : d - m_;
    const int j = d - i;
    y1_pivot_.push_back({i, j, i == j ? 1.0 : 2.0});
  }
  for (int i = 0; i <= m_; ++i) {
    for (int j = i; j <= m_; ++j) {
      const auto& pv = y1_pivot_[static_cast<std::size_t>(i + j)];
      if (pv.i == i && pv.j == j) continue;
      y1_free_.push_back({i, j, i == j ? 1.0 : 2.0});
    }
  }
  for (int i = 0; i < m_; ++i) {
    for (int j = i; j < m_; ++j) y2_entries_.push_back({i, j, i == j ? 1.0 : 2.0});
  }
}

double MarkovLukasz::l2_weight(int offset) const {
  switch (offset) {
    case 0: return -a_ * b_;
    case 1: return a_ + b_;
    case 2: return -1.0;
    default: return 0.0;
  }
}

Vector MarkovLukasz::lambda1(const Matrix& Y1) const {
  if (Y1.rows() != m_ + 1 || Y1.cols() != m_ + 1) throw Error(ErrorCode::DimensionMismatch, "Y1 has wrong size");
  Vector p = Vector::Zero(2 * m_ + 1);
  for (Index i = 0; i <= m_; ++i) {
    for (Index j = 0; j <= m_; ++j) p(i + j) += Y1(i, j);
  }
  return p;
}

Vector MarkovLukasz::lambda2(const Matrix& Y2) const {
  if (Y2.rows() != m_ || Y2.cols() != m_) throw Error(ErrorCode::DimensionMismatch, "Y2 has wrong size");
  Vector p = Vector::Zero(2 * m_ + 1);
  for (Index i = 0; i < m_; ++i) {
    for (Index j = 0; j < m_; ++j) {
      for (int off = 0; off <= 2; ++off) p(i + j + off) += l2_weight(off) * Y2(i, j);
    }
  }
  return p;
}

MarkovLukasz ml_adjoints(int degree, double a, double b) { return MarkovLukasz(degree, a, b); }

SpectrahedronSet::SpectrahedronSet(ModalDecomposition md, Polytope ambient, double period,
                                   AdmissibilityOptions options, const SdpSolver& solver)
    : md_(std::move(md)),
      ambient_(std::move(ambient)),
      period_(period),
      lift_(build_lift(md_, ambient_, period)),
      ml_(lift_.degree, lift_.a, lift_.b),
      unit_ml_(lift_.degree, 0.0, 1.0),
      options_(options),
      solver_(&solver) {
  if (ambient_.is_empty()) throw Error(ErrorCode::EmptyPolytope, "ambient set is empty");
  const int deg = ml_.degree();
  const double a = lift_.a;
  const double h = lift_.b - lift_.a;
  // binom(k, j) table
  Matrix binom = Matrix::Zero(deg + 1, deg + 1);
  for (int k = 0; k <= deg; ++k) {
    binom(k, 0) = 1.0;
    for (int j = 1; j <= k; ++j) binom(k, j) = binom(k - 1, j - 1) + (j <= k - 1 ? binom(k - 1, j) : 0.0);
  }
  // w^k = (a + h s)^k = sum_j binom(k, j) a^(k-j) h^j s^j
  to_unit_ = Matrix::Zero(deg + 1, deg + 1);
  for (int k = 0; k <= deg; ++k) {
    for (int j = 0; j <= k; ++j) to_unit_(j, k) = binom(k, j) * std::pow(a, k - j) * std::pow(h, j);
  }
  // s^k = ((w - a) / h)^k = sum_j binom(k, j) (-a)^(k-j) w^j / h^k
  const int m = ml_.half();
  Matrix s_in_w = Matrix::Zero(m + 1, m + 1);
  for (int k = 0; k <= m; ++k) {
    for (int j = 0; j <= k; ++j) s_in_w(k, j) = binom(k, j) * std::pow(-a, k - j) / std::pow(h, k);
  }
  basis1_ = s_in_w;
  basis2_ = s_in_w.topLeftCorner(m, m);
}

FacetCertificate SpectrahedronSet::from_unit(const Matrix& Y1, const Matrix& Y2, double margin) const {
  const double h = lift_.b - lift_.a;
  FacetCertificate c;
  c.Y1 = basis1_.transpose() * Y1 * basis1_;
  c.Y2 = basis2_.transpose() * Y2 * basis2_ / (h * h);
  c.margin = margin;
  return c;
}

Vector SpectrahedronSet::padded_coefficients(Index facet, const Vector& x) const {
  Vector p = Vector::Zero(ml_.degree() + 1);
  p.head(lift_.degree + 1) = lift_.coefficients(facet, x);
  return p;
}

AdmissibilityResult is_admissible(const SpectrahedronSet& S, const Vector& x) {
  if (x.size() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "state dimension differs from the set");
  AdmissibilityResult res;
  const Polytope& Y = S.ambient();
  if (Y.num_facets() > 0 && Y.max_violation(x) > S.options().slack_tol) {
    res.margin = -Y.max_violation(x);
    return res;
  }
  res.in_ambient = true;
  res.margin = std::numeric_limits<double>::infinity();
  const MarkovLukasz& ml = S.unit_ml();
  const Index nvars = certificate_vars(ml) + 1;
  const Matrix none(ml.degree() + 1, 0);
  for (Index i = 0; i < Y.num_facets(); ++i) {
    LmiProblem prob(nvars);
    const Index t_var = nvars - 1;
    prob.objective()(t_var) = 1.0;
    Index next = 0;
    Assembly as;
    add_facet_blocks(prob, ml, S.to_unit() * S.padded_coefficients(i, x), none, 0, next, t_var, as);
    const SdpResult r = solve_checked(S, prob, "membership");
    const double t = r.y(t_var);
    const Index m = ml.half();
    const Matrix y1 = r.slack[static_cast<std::size_t>(as.y1_block[0])] + t * Matrix::Identity(m + 1, m + 1);
    const Matrix y2 = as.y2_block[0] >= 0 ? Matrix(r.slack[static_cast<std::size_t>(as.y2_block[0])] +
                                                   t * Matrix::Identity(m, m))
                                          : Matrix(0, 0);
    FacetCertificate cert = S.from_unit(y1, y2, t);
    res.margin = std::min(res.margin, t);
    res.certificates.push_back(std::move(cert));
  }
  if (Y.num_facets() == 0) res.margin = std::numeric_limits<double>::infinity();
  res.admissible = res.margin >= -S.options().slack_tol;
  res.marginal = res.admissible && res.margin < S.options().marginal_tol;
  return res;
}

bool grid_oracle(const ModalDecomposition& md, const Polytope& Y, const Vector& x, double period, int samples,
                 double tol) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "grid oracle needs at least two samples");
  if (Y.is_empty()) return false;
  for (int k = 0; k < samples; ++k) {
    const double t = period * static_cast<double>(k) / static_cast<double>(samples - 1);
    if (!contains(Y, md.free_response(x, t), tol)) return false;
  }
  return true;
}

InteriorPoint interior_point(const SpectrahedronSet& S) {
  const Index n = S.dim();
  const Index nvars = n + S.ambient().num_facets() * certificate_vars(S.unit_ml()) + 1;
  const Index t_var = nvars - 1;
  LmiProblem prob(nvars);
  prob.objective()(t_var) = 1.0;
  const Vector x0 = Vector::Zero(n);
  const Matrix L = Matrix::Identity(n, n);
  Index next = n;
  Assembly as;
  for (Index i = 0; i < S.ambient().num_facets(); ++i) {
    Vector p0;
    Matrix PL;
    facet_map(S, i, x0, L, p0, PL);
    add_facet_blocks(prob, S.unit_ml(), p0, PL, 0, next, t_var, as);
  }
  add_ambient_rows(prob, S.ambient(), x0, L, 0, t_var);
  RowVector cap = RowVector::Zero(nvars);
  cap(t_var) = -1.0;
  prob.add_linear_inequality(1.0, cap);
  const SdpResult r = solve_checked(S, prob, "interior point");
  return {r.y.head(n), r.y(t_var)};
}

SliceOptimum best_point_on_slice(const SpectrahedronSet& S, const Vector& x0, const Matrix& L, const Polytope& Z) {
  if (x0.size() != S.dim() || L.rows() != S.dim() || Z.dim() != L.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "slice parametrization dimensions disagree");
  }
  if (Z.is_empty()) throw Error(ErrorCode::EmptyPolytope, "slice parameter set is empty");
  const Index nz = L.cols();
  const Index nvars = nz + S.ambient().num_facets() * certificate_vars(S.unit_ml()) + 1;
  const Index t_var = nvars - 1;
  LmiProblem prob(nvars);
  prob.objective()(t_var) = 1.0;
  Index next = nz;
  Assembly as;
  for (Index i = 0; i < S.ambient().num_facets(); ++i) {
    Vector p0;
    Matrix PL;
    facet_map(S, i, x0, L, p0, PL);
    add_facet_blocks(prob, S.unit_ml(), p0, PL, 0, next, t_var, as);
  }
  add_ambient_rows(prob, S.ambient(), x0, L, 0, t_var);
  for (Index i = 0; i < Z.num_facets(); ++i) {
    RowVector row = RowVector::Zero(nvars);
    row.head(nz) = -Z.H().row(i);
    prob.add_linear_inequality(Z.v()(i), row);
  }
  RowVector cap = RowVector::Zero(nvars);
  cap(t_var) = -1.0;
  prob.add_linear_inequality(1.0, cap);
  const SdpResult r = solve_checked(S, prob, "slice margin");
  return {r.y.head(nz), r.y(t_var)};
}

Vector support_point(const SpectrahedronSet& S, const Vector& direction) {
  const Index n = S.dim();
  if (direction.size() != n) throw Error(ErrorCode::DimensionMismatch, "direction dimension differs");
  if (direction.isZero(0.0)) return interior_point(S).x;
  const Index nvars = n + S.ambient().num_facets() * certificate_vars(S.unit_ml());
  LmiProblem prob(nvars);
  prob.objective().head(n) = direction;
  const Vector x0 = Vector::Zero(n);
  const Matrix L = Matrix::Identity(n, n);
  Index next = n;
  Assembly as;
  for (Index i = 0; i < S.ambient().num_facets(); ++i) {
    Vector p0;
    Matrix PL;
    facet_map(S, i, x0, L, p0, PL);
    add_facet_blocks(prob, S.unit_ml(), p0, PL, 0, next, -1, as);
  }
  add_ambient_rows(prob, S.ambient(), x0, L, 0, -1);
  const SdpResult r = solve_checked(S, prob, "support point");
  return r.y.head(n);
}

PointList sample_directions(Index dim, int count, unsigned seed) {
  PointList out;
  if (dim == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
    return out;
  }
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      out.push_back((Vector(2) << std::cos(th), std::sin(th)).finished());
    }
    return out;
  }
  if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double y = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double phi = golden * k;
      out.push_back((Vector(3) << r * std::cos(phi), y, r * std::sin(phi)).finished());
    }
    return out;
  }
  std::mt19937 gen(seed);
  std::normal_distribution<double> g;
  for (int k = 0; k < count; ++k) {
    Vector d(dim);
    for (Index i = 0; i < dim; ++i) d(i) = g(gen);
    out.push_back(d.normalized());
  }
  return out;
}

Polytope inner_polytope(const SpectrahedronSet& S, const InnerPolytopeOptions& options) {
  const Index n = S.dim();
  if (n > 3) throw Error(ErrorCode::UnsupportedDimension, "inner approximation needs dimension <= 3");
  if (options.directions < n + 1) throw Error(ErrorCode::InvalidArgument, "need at least n+1 directions");
  const InteriorPoint center = interior_point(S);
  if (center.margin <= 1e-9) {
    throw Error(ErrorCode::DegenerateHull, "admissible set has empty interior (margin " +
                                               std::to_string(center.margin) + ")");
  }
  PointList pts;
  for (const auto& dir : sample_directions(n, options.directions, options.seed)) {
    const Vector p = support_point(S, dir);
    Vector q = center.x;
    for (double delta = options.shrink; delta < 1.0; delta *= 10.0) {
      const Vector cand = center.x + (1.0 - delta) * (p - center.x);
      if (is_admissible(S, cand).admissible) {
        q = cand;
        break;
      }
    }
    pts.push_back(q);
  }
  return Polytope::hull(pts);
}

}  // namespace impzone
