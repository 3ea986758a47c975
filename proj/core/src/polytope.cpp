#include "impzone/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "impzone/lti.hpp"

namespace impzone {

namespace {

constexpr double kZeroRow = 1e-10;

LpProblem lp_over_polytope(const Polytope& P) {
  LpProblem lp = LpProblem::over(P.dim());
  lp.G = P.H();
  lp.h = P.v();
  return lp;
}

Vector solve_square(const Matrix& A, const Vector& b, bool& ok) {
  Eigen::FullPivLU<Matrix> lu(A);
  ok = lu.isInvertible();
  if (!ok) return Vector();
  return lu.solve(b);
}

// Calls f on every k-subset of {0..n-1}.
template <typename F>
void for_each_subset(Eigen::Index n, Eigen::Index k, F&& f) {
  if (k > n) return;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

void push_unique(PointList& pts, const Vector& p, double tol) {
  for (const auto& q : pts) {
    if ((q - p).lpNorm<Eigen::Infinity>() <= tol) return;
  }
  pts.push_back(p);
}

double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

PointList monotone_chain(PointList pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return a == b; }), pts.end());
  if (pts.size() < 3) return pts;
  // exact turn test first; near-collinear and near-duplicate vertices are pruned afterwards
  PointList h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], p) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  for (bool changed = true; changed && h.size() > 2;) {
    changed = false;
    for (std::size_t i = 0; i < h.size() && h.size() > 2; ++i) {
      const Vector& a = h[(i + h.size() - 1) % h.size()];
      const Vector& b = h[(i + 1) % h.size()];
      const double base = (b - a).norm();
      const double dist = base > tol ? std::abs(cross2(a, b, h[i])) / base : (h[i] - a).norm();
      if (dist <= tol) {
        h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return h;
}

Polytope eliminate_last(const Polytope& P, const LpSolver& lp) {
  const Eigen::Index n = P.dim();
  const Eigen::Index j = n - 1;
  const Matrix& H = P.H();
  const Vector& v = P.v();
  std::vector<Eigen::Index> pos, neg, zero;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    if (H(i, j) > kZeroRow) {
      pos.push_back(i);
    } else if (H(i, j) < -kZeroRow) {
      neg.push_back(i);
    } else {
      zero.push_back(i);
    }
  }
  const auto rows = static_cast<Eigen::Index>(zero.size() + pos.size() * neg.size());
  Matrix Hn(rows, j);
  Vector vn(rows);
  Eigen::Index r = 0;
  for (auto i : zero) {
    Hn.row(r) = H.row(i).head(j);
    vn(r++) = v(i);
  }
  for (auto p : pos) {
    for (auto q : neg) {
      const double a = H(p, j);
      const double b = -H(q, j);
      Hn.row(r) = b * H.row(p).head(j) + a * H.row(q).head(j);
      vn(r++) = b * v(p) + a * v(q);
    }
  }
  return remove_redundancy(Polytope(Hn, vn), 1e-9, lp);
}

}  // namespace

Polytope::Polytope(Matrix H, Vector v) {
  if (H.rows() != v.size()) throw Error(ErrorCode::DimensionMismatch, "H and v row counts differ");
  const Eigen::Index n = H.cols();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    if (!H.row(i).allFinite() || !std::isfinite(v(i))) {
      if (std::isinf(v(i)) && v(i) > 0 && H.row(i).allFinite()) continue;
      throw Error(ErrorCode::InvalidArgument, "non-finite constraint");
    }
    const double nrm = H.row(i).norm();
    if (nrm <= kZeroRow) {
      if (v(i) < -1e-9) empty_ = true;
      continue;
    }
    keep.push_back(i);
  }
  if (empty_) {
    H_ = Matrix(0, n);
    v_ = Vector(0);
    return;
  }
  H_.resize(static_cast<Eigen::Index>(keep.size()), n);
  v_.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const double nrm = H.row(keep[k]).norm();
    H_.row(static_cast<Eigen::Index>(k)) = H.row(keep[k]) / nrm;
    v_(static_cast<Eigen::Index>(k)) = v(keep[k]) / nrm;
  }
}

Polytope Polytope::box(const Vector& lower, const Vector& upper) {
  if (lower.size() != upper.size()) throw Error(ErrorCode::DimensionMismatch, "box bounds differ in size");
  const Eigen::Index n = lower.size();
  if ((upper.array() < lower.array()).any()) return empty(n);
  Matrix H(2 * n, n);
  H << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  Vector v(2 * n);
  v << upper, -lower;
  return Polytope(H, v);
}

Polytope Polytope::universe(Eigen::Index dim) { return Polytope(Matrix(0, dim), Vector(0)); }

Polytope Polytope::empty(Eigen::Index dim) {
  Polytope p = universe(dim);
  p.empty_ = true;
  return p;
}

Polytope Polytope::point(const Vector& p) {
  Polytope out = box(p, p);
  out.set_vertices({p});
  return out;
}

Polytope Polytope::hull(const PointList& points, double tol) {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "hull of no points");
  const Eigen::Index n = points.front().size();
  for (const auto& p : points) {
    if (p.size() != n) throw Error(ErrorCode::DimensionMismatch, "hull points differ in dimension");
  }
  if (n == 1) {
    double lo = points.front()(0), hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p(0));
      hi = std::max(hi, p(0));
    }
    if (hi - lo <= tol) throw Error(ErrorCode::DegenerateHull, "points span no interval");
    Polytope out = box(Vector::Constant(1, lo), Vector::Constant(1, hi));
    out.set_vertices({Vector::Constant(1, lo), Vector::Constant(1, hi)});
    return out;
  }
  if (n == 2) {
    const PointList h = monotone_chain(points, tol);
    if (h.size() < 3) throw Error(ErrorCode::DegenerateHull, "points are collinear");
    Matrix H(static_cast<Eigen::Index>(h.size()), 2);
    Vector v(static_cast<Eigen::Index>(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Vector& a = h[i];
      const Vector& b = h[(i + 1) % h.size()];
      // Counter-clockwise order: outward normal is the edge rotated clockwise.
      const double nx = b(1) - a(1), ny = a(0) - b(0);
      H(static_cast<Eigen::Index>(i), 0) = nx;
      H(static_cast<Eigen::Index>(i), 1) = ny;
      v(static_cast<Eigen::Index>(i)) = nx * a(0) + ny * a(1);
    }
    Polytope out(H, v);
    out.set_vertices(h);
    return out;
  }
  if (n == 3) {
    PointList pts;
    for (const auto& p : points) push_unique(pts, p, tol);
    const auto m = static_cast<Eigen::Index>(pts.size());
    std::vector<Vector> normals;
    std::vector<double> offsets;
    PointList verts;
    for_each_subset(m, 3, [&](const std::vector<Eigen::Index>& idx) {
      const Eigen::Vector3d a = pts[static_cast<std::size_t>(idx[0])];
      const Eigen::Vector3d b = pts[static_cast<std::size_t>(idx[1])];
      const Eigen::Vector3d c = pts[static_cast<std::size_t>(idx[2])];
      Eigen::Vector3d nrm = (b - a).cross(c - a);
      const double len = nrm.norm();
      if (len <= tol) return;
      nrm /= len;
      const double off = nrm.dot(a);
      int above = 0, below = 0;
      for (const auto& p : pts) {
        const double s = nrm.dot(Eigen::Vector3d(p)) - off;
        if (s > tol) ++above;
        if (s < -tol) ++below;
      }
      if (above > 0 && below > 0) return;
      if (above > 0) {
        nrm = -nrm;
      }
      const double o = nrm.dot(a);
      for (std::size_t k = 0; k < normals.size(); ++k) {
        if ((normals[k] - Vector(nrm)).norm() <= 1e-9 && std::abs(offsets[k] - o) <= 1e-9) return;
      }
      normals.emplace_back(nrm);
      offsets.push_back(o);
      for (auto i : idx) push_unique(verts, pts[static_cast<std::size_t>(i)], tol);
    });
    if (normals.size() < 4) throw Error(ErrorCode::DegenerateHull, "points are coplanar");
    Matrix H(static_cast<Eigen::Index>(normals.size()), 3);
    Vector v(static_cast<Eigen::Index>(normals.size()));
    for (std::size_t k = 0; k < normals.size(); ++k) {
      H.row(static_cast<Eigen::Index>(k)) = normals[k].transpose();
      v(static_cast<Eigen::Index>(k)) = offsets[k];
    }
    Polytope out(H, v);
    out.set_vertices(verts);
    return out;
  }
  throw Error(ErrorCode::UnsupportedDimension, "hull is implemented for dimension <= 3");
}

double Polytope::max_violation(const Vector& x) const {
  if (empty_) return std::numeric_limits<double>::infinity();
  if (H_.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (H_ * x - v_).maxCoeff();
}

bool contains(const Polytope& P, const Vector& x, double tol) {
  if (x.size() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "point dimension differs from polytope");
  if (P.is_empty()) return false;
  return P.num_facets() == 0 || P.max_violation(x) <= tol;
}

bool is_feasible(const Polytope& P, const LpSolver& lp) {
  if (P.is_empty()) return false;
  if (P.num_facets() == 0) return true;
  const LpResult r = lp.solve(lp_over_polytope(P));
  if (r.status == LpStatus::IterationLimit) throw Error(ErrorCode::SolverFailure, "feasibility LP hit iteration limit");
  return r.status != LpStatus::Infeasible;
}

Polytope remove_redundancy(const Polytope& P, double tol, const LpSolver& lp) {
  if (P.is_empty()) return P;
  const Eigen::Index n = P.dim();
  if (P.num_facets() == 0) return P;
  if (!is_feasible(P, lp)) return Polytope::empty(n);

  // Duplicate rows first; only the tightest copy survives.
  const Matrix& H = P.H();
  const Vector& v = P.v();
  std::vector<Eigen::Index> cand;
  for (Eigen::Index i = 0; i < H.rows(); ++i) {
    bool dominated = false;
    for (auto& j : cand) {
      if ((H.row(i) - H.row(j)).lpNorm<Eigen::Infinity>() <= 1e-12) {
        if (v(i) < v(j)) j = i;
        dominated = true;
        break;
      }
    }
    if (!dominated) cand.push_back(i);
  }

  std::vector<bool> alive(cand.size(), true);
  for (std::size_t k = 0; k < cand.size(); ++k) {
    const Eigen::Index i = cand[k];
    Eigen::Index rows = 1;
    for (std::size_t l = 0; l < cand.size(); ++l) rows += (l != k && alive[l]) ? 1 : 0;
    LpProblem prob = LpProblem::over(n);
    prob.c = -H.row(i).transpose();
    prob.G.resize(rows, n);
    prob.h.resize(rows);
    Eigen::Index r = 0;
    for (std::size_t l = 0; l < cand.size(); ++l) {
      if (l == k || !alive[l]) continue;
      prob.G.row(r) = H.row(cand[l]);
      prob.h(r++) = v(cand[l]);
    }
    prob.G.row(r) = H.row(i);
    prob.h(r) = v(i) + 1.0;
    const LpResult res = lp.solve(prob);
    if (res.optimal() && -res.objective <= v(i) + tol) alive[k] = false;
  }

  std::vector<Eigen::Index> keep;
  for (std::size_t k = 0; k < cand.size(); ++k) {
    if (alive[k]) keep.push_back(cand[k]);
  }
  Matrix Hk(static_cast<Eigen::Index>(keep.size()), n);
  Vector vk(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    Hk.row(static_cast<Eigen::Index>(k)) = H.row(keep[k]);
    vk(static_cast<Eigen::Index>(k)) = v(keep[k]);
  }
  return Polytope(Hk, vk);
}

Polytope intersect(const Polytope& P, const Polytope& Q, const LpSolver& lp) {
  if (P.dim() != Q.dim()) throw Error(ErrorCode::DimensionMismatch, "intersecting polytopes of different dimension");
  if (P.is_empty() || Q.is_empty()) return Polytope::empty(P.dim());
  Matrix H(P.num_facets() + Q.num_facets(), P.dim());
  H << P.H(), Q.H();
  Vector v(H.rows());
  v << P.v(), Q.v();
  return remove_redundancy(Polytope(H, v), 1e-9, lp);
}

Polytope affine_preimage(const Polytope& P, const Matrix& M) {
  if (M.rows() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "map range differs from polytope dimension");
  if (M.rows() != M.cols()) throw Error(ErrorCode::SingularMap, "map is not square");
  const Eigen::JacobiSVD<Matrix> svd(M);
  const Vector sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0))) {
    throw Error(ErrorCode::SingularMap, "map is singular");
  }
  if (P.is_empty()) return Polytope::empty(M.cols());
  return Polytope(P.H() * M, P.v());
}

Polytope project(const Polytope& P, Eigen::Index keep, const LpSolver& lp) {
  if (keep < 0 || keep > P.dim()) throw Error(ErrorCode::InvalidArgument, "projection dimension out of range");
  if (P.is_empty()) return Polytope::empty(keep);
  Polytope cur = remove_redundancy(P, 1e-9, lp);
  while (cur.dim() > keep) {
    if (cur.is_empty()) return Polytope::empty(keep);
    cur = eliminate_last(cur, lp);
  }
  return cur;
}

Polytope pre_set(const Polytope& P, const DiscreteSystem& d, const Polytope& U, const LpSolver& lp) {
  const Eigen::Index n = d.Ad.rows();
  const Eigen::Index m = d.Bd.cols();
  if (P.dim() != n || U.dim() != m || d.Bd.rows() != n) {
    throw Error(ErrorCode::DimensionMismatch, "pre_set dimensions disagree");
  }
  if (P.is_empty() || U.is_empty()) return Polytope::empty(n);
  Matrix H(P.num_facets() + U.num_facets(), n + m);
  H.setZero();
  H.topLeftCorner(P.num_facets(), n) = P.H() * d.Ad;
  H.topRightCorner(P.num_facets(), m) = P.H() * d.Bd;
  H.bottomRightCorner(U.num_facets(), m) = U.H();
  Vector v(H.rows());
  v << P.v(), U.v();
  return project(Polytope(H, v), n, lp);
}

double support(const Polytope& P, const Vector& direction, const LpSolver& lp) {
  if (direction.size() != P.dim()) throw Error(ErrorCode::DimensionMismatch, "direction dimension differs");
  if (P.is_empty()) throw Error(ErrorCode::EmptyPolytope, "support of an empty set");
  if (P.num_facets() == 0) {
    return direction.isZero(0.0) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  LpProblem prob = lp_over_polytope(P);
  prob.c = -direction;
  const LpResult r = lp.solve(prob);
  switch (r.status) {
    case LpStatus::Optimal:
      return -r.objective;
    case LpStatus::Unbounded:
      return std::numeric_limits<double>::infinity();
    case LpStatus::Infeasible:
      throw Error(ErrorCode::EmptyPolytope, "support of an empty set");
    default:
      throw Error(ErrorCode::SolverFailure, "support LP hit iteration limit");
  }
}

bool is_subset(const Polytope& P, const Polytope& Q, double tol, const LpSolver& lp) {
  if (P.dim() != Q.dim()) throw Error(ErrorCode::DimensionMismatch, "subset test across dimensions");
  if (P.is_empty() || !is_feasible(P, lp)) return true;
  if (Q.is_empty()) return false;
  for (Eigen::Index i = 0; i < Q.num_facets(); ++i) {
    if (support(P, Q.H().row(i).transpose(), lp) > Q.v()(i) + tol) return false;
  }
  return true;
}

MaxCisResult max_cis(const Polytope& S0, const DiscreteSystem& d, const Polytope& U, int max_iter, double tol,
                     const LpSolver& lp) {
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
  Polytope S = remove_redundancy(S0, 1e-9, lp);
  if (S.is_empty()) return {S, 0};
  for (int k = 1; k <= max_iter; ++k) {
    Polytope next = intersect(pre_set(S, d, U, lp), S0, lp);
    if (next.is_empty()) return {next, k};
    if (is_subset(S, next, tol, lp) && is_subset(next, S, tol, lp)) return {next, k};
    S = std::move(next);
  }
  throw NoConvergenceError("maximal invariant set iteration did not converge in " + std::to_string(max_iter) +
                               " steps",
                           S, max_iter);
}

ChebyshevBall chebyshev_center(const Polytope& P, const LpSolver& lp) {
  const Eigen::Index n = P.dim();
  if (P.is_empty()) throw Error(ErrorCode::EmptyPolytope, "Chebyshev center of an empty set");
  if (P.num_facets() == 0) return {Vector::Zero(n), std::numeric_limits<double>::infinity()};
  LpProblem prob = LpProblem::over(n + 1);
  prob.c(n) = -1.0;
  prob.G.resize(P.num_facets() + 1, n + 1);
  prob.G.setZero();
  prob.h.resize(P.num_facets() + 1);
  prob.G.leftCols(n).topRows(P.num_facets()) = P.H();
  prob.G.col(n).head(P.num_facets()) = P.H().rowwise().norm();
  prob.h.head(P.num_facets()) = P.v();
  prob.G(P.num_facets(), n) = -1.0;
  prob.h(P.num_facets()) = 0.0;
  const LpResult r = lp.solve(prob);
  if (r.status == LpStatus::Infeasible) throw Error(ErrorCode::EmptyPolytope, "Chebyshev center of an empty set");
  if (r.status == LpStatus::Unbounded) {
    return {Vector::Zero(n), std::numeric_limits<double>::infinity()};
  }
  if (!r.optimal()) throw Error(ErrorCode::SolverFailure, "Chebyshev LP failed");
  return {r.x.head(n), r.x(n)};
}

PointList vertices(const Polytope& P, double tol) {
  const Eigen::Index n = P.dim();
  if (n > 3) throw Error(ErrorCode::UnsupportedDimension, "vertex enumeration is implemented for dimension <= 3");
  PointList out;
  if (P.is_empty()) return out;
  const Matrix& H = P.H();
  const Vector& v = P.v();
  for_each_subset(P.num_facets(), n, [&](const std::vector<Eigen::Index>& idx) {
    Matrix A(n, n);
    Vector b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      A.row(k) = H.row(idx[static_cast<std::size_t>(k)]);
      b(k) = v(idx[static_cast<std::size_t>(k)]);
    }
    bool ok = false;
    const Vector x = solve_square(A, b, ok);
    if (!ok || !x.allFinite()) return;
    if (P.max_violation(x) <= tol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) push_unique(out, x, 1e-8);
  });
  return out;
}

PointList ordered_vertices_2d(const Polytope& P, double tol) {
  if (P.dim() != 2) throw Error(ErrorCode::UnsupportedDimension, "ordered vertices need a planar polytope");
  PointList pts = vertices(P, tol);
  if (pts.size() < 3) return pts;
  Vector c = Vector::Zero(2);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  return pts;
}

}  // namespace impzone
