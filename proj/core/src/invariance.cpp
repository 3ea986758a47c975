#include "impzone/invariance.hpp"

#include <cmath>

namespace impzone {

std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::Valid: return "true";
    case Validity::Invalid: return "false";
    case Validity::Unknown: return "unknown";
  }
  return "unknown";
}

Polytope EquilibriumSet::states(const LpSolver& lp) const {
  const Eigen::Index n = G.rows();
  const Eigen::Index m = G.cols();
  if (inputs.is_empty()) return Polytope::empty(n);
  const Polytope& R = restriction ? *restriction : Polytope::universe(n);
  if (R.is_empty()) return Polytope::empty(n);
  Matrix H = Matrix::Zero(2 * n + inputs.num_facets() + R.num_facets(), n + m);
  Vector v = Vector::Zero(H.rows());
  H.block(0, 0, n, n) = Matrix::Identity(n, n);
  H.block(0, n, n, m) = -G;
  H.block(n, 0, n, n) = -Matrix::Identity(n, n);
  H.block(n, n, n, m) = G;
  H.block(2 * n, n, inputs.num_facets(), m) = inputs.H();
  v.segment(2 * n, inputs.num_facets()) = inputs.v();
  H.block(2 * n + inputs.num_facets(), 0, R.num_facets(), n) = R.H();
  v.tail(R.num_facets()) = R.v();
  return project(Polytope(H, v), n, lp);
}

EquilibriumSet equilibrium_line(const DiscreteSystem& d, const Polytope& U) {
  const Eigen::Index n = d.Ad.rows();
  if (d.Ad.cols() != n || d.Bd.rows() != n || U.dim() != d.Bd.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "equilibrium map dimensions disagree");
  }
  const Matrix M = d.Ad - Matrix::Identity(n, n);
  const Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) {
    throw Error(ErrorCode::SingularEquilibriumMap, "Ad - I is singular (A has a zero eigenvalue)");
  }
  return EquilibriumSet{-lu.solve(d.Bd), U, std::nullopt};
}

Polytope ices(const EquilibriumSet& eq, const SpectrahedronSet& S, const IcesOptions& options) {
  const Eigen::Index m = eq.G.cols();
  if (eq.G.rows() != S.dim()) throw Error(ErrorCode::DimensionMismatch, "equilibrium gain does not match the set");
  if (eq.inputs.is_empty() || !is_feasible(eq.inputs)) return Polytope::empty(m);

  Polytope out = Polytope::empty(m);
  if (m == 1) {
    const Vector one = Vector::Constant(1, 1.0);
    const double umax = support(eq.inputs, one);
    const double umin = -support(eq.inputs, -one);
    if (!std::isfinite(umax) || !std::isfinite(umin)) {
      throw Error(ErrorCode::InvalidArgument, "input set must be bounded");
    }
    auto admissible = [&](double u) { return is_admissible(S, eq.G * Vector::Constant(1, u)).admissible; };
    double seed = 0.0;
    if (umax - umin <= options.bisection_tol) {
      seed = 0.5 * (umin + umax);
      if (!admissible(seed)) return Polytope::empty(1);
    } else {
      const SliceOptimum best = best_point_on_slice(S, Vector::Zero(S.dim()), eq.G, eq.inputs);
      if (best.margin < -S.options().slack_tol) return Polytope::empty(1);
      seed = std::clamp(best.z(0), umin, umax);
      if (!admissible(seed)) return Polytope::empty(1);
    }
    auto edge = [&](double bound) {
      if (admissible(bound)) return bound;
      double lo = seed, hi = bound;
      while (std::abs(hi - lo) > options.bisection_tol) {
        const double mid = 0.5 * (lo + hi);
        (admissible(mid) ? lo : hi) = mid;
      }
      return lo;
    };
    const double hi = edge(umax);
    const double lo = edge(umin);
    out = Polytope::box(Vector::Constant(1, lo), Vector::Constant(1, hi));
    out.set_vertices({Vector::Constant(1, lo), Vector::Constant(1, hi)});
  } else {
    const Polytope inner = inner_polytope(S, options.inner);
    out = intersect(Polytope(inner.H() * eq.G, inner.v()), eq.inputs);
  }
  if (eq.restriction) {
    out = intersect(out, Polytope(eq.restriction->H() * eq.G, eq.restriction->v()));
  }
  return out;
}

bool is_controlled_invariant(const Polytope& P, const DiscreteSystem& d, const Polytope& U, double tol,
                             const LpSolver& lp) {
  if (P.is_empty()) return true;
  return is_subset(P, pre_set(P, d, U, lp), tol, lp);
}

MaxCisResult grow_from_equilibria(const Polytope& E, const Polytope& S0, const DiscreteSystem& d,
                                  const Polytope& U, int max_iter, double tol, const LpSolver& lp) {
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be positive");
  Polytope K = remove_redundancy(E, 1e-9, lp);
  if (K.is_empty()) return {K, 0};
  for (int k = 1; k <= max_iter; ++k) {
    Polytope next = intersect(pre_set(K, d, U, lp), S0, lp);
    if (next.is_empty()) throw Error(ErrorCode::SolverFailure, "invariant growth lost its seed set");
    if (is_subset(next, K, tol, lp)) return {next, k};
    K = std::move(next);
  }
  throw NoConvergenceError("invariant growth did not settle in " + std::to_string(max_iter) + " steps", K, max_iter);
}

TargetValidityReport validate_target(const Polytope& target, const ImpulsiveSystem& sys,
                                     const ValidateOptions& options, const SdpSolver& sdp, const LpSolver& lp) {
  const Eigen::Index n = sys.state_dim();
  const Eigen::Index m = sys.input_dim();
  if (target.dim() != n) throw Error(ErrorCode::DimensionMismatch, "target dimension differs from the state");

  TargetValidityReport rep;
  rep.target = target;
  rep.directions = options.inner.directions;
  rep.max_iter = options.max_iter;
  rep.tol = options.tol;
  rep.method = "none";
  rep.admissible_inner = Polytope::empty(n);
  rep.icis = Polytope::empty(n);
  rep.ices = Polytope::empty(m);
  rep.ices_states = Polytope::empty(n);

  rep.effective_target = intersect(target, sys.state_set, lp);
  if (rep.effective_target.is_empty()) {
    rep.valid = Validity::Invalid;
    rep.message = "target does not meet the state set";
    return rep;
  }

  const ModalDecomposition md = modal_decompose(sys, options.modal);
  const DiscreteSystem d = discretize(sys, md);
  const SpectrahedronSet S(md, rep.effective_target, sys.period, options.admissibility, sdp);

  const InteriorPoint center = interior_point(S);
  if (center.margin < -options.admissibility.slack_tol) {
    rep.valid = Validity::Invalid;
    rep.message = "no state of the target keeps its free response inside the target";
    return rep;
  }
  EquilibriumSet eq = equilibrium_line(d, sys.input_set);
  try {
    rep.admissible_inner = inner_polytope(S, options.inner);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHull) throw;
    // Flat admissible set: the admissible equilibria are still an invariant set.
    if (m == 1) rep.ices = ices(eq, S, options.ices);
    rep.ices_nonempty = !rep.ices.is_empty();
    if (!rep.ices_nonempty) {
      rep.valid = Validity::Unknown;
      rep.message = e.detail();
      return rep;
    }
    rep.ices_states = EquilibriumSet{eq.G, rep.ices, std::nullopt}.states(lp);
    rep.admissible_inner = rep.ices_states;
    rep.icis = rep.ices_states;
    rep.method = "equilibria";
    rep.valid = Validity::Valid;
    rep.message = "admissible target has empty interior; the admissible equilibria form the invariant set";
    return rep;
  }

  rep.ices = ices(eq, S, options.ices);
  rep.ices_nonempty = !rep.ices.is_empty();
  eq.restriction = rep.admissible_inner;
  rep.ices_states = eq.states(lp);

  try {
    const MaxCisResult r = max_cis(rep.admissible_inner, d, sys.input_set, options.max_iter, options.tol, lp);
    rep.icis = r.set;
    rep.cis_iterations = r.iterations;
    rep.cis_converged = true;
    rep.method = "max_cis";
  } catch (const NoConvergenceError& e) {
    rep.cis_iterations = e.iterations();
    if (rep.ices_states.is_empty() || !is_feasible(rep.ices_states, lp)) {
      rep.valid = Validity::Unknown;
      rep.message = "maximal invariant set recursion did not converge and no admissible equilibrium was found";
      return rep;
    }
    rep.method = "equilibrium_growth";
    try {
      const MaxCisResult g =
          grow_from_equilibria(rep.ices_states, rep.admissible_inner, d, sys.input_set, options.max_iter, options.tol, lp);
      rep.icis = g.set;
      rep.growth_iterations = g.iterations;
      rep.growth_converged = true;
    } catch (const NoConvergenceError& ge) {
      rep.icis = ge.last_iterate();
      rep.growth_iterations = ge.iterations();
    }
  }

  rep.valid = (!rep.icis.is_empty() && is_feasible(rep.icis, lp)) ? Validity::Valid : Validity::Invalid;
  if (rep.valid == Validity::Invalid) rep.message = "invariant set recursion emptied the admissible target";
  return rep;
}

}  // namespace impzone
