#include "impzone/sim.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace impzone {

Controller::Decision MpcController::decide(const Vector& x) {
  last_ = control_step(x, cfg_, *solver_);
  return {last_->u, last_->cost};
}

Trajectory run_closed_loop(const ImpulsiveSystem& sys, const ModalDecomposition& md, Controller& controller,
                           const Vector& x0, int steps, int samples_per_interval) {
  if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be at least 1");
  if (samples_per_interval < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples per interval");
  if (x0.size() != sys.state_dim()) throw Error(ErrorCode::DimensionMismatch, "initial state dimension");
  if (!contains(sys.state_set, x0, 1e-9)) throw Error(ErrorCode::InvalidArgument, "initial state is outside X");

  const int M = samples_per_interval;
  const double T = sys.period;
  std::vector<Matrix> flow(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) flow[static_cast<std::size_t>(j)] = md.transition(T * j / (M - 1));

  Trajectory traj;
  traj.period = T;
  traj.samples_per_interval = M;
  traj.controller = controller.name();
  traj.post.push_back(x0);
  traj.pre.push_back(x0);

  for (int k = 0; k < steps; ++k) {
    const Vector& xk = traj.post.back();
    Controller::Decision dec;
    try {
      dec = controller.decide(xk);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleProblem) throw;
      throw InfeasibleRunError(e.detail() + " at step " + std::to_string(k), traj, k);
    }
    if (dec.u.size() != sys.input_dim()) throw Error(ErrorCode::DimensionMismatch, "controller input dimension");
    traj.inputs.push_back(dec.u);
    traj.costs.push_back(dec.cost.value_or(std::nan("")));
    const double tk = k * T;
    for (int j = 0; j < M; ++j) {
      traj.samples.push_back({tk + T * j / (M - 1), flow[static_cast<std::size_t>(j)] * xk, k});
    }
    const Vector pre = flow.back() * xk;
    traj.pre.push_back(pre);
    traj.post.push_back(pre + sys.B * dec.u);
  }
  return traj;
}

Trajectory run_closed_loop(const ImpulsiveSystem& sys, Controller& controller, const Vector& x0, int steps,
                           int samples_per_interval) {
  return run_closed_loop(sys, modal_decompose(sys), controller, x0, steps, samples_per_interval);
}

namespace {

// max over t in [lo, hi] of h'Phi(t - t0) x0 - v by golden-section search;
// unimodality is not assumed globally, so the bracket is kept small.
double refine_facet(const ModalDecomposition& md, const Vector& x0, double t0, const RowVector& h, double v, double lo,
                    double hi) {
  auto f = [&](double t) { return h.dot(md.free_response(x0, t - t0)) - v; };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({fc, fd, f(lo), f(hi)});
}

}  // namespace

ViolationReport check_violations(const Trajectory& traj, const Polytope& X, const Polytope& target, double tol,
                                 const ModalDecomposition* md) {
  ViolationReport rep;
  const std::size_t ns = traj.samples.size();
  rep.in_state.resize(ns);
  rep.in_target.resize(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const Vector& x = traj.samples[i].x;
    const double vx = X.num_facets() ? X.max_violation(x) : -1.0;
    rep.in_state[i] = contains(X, x, tol);
    rep.in_target[i] = contains(target, x, tol);
    if (!rep.in_state[i]) {
      ++rep.state_violations;
      if (!rep.first_state_violation) rep.first_state_violation = i;
    }
    rep.max_state_violation = std::max(rep.max_state_violation, vx);
  }

  if (md != nullptr && X.num_facets() > 0) {
    // Refine between samples where a facet function comes within 1e-3 of its bound.
    for (std::size_t i = 0; i + 1 < ns; ++i) {
      const DenseSample& s0 = traj.samples[i];
      const DenseSample& s1 = traj.samples[i + 1];
      if (s0.segment != s1.segment) continue;
      const Vector& xk = traj.post[static_cast<std::size_t>(s0.segment)];
      const double tk = s0.segment * traj.period;
      for (Eigen::Index f = 0; f < X.num_facets(); ++f) {
        const double a0 = X.H().row(f).dot(s0.x) - X.v()(f);
        const double a1 = X.H().row(f).dot(s1.x) - X.v()(f);
        if (std::max(a0, a1) < -1e-3) continue;
        const double peak = refine_facet(*md, xk, tk, X.H().row(f), X.v()(f), s0.t, s1.t);
        rep.max_state_violation = std::max(rep.max_state_violation, peak);
      }
    }
  }

  for (std::size_t i = ns; i-- > 0;) {
    if (!rep.in_target[i]) break;
    rep.settling_index = i;
  }
  if (rep.settling_index) rep.settling_time = traj.samples[*rep.settling_index].t;
  return rep;
}

std::optional<int> first_step_inside(const Trajectory& traj, const Polytope& P, double tol) {
  std::optional<int> k;
  for (std::size_t i = traj.post.size(); i-- > 0;) {
    if (!contains(P, traj.post[i], tol)) break;
    k = static_cast<int>(i);
  }
  return k;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  const Eigen::Index n = traj.post.empty() ? 0 : traj.post.front().size();
  os << "t";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << ",segment,phase\n";
  os << std::setprecision(17);
  auto row = [&](double t, const Vector& x, int seg, const char* phase) {
    os << t;
    for (Eigen::Index i = 0; i < n; ++i) os << ',' << x(i);
    os << ',' << seg << ',' << phase << '\n';
  };
  const int M = traj.samples_per_interval;
  for (int k = 0; k <= traj.steps(); ++k) {
    row(k * traj.period, traj.post[static_cast<std::size_t>(k)], k, "post");
    if (k == traj.steps()) break;
    for (int j = 0; j < M; ++j) {
      const DenseSample& s = traj.samples[static_cast<std::size_t>(k * M + j)];
      row(s.t, s.x, s.segment, "pre");
    }
  }
}

}  // namespace impzone
