#include "impzone/mpc.hpp"

namespace impzone {

namespace {

using Index = Eigen::Index;

struct Builder {
  Index nz;
  Matrix P;
  Vector q;
  double constant = 0.0;
  std::vector<RowVector> g_rows, e_rows;
  std::vector<double> h, f;

  explicit Builder(Index size) : nz(size), P(Matrix::Zero(size, size)), q(Vector::Zero(size)) {}

  // Adds ||S z - r||_W^2.
  void quadratic(const Matrix& S, const Vector& r, const Matrix& W) {
    const Matrix SW = S.transpose() * W;
    P += 2.0 * SW * S;
    q -= 2.0 * SW * r;
    constant += r.dot(W * r);
  }

  // Poly.H * (S z + s0) <= Poly.v
  void member(const Polytope& poly, const Matrix& S, const Vector& s0) {
    for (Index i = 0; i < poly.num_facets(); ++i) {
      g_rows.push_back(poly.H().row(i) * S);
      h.push_back(poly.v()(i) - poly.H().row(i).dot(s0));
    }
  }

  // S z = r
  void equal(const Matrix& S, const Vector& r) {
    for (Index i = 0; i < S.rows(); ++i) {
      e_rows.push_back(S.row(i));
      f.push_back(r(i));
    }
  }

  Matrix select(Index offset, Index width) const {
    Matrix S = Matrix::Zero(width, nz);
    S.block(0, offset, width, width) = Matrix::Identity(width, width);
    return S;
  }

  QpData finish() const {
    QpData d = QpData::over(nz);
    d.P = 0.5 * (P + P.transpose());
    d.q = q;
    d.G.resize(static_cast<Index>(g_rows.size()), nz);
    d.h.resize(static_cast<Index>(h.size()));
    for (std::size_t i = 0; i < g_rows.size(); ++i) {
      d.G.row(static_cast<Index>(i)) = g_rows[i];
      d.h(static_cast<Index>(i)) = h[i];
    }
    d.E.resize(static_cast<Index>(e_rows.size()), nz);
    d.f.resize(static_cast<Index>(f.size()));
    for (std::size_t i = 0; i < e_rows.size(); ++i) {
      d.E.row(static_cast<Index>(i)) = e_rows[i];
      d.f(static_cast<Index>(i)) = f[i];
    }
    return d;
  }
};

void check_psd(const Matrix& M, Index size, const char* name) {
  if (M.rows() != size || M.cols() != size) {
    throw Error(ErrorCode::DimensionMismatch, std::string(name) + " has wrong size");
  }
  if (!M.isApprox(M.transpose(), 1e-12) && !(M - M.transpose()).isZero(1e-12)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be symmetric");
  }
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(M, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (lmin < -1e-12) throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive semidefinite");
}

// Dynamics rows x(1) = Ad x + Bd u(0), x(j+1) = Ad x(j) + Bd u(j).
void add_dynamics(Builder& b, const QpLayout& L, const DiscreteSystem& d, const Vector& x) {
  const Index n = L.n;
  for (int j = 0; j < L.N; ++j) {
    Matrix S = Matrix::Zero(n, L.size);
    S.block(0, L.x(j + 1), n, n) = Matrix::Identity(n, n);
    S.block(0, L.u(j), n, L.m) = -d.Bd;
    Vector r = Vector::Zero(n);
    if (j == 0) {
      r = d.Ad * x;
    } else {
      S.block(0, L.x(j), n, n) -= d.Ad;
    }
    b.equal(S, r);
  }
}

}  // namespace

std::string_view to_string(MpcVariant v) {
  return v == MpcVariant::SetBased ? "setbased" : "tracking";
}

void MpcConfig::validate() const {
  const Index n = plant.Ad.rows();
  const Index m = plant.Bd.cols();
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 1");
  if (plant.Ad.cols() != n || plant.Bd.rows() != n) throw Error(ErrorCode::DimensionMismatch, "plant matrices");
  check_psd(Q, n, "Q");
  check_psd(R, m, "R");
  check_psd(Q_O, n, "Q_O");
  if (inputs.dim() != m) throw Error(ErrorCode::DimensionMismatch, "input set dimension");
  if (state_admissible.dim() != n || target_admissible.dim() != n || invariant.dim() != n) {
    throw Error(ErrorCode::DimensionMismatch, "state set dimension");
  }
  if (inputs.is_empty() || state_admissible.is_empty()) throw Error(ErrorCode::InvalidArgument, "empty constraint set");
  if (variant == MpcVariant::ArtificialVariables) {
    if (target_admissible.is_empty()) throw Error(ErrorCode::InvalidArgument, "empty admissible target");
    if (G.rows() != n || G.cols() != m) throw Error(ErrorCode::DimensionMismatch, "equilibrium gain");
  } else if (invariant.is_empty()) {
    throw Error(ErrorCode::InvalidArgument, "empty invariant set");
  }
}

double QpProblem::cost(const Vector& z) const { return 0.5 * z.dot(data.P * z) + data.q.dot(z) + constant; }

QpProblem build_tracking_qp(const Vector& x, const MpcConfig& cfg) {
  cfg.validate();
  const Index n = cfg.plant.Ad.rows();
  const Index m = cfg.plant.Bd.cols();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "state dimension");
  const int N = cfg.horizon;

  QpLayout L;
  L.n = n;
  L.m = m;
  L.N = N;
  L.u0 = 0;
  L.x1 = N * m;
  L.xs = L.x1 + N * n;
  L.us = L.xs + n;
  L.xstar = L.us + m;
  L.size = L.xstar + n;

  Builder b(L.size);
  const Matrix Sxs = b.select(L.xs, n);
  const Matrix Sus = b.select(L.us, m);
  const Matrix Sxstar = b.select(L.xstar, n);

  for (int j = 0; j < N; ++j) {
    if (j == 0) {
      b.quadratic(-Sxs, -x, cfg.Q);  // ||x - x_s||_Q
    } else {
      b.quadratic(b.select(L.x(j), n) - Sxs, Vector::Zero(n), cfg.Q);
    }
    b.quadratic(b.select(L.u(j), m) - Sus, Vector::Zero(m), cfg.R);
  }
  b.quadratic(Sxs - Sxstar, Vector::Zero(n), cfg.Q_O);

  add_dynamics(b, L, cfg.plant, x);
  for (int j = 1; j <= N; ++j) b.member(cfg.state_admissible, b.select(L.x(j), n), Vector::Zero(n));
  for (int j = 0; j < N; ++j) b.member(cfg.inputs, b.select(L.u(j), m), Vector::Zero(m));

  // (Ad - I) x_s + Bd u_s = 0
  b.equal((cfg.plant.Ad - Matrix::Identity(n, n)) * Sxs + cfg.plant.Bd * Sus, Vector::Zero(n));
  b.member(cfg.inputs, Sus, Vector::Zero(m));
  b.member(cfg.state_admissible, Sxs, Vector::Zero(n));
  b.equal(b.select(L.x(N), n) - Sxs, Vector::Zero(n));
  b.member(cfg.target_admissible, Sxstar, Vector::Zero(n));

  QpProblem out;
  out.data = b.finish();
  out.layout = L;
  out.variant = MpcVariant::ArtificialVariables;
  out.constant = b.constant;
  return out;
}

QpProblem build_setbased_qp(const Vector& x, const MpcConfig& cfg) {
  cfg.validate();
  const Index n = cfg.plant.Ad.rows();
  const Index m = cfg.plant.Bd.cols();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "state dimension");
  const int N = cfg.horizon;

  QpLayout L;
  L.n = n;
  L.m = m;
  L.N = N;
  L.u0 = 0;
  L.x1 = N * m;
  L.xstar0 = L.x1 + N * n;
  L.ustar0 = L.xstar0 + (N + 1) * n;
  L.size = L.ustar0 + N * m;

  Builder b(L.size);
  const Matrix In = Matrix::Identity(n, n);
  const Matrix Im = Matrix::Identity(m, m);
  for (int j = 0; j < N; ++j) {
    const Matrix Sxstar = b.select(L.xs_star(j), n);
    if (j == 0) {
      b.quadratic(-Sxstar, -x, In);
    } else {
      b.quadratic(b.select(L.x(j), n) - Sxstar, Vector::Zero(n), In);
    }
    b.quadratic(b.select(L.u(j), m) - b.select(L.us_star(j), m), Vector::Zero(m), Im);
  }

  add_dynamics(b, L, cfg.plant, x);
  for (int j = 1; j <= N; ++j) b.member(cfg.state_admissible, b.select(L.x(j), n), Vector::Zero(n));
  for (int j = 0; j < N; ++j) b.member(cfg.inputs, b.select(L.u(j), m), Vector::Zero(m));
  for (int j = 0; j <= N; ++j) b.member(cfg.invariant, b.select(L.xs_star(j), n), Vector::Zero(n));
  for (int j = 0; j < N; ++j) {
    b.member(cfg.inputs, b.select(L.us_star(j), m), Vector::Zero(m));
    b.member(cfg.invariant, cfg.plant.Ad * b.select(L.xs_star(j), n) + cfg.plant.Bd * b.select(L.us_star(j), m),
             Vector::Zero(n));
  }
  b.equal(b.select(L.x(N), n) - b.select(L.xs_star(N), n), Vector::Zero(n));

  QpProblem out;
  out.data = b.finish();
  out.layout = L;
  out.variant = MpcVariant::SetBased;
  out.constant = b.constant;
  return out;
}

QpProblem build_qp(const Vector& x, const MpcConfig& cfg) {
  return cfg.variant == MpcVariant::SetBased ? build_setbased_qp(x, cfg) : build_tracking_qp(x, cfg);
}

ControlStep control_step(const Vector& x, const MpcConfig& cfg, const QpSolver& solver) {
  const QpProblem qp = build_qp(x, cfg);
  const QpResult r = solver.solve(qp.data);
  if (r.status == QpStatus::Infeasible) {
    throw InfeasibleProblemError("state is outside the feasible set of the " + std::string(to_string(cfg.variant)) +
                                 " controller");
  }
  if (!r.optimal()) throw Error(ErrorCode::SolverFailure, "QP status " + std::string(to_string(r.status)));

  const QpLayout& L = qp.layout;
  ControlStep out;
  out.cost = std::max(0.0, qp.cost(r.x));
  out.iterations = r.iterations;
  out.u = r.x.segment(L.u(0), L.m);
  out.predicted_states.push_back(x);
  for (int j = 0; j < L.N; ++j) {
    out.inputs.push_back(r.x.segment(L.u(j), L.m));
    out.predicted_states.push_back(r.x.segment(L.x(j + 1), L.n));
  }
  if (qp.variant == MpcVariant::ArtificialVariables) {
    out.xs = r.x.segment(L.xs, L.n);
    out.us = r.x.segment(L.us, L.m);
    out.xstar = r.x.segment(L.xstar, L.n);
  } else {
    for (int j = 0; j <= L.N; ++j) out.xstar_seq.push_back(r.x.segment(L.xs_star(j), L.n));
    for (int j = 0; j < L.N; ++j) out.ustar_seq.push_back(r.x.segment(L.us_star(j), L.m));
  }
  return out;
}

}  // namespace impzone
