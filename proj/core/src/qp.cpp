#include "impzone/qp.hpp"

#include <algorithm>
#include <cmath>

#include "impzone/error.hpp"

namespace impzone {

std::string_view to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::MaxIterations: return "max_iterations";
    case QpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

QpData QpData::over(Eigen::Index n) {
  QpData d;
  d.P = Matrix::Zero(n, n);
  d.q = Vector::Zero(n);
  d.G = Matrix(0, n);
  d.h = Vector(0);
  d.E = Matrix(0, n);
  d.f = Vector(0);
  return d;
}

namespace {

using Index = Eigen::Index;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Largest alpha in (0, 1] keeping v + alpha dv > 0.
double max_step(const Vector& v, const Vector& dv) {
  double alpha = 1.0;
  for (Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

}  // namespace

QpResult InteriorPointQpSolver::solve(const QpData& d) const {
  const Index n = d.num_variables();
  const Index mi = d.G.rows();
  const Index me = d.E.rows();
  if (d.P.rows() != n || d.P.cols() != n || d.h.size() != mi || d.f.size() != me ||
      (mi > 0 && d.G.cols() != n) || (me > 0 && d.E.cols() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "QP data has inconsistent dimensions");
  }

  QpResult result;
  if (options_.check_feasibility && (mi > 0 || me > 0)) {
    LpProblem lp = LpProblem::over(n);
    lp.G = d.G;
    lp.h = d.h;
    lp.E = d.E;
    lp.f = d.f;
    const LpResult phase1 = lp_->solve(lp);
    if (phase1.status == LpStatus::Infeasible) {
      result.status = QpStatus::Infeasible;
      return result;
    }
  }

  const Matrix P = 0.5 * (d.P + d.P.transpose());
  Vector x = Vector::Zero(n);
  Vector y = Vector::Zero(me);
  Vector s = Vector::Ones(mi);
  Vector z = Vector::Ones(mi);
  if (mi > 0) {
    const Vector slack = d.h - d.G * x;
    for (Index i = 0; i < mi; ++i) s(i) = std::max(1.0, std::abs(slack(i)));
  }

  const double scale_q = 1.0 + inf_norm(d.q);
  const double scale_h = 1.0 + inf_norm(d.h);
  const double scale_f = 1.0 + inf_norm(d.f);
  const double tol = options_.tolerance;
  const double delta = options_.regularization;

  Matrix kkt(n + me, n + me);
  for (int iter = 0; iter < options_.max_iterations; ++iter) {
    const Vector rd = P * x + d.q + d.E.transpose() * y + d.G.transpose() * z;
    const Vector re = d.E * x - d.f;
    const Vector ri = d.G * x + s - d.h;
    const double mu = mi > 0 ? s.dot(z) / static_cast<double>(mi) : 0.0;
    const double objective = 0.5 * x.dot(P * x) + d.q.dot(x);

    if (inf_norm(rd) <= tol * scale_q && inf_norm(re) <= tol * scale_f && inf_norm(ri) <= tol * scale_h &&
        mu <= tol * (1.0 + std::abs(objective))) {
      result.status = QpStatus::Optimal;
      result.x = x;
      result.eq_multipliers = y;
      result.ineq_multipliers = z;
      result.objective = objective;
      result.iterations = iter;
      return result;
    }

    const Vector w = z.cwiseQuotient(s);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = P + d.G.transpose() * w.asDiagonal() * d.G;
    kkt.topLeftCorner(n, n).diagonal().array() += delta;
    if (me > 0) {
      kkt.topRightCorner(n, me) = d.E.transpose();
      kkt.bottomLeftCorner(me, n) = d.E;
      kkt.bottomRightCorner(me, me).diagonal().setConstant(-delta);
    }
    const Eigen::PartialPivLU<Matrix> lu(kkt);

    // Solves the Newton system for a given complementarity residual rc.
    auto newton = [&](const Vector& rc, Vector& dx, Vector& dy, Vector& ds, Vector& dz) {
      Vector rhs(n + me);
      rhs.head(n) = -rd - d.G.transpose() * ((z.cwiseProduct(ri) - rc).cwiseQuotient(s));
      if (me > 0) rhs.tail(me) = -re;
      Vector sol = lu.solve(rhs);
      // one step of iterative refinement
      sol += lu.solve(rhs - kkt * sol);
      dx = sol.head(n);
      dy = sol.tail(me);
      ds = -ri - d.G * dx;
      dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    Vector dx, dy, ds, dz;
    if (mi == 0) {
      newton(Vector(0), dx, dy, ds, dz);
      x += dx;
      y += dy;
      continue;
    }

    const Vector rc_aff = s.cwiseProduct(z);
    newton(rc_aff, dx, dy, ds, dz);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / static_cast<double>(mi);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    const Vector rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) - Vector::Constant(mi, sigma * mu);
    newton(rc, dx, dy, ds, dz);
    const double step = 0.99 * std::min(max_step(s, ds), max_step(z, dz));
    x += step * dx;
    y += step * dy;
    s += step * ds;
    z += step * dz;
    if (!x.allFinite() || !s.allFinite() || !z.allFinite()) break;
  }

  result.status = x.allFinite() ? QpStatus::MaxIterations : QpStatus::NumericalFailure;
  result.x = x;
  result.eq_multipliers = y;
  result.ineq_multipliers = z;
  result.objective = 0.5 * x.dot(P * x) + d.q.dot(x);
  result.iterations = options_.max_iterations;
  return result;
}

const QpSolver& default_qp_solver() {
  static const InteriorPointQpSolver solver;
  return solver;
}

}  // namespace impzone
