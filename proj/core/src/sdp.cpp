#include "impzone/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impzone/error.hpp"

namespace impzone {

std::string_view to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::MaxIterations: return "max_iterations";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

using Index = Eigen::Index;

LmiProblem::LmiProblem(Index num_variables) : objective_(Vector::Zero(num_variables)) {}

Index LmiProblem::add_block(Matrix constant) {
  if (constant.rows() != constant.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "LMI block constant must be square");
  }
  blocks_.push_back({std::move(constant), {}});
  return static_cast<Index>(blocks_.size()) - 1;
}

void LmiProblem::add_term(Index block, Index var, const Matrix& coeff) {
  if (block < 0 || block >= static_cast<Index>(blocks_.size()) || var < 0 || var >= num_variables()) {
    throw Error(ErrorCode::InvalidArgument, "LMI term index out of range");
  }
  Block& b = blocks_[static_cast<std::size_t>(block)];
  if (coeff.rows() != b.constant.rows() || coeff.cols() != b.constant.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "LMI term has wrong block size");
  }
  for (auto& [k, m] : b.terms) {
    if (k == var) {
      m += coeff;
      return;
    }
  }
  b.terms.emplace_back(var, coeff);
}

void LmiProblem::add_linear_inequality(double constant, const RowVector& row) {
  if (row.size() != num_variables()) {
    throw Error(ErrorCode::DimensionMismatch, "linear inequality has wrong width");
  }
  const Index blk = add_block(Matrix::Constant(1, 1, constant));
  for (Index k = 0; k < row.size(); ++k) {
    if (row(k) != 0.0) add_term(blk, k, Matrix::Constant(1, 1, row(k)));
  }
}

std::vector<Matrix> LmiProblem::evaluate(const Vector& y) const {
  std::vector<Matrix> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    Matrix f = b.constant;
    for (const auto& [k, m] : b.terms) f += y(k) * m;
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

double inner(const Matrix& a, const Matrix& b) { return (a.array() * b.array()).sum(); }

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Largest step keeping x + alpha * dx positive definite (x must be PD).
double max_psd_step(const Matrix& x, const Matrix& dx) {
  if (x.rows() == 1) {
    return dx(0, 0) < 0.0 ? -x(0, 0) / dx(0, 0) : std::numeric_limits<double>::infinity();
  }
  const Eigen::LLT<Matrix> llt(x);
  const Matrix linv_dx = llt.matrixL().solve(dx);
  const Matrix w = llt.matrixL().solve(linv_dx.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(sym(w), Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

}  // namespace

SdpResult PrimalDualSdpSolver::solve(const LmiProblem& problem) const {
  const Index nv = problem.num_variables();
  const auto& blocks = problem.blocks();
  const std::size_t nb = blocks.size();
  const Vector& b = problem.objective();

  // Dual form: S = C - sum_k y_k A_k with C = F0 and A_k = -F_k.
  std::vector<Matrix> c(nb);
  std::vector<std::vector<std::pair<Index, Matrix>>> a(nb);
  Index total_dim = 0;
  double c_norm = 0.0;
  for (std::size_t j = 0; j < nb; ++j) {
    c[j] = sym(blocks[j].constant);
    c_norm = std::max(c_norm, c[j].norm());
    total_dim += c[j].rows();
    for (const auto& [k, m] : blocks[j].terms) a[j].emplace_back(k, -sym(m));
  }

  SdpResult result;
  if (nb == 0) {
    result.status = b.isZero() ? SdpStatus::Optimal : SdpStatus::Unbounded;
    result.y = Vector::Zero(nv);
    return result;
  }

  const double b_norm = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  const double xi_x = std::max(10.0, 10.0 * b_norm);
  const double xi_s = std::max(10.0, 10.0 * c_norm);

  std::vector<Matrix> x(nb), s(nb), sinv(nb), rd(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const Index d = c[j].rows();
    x[j] = xi_x * Matrix::Identity(d, d);
    s[j] = xi_s * Matrix::Identity(d, d);
  }
  Vector y = Vector::Zero(nv);

  auto fill_result = [&](SdpStatus status, int iter) {
    result.status = status;
    result.y = y;
    result.slack = problem.evaluate(y);
    result.dual = x;
    result.iterations = iter;
    double p = 0.0;
    for (std::size_t j = 0; j < nb; ++j) p += inner(c[j], x[j]);
    result.primal_objective = p;
    result.dual_objective = b.dot(y);
    return result;
  };

  // Near the optimum the Schur system can lose accuracy before the tight
  // tolerance is met; fall back to the best iterate seen if it is close enough.
  double best_resid = std::numeric_limits<double>::infinity();
  Vector best_y;
  std::vector<Matrix> best_x;
  auto fallback = [&](SdpStatus status, int iter) {
    if (best_resid <= options_.acceptable_tolerance) {
      y = best_y;
      x = best_x;
      return fill_result(SdpStatus::Optimal, iter);
    }
    return fill_result(status, iter);
  };

  const double tol = options_.tolerance;
  Matrix m(nv, nv);
  for (int iter = 0; iter < options_.max_iterations; ++iter) {
    Vector rp = b;
    double pobj = 0.0, mu = 0.0, rd_norm = 0.0, x_trace = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      for (const auto& [k, ak] : a[j]) rp(k) -= inner(ak, x[j]);
      rd[j] = c[j] - s[j];
      for (const auto& [k, ak] : a[j]) rd[j] -= y(k) * ak;
      pobj += inner(c[j], x[j]);
      mu += inner(x[j], s[j]);
      rd_norm = std::max(rd_norm, rd[j].norm());
      x_trace += x[j].trace();
      Eigen::LLT<Matrix> llt(s[j]);
      if (llt.info() != Eigen::Success) return fallback(SdpStatus::NumericalFailure, iter);
      sinv[j] = llt.solve(Matrix::Identity(s[j].rows(), s[j].cols()));
    }
    mu /= static_cast<double>(total_dim);
    const double dobj = b.dot(y);
    const double pinf = (rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + b_norm);
    const double dinf = rd_norm / (1.0 + c_norm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double rel_mu = mu / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (pinf <= tol && dinf <= tol && gap <= tol && rel_mu <= tol) return fill_result(SdpStatus::Optimal, iter);
    if (!y.allFinite() || !std::isfinite(x_trace)) return fallback(SdpStatus::NumericalFailure, iter);
    const double resid = std::max({pinf, dinf, gap, rel_mu});
    if (resid < best_resid) {
      best_resid = resid;
      best_y = y;
      best_x = x;
    }
    if (x_trace > options_.divergence_bound && dinf > tol) return fill_result(SdpStatus::Infeasible, iter);
    if (y.cwiseAbs().maxCoeff() > options_.divergence_bound && pinf > tol) {
      return fill_result(SdpStatus::Unbounded, iter);
    }

    // Schur complement M_kl = <A_k, X A_l S^-1>.
    m.setZero();
    for (std::size_t j = 0; j < nb; ++j) {
      for (const auto& [l, al] : a[j]) {
        const Matrix g = x[j] * al * sinv[j];
        for (const auto& [k, ak] : a[j]) m(k, l) += inner(ak, g);
      }
    }
    m = sym(m);
    m.diagonal().array() += 1e-14 * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
    const Eigen::LDLT<Matrix> ldlt(m);
    if (ldlt.info() != Eigen::Success) return fallback(SdpStatus::NumericalFailure, iter);

    std::vector<Matrix> dx(nb), ds(nb);
    Vector dy;
    auto direction = [&](const std::vector<Matrix>& rc) {
      Vector h = rp;
      std::vector<Matrix> t(nb);
      for (std::size_t j = 0; j < nb; ++j) {
        t[j] = rc[j] - x[j] * rd[j] * sinv[j];
        for (const auto& [k, ak] : a[j]) h(k) -= inner(ak, t[j]);
      }
      dy = ldlt.solve(h);
      for (std::size_t j = 0; j < nb; ++j) {
        ds[j] = rd[j];
        for (const auto& [k, ak] : a[j]) ds[j] -= dy(k) * ak;
        dx[j] = sym(rc[j] - x[j] * ds[j] * sinv[j]);
      }
    };
    auto step_lengths = [&](double& ap, double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < nb; ++j) {
        ap = std::min(ap, max_psd_step(x[j], dx[j]));
        ad = std::min(ad, max_psd_step(s[j], ds[j]));
      }
    };

    std::vector<Matrix> rc(nb);
    for (std::size_t j = 0; j < nb; ++j) rc[j] = -x[j];
    direction(rc);
    double ap = 0.0, ad = 0.0;
    step_lengths(ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t j = 0; j < nb; ++j) mu_aff += inner(x[j] + ap * dx[j], s[j] + ad * ds[j]);
    mu_aff /= static_cast<double>(total_dim);
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    for (std::size_t j = 0; j < nb; ++j) rc[j] = sigma * mu * sinv[j] - x[j] - dx[j] * ds[j] * sinv[j];
    direction(rc);
    step_lengths(ap, ad);
    const double gamma = options_.step_fraction;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    for (std::size_t j = 0; j < nb; ++j) {
      x[j] = sym(x[j] + ap * dx[j]);
      s[j] = sym(s[j] + ad * ds[j]);
    }
    y += ad * dy;
  }
  return fallback(SdpStatus::MaxIterations, options_.max_iterations);
}

const SdpSolver& default_sdp_solver() {
  static const PrimalDualSdpSolver solver;
  return solver;
}

}  // namespace impzone
