#include "impzone/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "impzone/error.hpp"

namespace impzone {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

LpProblem LpProblem::over(Eigen::Index n) {
  LpProblem p;
  p.c = Vector::Zero(n);
  p.G = Matrix(0, n);
  p.h = Vector(0);
  p.E = Matrix(0, n);
  p.f = Vector(0);
  return p;
}

namespace {

using Index = Eigen::Index;

// Standard-form tableau: rows 0..m-1 are constraints, last column the rhs.
struct Tableau {
  Matrix t;
  std::vector<Index> basis;
  Index cols = 0;  // structural + slack + artificial columns (rhs excluded)

  Index rows() const { return static_cast<Index>(basis.size()); }
  double rhs(Index i) const { return t(i, cols); }

  void pivot(Index r, Index c) {
    const double p = t(r, c);
    t.row(r) /= p;
    for (Index i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  void remove_row(Index r) {
    const Index m = rows();
    for (Index i = r; i + 1 < m; ++i) t.row(i) = t.row(i + 1);
    t.conservativeResize(m - 1, Eigen::NoChange);
    basis.erase(basis.begin() + r);
  }
};

enum class PhaseOutcome { Optimal, Unbounded, IterationLimit };

struct PhaseReport {
  PhaseOutcome outcome;
  int iterations;
};

PhaseReport run_phase(Tableau& tab, const Vector& cost, Index allowed_cols, const SimplexOptions& opt,
                      int iteration_budget) {
  int iterations = 0;
  int degenerate_streak = 0;
  const Index m = tab.rows();
  Vector reduced(allowed_cols);
  while (true) {
    if (iterations >= iteration_budget) return {PhaseOutcome::IterationLimit, iterations};
    // reduced costs r_j = c_j - c_B' T_j
    for (Index j = 0; j < allowed_cols; ++j) {
      double r = cost(j);
      for (Index i = 0; i < m; ++i) r -= cost(tab.basis[static_cast<std::size_t>(i)]) * tab.t(i, j);
      reduced(j) = r;
    }
    const bool bland = degenerate_streak >= opt.degenerate_switch;
    Index enter = -1;
    double best = -opt.optimality_tol;
    for (Index j = 0; j < allowed_cols; ++j) {
      if (reduced(j) < best) {
        enter = j;
        if (bland) break;
        best = reduced(j);
      }
    }
    if (enter < 0) return {PhaseOutcome::Optimal, iterations};

    Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < m; ++i) {
      const double a = tab.t(i, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = std::max(tab.rhs(i), 0.0) / a;
      if (ratio < best_ratio - 1e-14 ||
          (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 &&
           tab.basis[static_cast<std::size_t>(i)] < tab.basis[static_cast<std::size_t>(leave)])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return {PhaseOutcome::Unbounded, iterations};
    degenerate_streak = best_ratio <= 1e-13 ? degenerate_streak + 1 : 0;
    tab.pivot(leave, enter);
    ++iterations;
  }
}

}  // namespace

LpResult DenseSimplexSolver::solve(const LpProblem& problem) const {
  const Index n = problem.num_variables();
  if (problem.G.rows() != problem.h.size() || problem.E.rows() != problem.f.size() ||
      (problem.G.rows() > 0 && problem.G.cols() != n) || (problem.E.rows() > 0 && problem.E.cols() != n)) {
    throw Error(ErrorCode::DimensionMismatch, "LP data has inconsistent dimensions");
  }

  LpResult result;

  struct Row {
    RowVector a;
    double b;
    bool equality;
  };
  std::vector<Row> rows;
  rows.reserve(static_cast<std::size_t>(problem.G.rows() + problem.E.rows()));
  bool trivially_infeasible = false;
  auto add_row = [&](const RowVector& a, double b, bool eq) {
    const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
    if (scale < 1e-14) {
      const double tol = options_.feasibility_tol * std::max(1.0, std::abs(b));
      if (eq ? std::abs(b) > tol : b < -tol) trivially_infeasible = true;
      return;
    }
    rows.push_back({a / scale, b / scale, eq});
  };
  for (Index i = 0; i < problem.G.rows(); ++i) add_row(problem.G.row(i), problem.h(i), false);
  for (Index i = 0; i < problem.E.rows(); ++i) add_row(problem.E.row(i), problem.f(i), true);
  if (trivially_infeasible) {
    result.status = LpStatus::Infeasible;
    return result;
  }

  const Index m = static_cast<Index>(rows.size());
  Index num_slack = 0;
  for (const auto& r : rows) num_slack += r.equality ? 0 : 1;
  Index num_art = 0;
  for (const auto& r : rows) num_art += (r.equality || r.b < 0.0) ? 1 : 0;

  const Index slack0 = 2 * n;
  const Index art0 = slack0 + num_slack;
  const Index cols = art0 + num_art;

  Tableau tab;
  tab.cols = cols;
  tab.t = Matrix::Zero(m, cols + 1);
  tab.basis.assign(static_cast<std::size_t>(m), -1);
  Matrix a_std = Matrix::Zero(m, art0);  // structural + slack, for polishing
  Vector b_std(m);
  {
    Index s = slack0, art = art0;
    for (Index i = 0; i < m; ++i) {
      const Row& r = rows[static_cast<std::size_t>(i)];
      const double sign = r.b < 0.0 ? -1.0 : 1.0;
      a_std.block(i, 0, 1, n) = r.a;
      a_std.block(i, n, 1, n) = -r.a;
      Index slack_col = -1;
      if (!r.equality) {
        slack_col = s++;
        a_std(i, slack_col) = 1.0;
      }
      b_std(i) = r.b;
      tab.t.block(i, 0, 1, art0) = sign * a_std.row(i);
      tab.t(i, cols) = sign * r.b;
      if (r.equality || r.b < 0.0) {
        tab.t(i, art) = 1.0;
        tab.basis[static_cast<std::size_t>(i)] = art++;
      } else {
        tab.basis[static_cast<std::size_t>(i)] = slack_col;
      }
    }
  }

  int budget = options_.max_iterations;
  if (num_art > 0) {
    Vector phase1_cost = Vector::Zero(cols);
    phase1_cost.tail(num_art).setOnes();
    const PhaseReport rep = run_phase(tab, phase1_cost, cols, options_, budget);
    result.iterations += rep.iterations;
    budget -= rep.iterations;
    if (rep.outcome == PhaseOutcome::IterationLimit) {
      result.status = LpStatus::IterationLimit;
      return result;
    }
    double infeasibility = 0.0;
    for (Index i = 0; i < tab.rows(); ++i) {
      if (tab.basis[static_cast<std::size_t>(i)] >= art0) infeasibility += std::abs(tab.rhs(i));
    }
    const double scale = std::max(1.0, b_std.cwiseAbs().maxCoeff());
    if (infeasibility > options_.feasibility_tol * scale) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive the remaining (zero-level) artificials out of the basis.
    for (Index i = tab.rows() - 1; i >= 0; --i) {
      if (tab.basis[static_cast<std::size_t>(i)] < art0) continue;
      Index col = -1;
      double best = 1e-9;
      for (Index j = 0; j < art0; ++j) {
        if (std::abs(tab.t(i, j)) > best) {
          best = std::abs(tab.t(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        tab.remove_row(i);  // linearly dependent equality
      }
    }
  }

  Vector cost = Vector::Zero(cols);
  cost.head(n) = problem.c;
  cost.segment(n, n) = -problem.c;
  const PhaseReport rep = run_phase(tab, cost, art0, options_, budget);
  result.iterations += rep.iterations;
  if (rep.outcome == PhaseOutcome::IterationLimit) {
    result.status = LpStatus::IterationLimit;
    return result;
  }
  if (rep.outcome == PhaseOutcome::Unbounded) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  // Recover the basic solution, then re-solve the basis system for accuracy.
  Vector full = Vector::Zero(art0);
  for (Index i = 0; i < tab.rows(); ++i) full(tab.basis[static_cast<std::size_t>(i)]) = tab.rhs(i);
  {
    std::vector<Index> basic;
    for (Index i = 0; i < tab.rows(); ++i) basic.push_back(tab.basis[static_cast<std::size_t>(i)]);
    Matrix bmat(m, static_cast<Index>(basic.size()));
    for (std::size_t k = 0; k < basic.size(); ++k) bmat.col(static_cast<Index>(k)) = a_std.col(basic[k]);
    Eigen::ColPivHouseholderQR<Matrix> qr(bmat);
    if (qr.rank() == static_cast<Index>(basic.size())) {
      const Vector xb = qr.solve(b_std);
      if ((bmat * xb - b_std).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, b_std.cwiseAbs().maxCoeff())) {
        for (std::size_t k = 0; k < basic.size(); ++k) full(basic[k]) = xb(static_cast<Index>(k));
      }
    }
  }
  result.x = full.head(n) - full.segment(n, n);
  result.objective = problem.c.dot(result.x);
  result.status = LpStatus::Optimal;
  return result;
}

const LpSolver& default_lp_solver() {
  static const DenseSimplexSolver solver;
  return solver;
}

}  // namespace impzone
