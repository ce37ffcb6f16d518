#include "qggm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qggm/errors.hpp"
#include "qggm/matrix.hpp"

namespace qggm {

void LpProblem::validate() const {
  const std::size_t n = num_vars();
  if (n == 0) throw ValidationError("LpProblem: no variables");
  if ((!lower.empty() && lower.size() != n) || (!upper.empty() && upper.size() != n))
    throw ValidationError("LpProblem: bound vectors must match the variable count");
  for (double c : objective)
    if (!std::isfinite(c)) throw ValidationError("LpProblem: non-finite objective coefficient");
  for (const auto& con : constraints) {
    if (con.coeffs.size() != n) throw ValidationError("LpProblem: constraint width mismatch");
    if (!std::isfinite(con.rhs)) throw ValidationError("LpProblem: non-finite right-hand side");
    for (double a : con.coeffs)
      if (!std::isfinite(a)) throw ValidationError("LpProblem: non-finite constraint coefficient");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = lower.empty() ? 0.0 : lower[k];
    const double hi = upper.empty() ? std::numeric_limits<double>::infinity() : upper[k];
    if (lo > hi || lo == std::numeric_limits<double>::infinity() ||
        hi == -std::numeric_limits<double>::infinity())
      throw ValidationError("LpProblem: empty bound interval for variable " + std::to_string(k));
  }
}

namespace {

constexpr double kEps = 1e-9;

// Original variable k = offset + Σ sign·column over its (one or two) columns.
struct VarMap {
  double offset = 0.0;
  std::size_t col = 0;
  double sign = 1.0;
  bool split = false;  // free variable: col − (col + 1)
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : t_(rows + 1, cols + 1), rows_(rows), cols_(cols) {}

  double& at(std::size_t r, std::size_t c) { return t_(r, c); }
  double& rhs(std::size_t r) { return t_(r, cols_); }
  double& cost(std::size_t c) { return t_(rows_, c); }
  double& cost_rhs() { return t_(rows_, cols_); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    auto prow = t_.row(pr);
    const double inv = 1.0 / prow[pc];
    for (double& v : prow) v *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      auto row = t_.row(r);
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  DenseMatrix t_;
  std::size_t rows_;
  std::size_t cols_;
};

struct SimplexRun {
  std::size_t pivots = 0;
  bool bland = false;
};

enum class PhaseResult { Optimal, Unbounded };

// Minimizes the cost row over columns flagged `allowed`; basis[r] names the basic column of row r.
PhaseResult run_phase(Tableau& t, std::vector<std::size_t>& basis, const std::vector<char>& allowed,
                      SimplexRun& run, std::size_t budget) {
  const std::size_t bland_after = 2 * t.cols();
  std::size_t degenerate_streak = 0;
  while (true) {
    std::size_t enter = t.cols();
    double best = -kEps;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!allowed[c]) continue;
      const double rc = t.cost(c);
      if (run.bland) {
        if (rc < -kEps) {
          enter = c;
          break;
        }
      } else if (rc < best) {
        best = rc;
        enter = c;
      }
    }
    if (enter == t.cols()) return PhaseResult::Optimal;

    std::size_t leave = t.rows();
    double ratio = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= kEps) continue;
      const double q = t.rhs(r) / a;
      if (leave == t.rows() || q < ratio - kEps ||
          (q <= ratio + kEps && basis[r] < basis[leave])) {
        leave = r;
        ratio = q;
      }
    }
    if (leave == t.rows()) return PhaseResult::Unbounded;

    if (++run.pivots > budget)
      throw NumericalError("simplex: pivot budget of " + std::to_string(budget) + " exhausted");
    degenerate_streak = (ratio <= kEps) ? degenerate_streak + 1 : 0;
    if (!run.bland && degenerate_streak > bland_after) run.bland = true;
    t.pivot(leave, enter);
    basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  problem.validate();
  const std::size_t n = problem.num_vars();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Map every variable onto nonnegative columns.
  std::vector<VarMap> vars(n);
  std::vector<LpConstraint> rows = problem.constraints;
  std::size_t structural = 0;
  std::vector<std::pair<std::size_t, double>> upper_rows;  // (var, width)
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = problem.lower.empty() ? 0.0 : problem.lower[k];
    const double hi = problem.upper.empty() ? inf : problem.upper[k];
    VarMap& v = vars[k];
    v.col = structural;
    if (std::isfinite(lo)) {
      v.offset = lo;
      if (std::isfinite(hi)) upper_rows.emplace_back(k, hi - lo);
      structural += 1;
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.sign = -1.0;
      structural += 1;
    } else {
      v.split = true;
      structural += 2;
    }
  }

  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> std_rows;
  auto push_row = [&](const std::vector<double>& coeffs, Relation rel, double rhs) {
    Row row{std::vector<double>(structural, 0.0), rel, rhs};
    for (std::size_t k = 0; k < n; ++k) {
      const double a = coeffs[k];
      if (a == 0.0) continue;
      const VarMap& v = vars[k];
      row.b -= a * v.offset;
      row.a[v.col] += a * v.sign;
      if (v.split) row.a[v.col + 1] -= a;
    }
    if (row.b < 0.0) {
      for (double& x : row.a) x = -x;
      row.b = -row.b;
      if (row.rel == Relation::LessEqual)
        row.rel = Relation::GreaterEqual;
      else if (row.rel == Relation::GreaterEqual)
        row.rel = Relation::LessEqual;
    }
    std_rows.push_back(std::move(row));
  };
  for (const auto& con : rows) push_row(con.coeffs, con.relation, con.rhs);
  for (auto [k, width] : upper_rows) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    push_row(e, Relation::LessEqual, width + problem.lower[k]);
  }

  const std::size_t m = std_rows.size();
  std::size_t slacks = 0, artificials = 0;
  for (const auto& r : std_rows) {
    if (r.rel != Relation::Equal) ++slacks;
    if (r.rel != Relation::LessEqual) ++artificials;
  }
  const std::size_t cols = structural + slacks + artificials;
  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::vector<char> is_artificial(cols, 0);

  std::size_t next_slack = structural;
  std::size_t next_art = structural + slacks;
  for (std::size_t r = 0; r < m; ++r) {
    const Row& row = std_rows[r];
    for (std::size_t c = 0; c < structural; ++c) t.at(r, c) = row.a[c];
    t.rhs(r) = row.b;
    if (row.rel == Relation::LessEqual) {
      t.at(r, next_slack) = 1.0;
      basis[r] = next_slack++;
    } else {
      if (row.rel == Relation::GreaterEqual) t.at(r, next_slack++) = -1.0;
      t.at(r, next_art) = 1.0;
      is_artificial[next_art] = 1;
      basis[r] = next_art++;
    }
  }

  LpSolution sol;
  SimplexRun run;
  const std::size_t budget = 50 * (m + cols) + 1000;

  if (artificials > 0) {
    // Phase 1: minimize the sum of artificials (reduced costs after pricing out the basis).
    for (std::size_t c = 0; c <= cols; ++c) t.cost(c) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[basis[r]]) continue;
      for (std::size_t c = 0; c < cols; ++c)
        if (!is_artificial[c]) t.cost(c) -= t.at(r, c);
      t.cost_rhs() -= t.rhs(r);
    }
    std::vector<char> allowed(cols, 1);
    run_phase(t, basis, allowed, run, budget);
    if (-t.cost_rhs() > 1e-7 * std::max(1.0, std::abs(t.cost_rhs()))) {
      sol.status = LpStatus::Infeasible;
      sol.pivots = run.pivots;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[basis[r]]) continue;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!is_artificial[c] && std::abs(t.at(r, c)) > kEps) {
          t.pivot(r, c);
          basis[r] = c;
          ++run.pivots;
          break;
        }
      }
    }
  }

  // Phase 2 cost row: c_j minus the basic contribution.
  std::vector<double> cost(cols, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const VarMap& v = vars[k];
    cost[v.col] += problem.objective[k] * v.sign;
    if (v.split) cost[v.col + 1] -= problem.objective[k];
  }
  for (std::size_t c = 0; c < cols; ++c) t.cost(c) = cost[c];
  t.cost_rhs() = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cost[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c < cols; ++c) t.cost(c) -= cb * t.at(r, c);
    t.cost_rhs() -= cb * t.rhs(r);
  }
  std::vector<char> allowed(cols, 1);
  for (std::size_t c = 0; c < cols; ++c)
    if (is_artificial[c]) allowed[c] = 0;

  if (run_phase(t, basis, allowed, run, budget) == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.pivots = run.pivots;
    sol.bland_engaged = run.bland;
    return sol;
  }

  std::vector<double> z(cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) z[basis[r]] = t.rhs(r);
  sol.x.resize(n);
  double obj = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const VarMap& v = vars[k];
    double value = v.offset + v.sign * z[v.col];
    if (v.split) value -= z[v.col + 1];
    sol.x[k] = value;
    obj += problem.objective[k] * value;
  }
  sol.status = LpStatus::Optimal;
  sol.objective = obj;
  sol.pivots = run.pivots;
  sol.bland_engaged = run.bland;
  return sol;
}

}  // namespace qggm
