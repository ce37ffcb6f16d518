#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace qggm {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpConstraint {
  std::vector<double> coeffs;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

/// minimize objectiveᵀx subject to the constraints and lower ≤ x ≤ upper.
/// Bounds may be infinite; empty bound vectors mean x ≥ 0.
struct LpProblem {
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_vars() const { return objective.size(); }
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t pivots = 0;
  bool bland_engaged = false;
};

/// Dense-tableau two-phase simplex. Dantzig pricing, switching to Bland's rule
/// after 2·(columns) consecutive degenerate pivots. Throws NumericalError if
/// the pivot budget is exhausted.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace qggm
