#include "qggm/symmetrize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qggm/errors.hpp"
#include "qggm/simplex.hpp"

namespace qggm {

double operator_l1_norm(const DenseMatrix& a) {
  if (!a.is_square()) throw ValidationError("operator_l1_norm: matrix must be square");
  std::vector<double> sums(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) sums[c] += std::abs(a(r, c));
  double best = 0.0;
  for (double s : sums) best = std::max(best, s);
  return best;
}

namespace {

std::vector<double> apply_gram(const DenseMatrix& a, const std::vector<double>& v) {
  const std::size_t n = a.rows();
  std::vector<double> av(n, 0.0), out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += a(r, c) * v[c];
    av[r] = acc;
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[c] += a(r, c) * av[r];
  return out;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double spectral_norm(const DenseMatrix& a) {
  if (!a.is_square()) throw ValidationError("spectral_norm: matrix must be square");
  if (!a.all_finite()) throw ValidationError("spectral_norm: non-finite entry");
  const std::size_t n = a.rows();
  if (n == 0) return 0.0;

  // Uneven start so that structured matrices rarely annihilate it.
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = 1.0 + 1.0 / static_cast<double>(k + 2);
  std::vector<double> w = apply_gram(a, v);
  for (std::size_t k = 0; norm2(w) == 0.0 && k < n; ++k) {
    std::fill(v.begin(), v.end(), 0.0);
    v[k] = 1.0;
    w = apply_gram(a, v);
  }
  if (norm2(w) == 0.0) return 0.0;

  double rho = 0.0;
  for (int it = 0; it < 10000; ++it) {
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    w = apply_gram(a, v);
    double next = 0.0;
    for (std::size_t k = 0; k < n; ++k) next += v[k] * w[k];
    if (it > 0 && std::abs(next - rho) <= 1e-8 * next) return std::sqrt(next);
    rho = next;
    v = std::move(w);
  }
  throw NumericalError("spectral_norm: power iteration did not converge in 10000 iterations");
}

SymmetrizeMode parse_symmetrize_mode(std::string_view name) {
  if (name == "exact") return SymmetrizeMode::Exact;
  if (name == "heuristic") return SymmetrizeMode::Heuristic;
  if (name == "auto") return SymmetrizeMode::Auto;
  throw ValidationError("unknown symmetrize mode '" + std::string(name) +
                        "' (expected exact, heuristic or auto)");
}

std::string to_string(SymmetrizeMode mode) {
  switch (mode) {
    case SymmetrizeMode::Exact: return "exact";
    case SymmetrizeMode::Heuristic: return "heuristic";
    case SymmetrizeMode::Auto: return "auto";
  }
  return "auto";
}

namespace {

DenseMatrix heuristic(const DenseMatrix& w) {
  DenseMatrix out = w;
  const std::size_t p = w.rows();
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const double v = std::abs(w(j, i)) < std::abs(w(i, j)) ? w(j, i) : w(i, j);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

// Per pair i<j the shared value x deviates from w_ij by u⁺_ij − u⁻_ij (column j)
// and from w_ji by u⁺_ji − u⁻_ji (column i). Minimize m subject to
//   u⁺_ij − u⁻_ij − u⁺_ji + u⁻_ji = w_ji − w_ij   per pair,
//   Σ (u⁺ + u⁻) over column j ≤ m                per column.
DenseMatrix exact(const DenseMatrix& w, SymmetrizeResult& result) {
  const std::size_t p = w.rows();
  const std::size_t pairs = p * (p - 1) / 2;
  const std::size_t nvars = 4 * pairs + 1;
  const std::size_t m_var = 4 * pairs;

  LpProblem lp;
  lp.objective.assign(nvars, 0.0);
  lp.objective[m_var] = 1.0;
  lp.constraints.reserve(pairs + p);
  std::vector<LpConstraint> columns(p);
  for (auto& col : columns) {
    col.coeffs.assign(nvars, 0.0);
    col.coeffs[m_var] = -1.0;
    col.relation = Relation::LessEqual;
    col.rhs = 0.0;
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j, ++k) {
      const std::size_t base = 4 * k;  // u⁺_ij, u⁻_ij, u⁺_ji, u⁻_ji
      LpConstraint eq;
      eq.coeffs.assign(nvars, 0.0);
      eq.coeffs[base] = 1.0;
      eq.coeffs[base + 1] = -1.0;
      eq.coeffs[base + 2] = -1.0;
      eq.coeffs[base + 3] = 1.0;
      eq.relation = Relation::Equal;
      eq.rhs = w(j, i) - w(i, j);
      lp.constraints.push_back(std::move(eq));
      columns[j].coeffs[base] = columns[j].coeffs[base + 1] = 1.0;
      columns[i].coeffs[base + 2] = columns[i].coeffs[base + 3] = 1.0;
    }
  for (auto& col : columns) lp.constraints.push_back(std::move(col));

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalError("symmetrize_l1: LP returned a non-optimal status (internal error)");
  result.lp_pivots = sol.pivots;
  result.bland_engaged = sol.bland_engaged;

  DenseMatrix out = w;
  k = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j, ++k) {
      const double v = w(i, j) + sol.x[4 * k] - sol.x[4 * k + 1];
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

}  // namespace

SymmetrizeResult symmetrize_l1(const DenseMatrix& omega_bar, SymmetrizeMode mode) {
  if (!omega_bar.is_square()) throw ValidationError("symmetrize_l1: matrix must be square");
  if (!omega_bar.all_finite()) throw ValidationError("symmetrize_l1: non-finite entry");
  const std::size_t p = omega_bar.rows();
  if (mode == SymmetrizeMode::Auto)
    mode = p <= kExactModeMaxP ? SymmetrizeMode::Exact : SymmetrizeMode::Heuristic;

  SymmetrizeResult result{omega_bar, mode, 0.0};
  if (omega_bar.is_symmetric()) return result;
  result.matrix = mode == SymmetrizeMode::Exact ? exact(omega_bar, result) : heuristic(omega_bar);
  result.objective = operator_l1_norm(result.matrix - omega_bar);
  return result;
}

}  // namespace qggm
