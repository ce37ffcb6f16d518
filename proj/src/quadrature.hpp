#pragma once

#include <cmath>
#include <string>

#include "qggm/errors.hpp"

namespace qggm::detail {

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`. Throws
/// NumericalError when the recursion depth or the evaluation budget runs out
/// before the local error estimates fall below tolerance.
template <class F>
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(F f, double tol, int max_depth = 50, long max_evals = 2'000'000)
      : f_(std::move(f)), tol_(tol), max_depth_(max_depth), max_evals_(max_evals) {}

  double integrate(double a, double b) {
    const double fa = eval(a);
    const double fb = eval(b);
    const double m = 0.5 * (a + b);
    const double fm = eval(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return recurse(a, b, fa, fm, fb, whole, tol_, 0);
  }

 private:
  double eval(double x) {
    if (++evals_ > max_evals_) throw NumericalError("adaptive Simpson: evaluation budget exhausted");
    return f_(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // Depth floor avoids accepting a lucky agreement on a coarse panel.
    if (depth >= 6 && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth_)
      throw NumericalError("adaptive Simpson: no convergence at depth " + std::to_string(depth));
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }

  F f_;
  double tol_;
  int max_depth_;
  long max_evals_;
  long evals_ = 0;
};

template <class F>
double adaptive_simpson(F f, double a, double b, double tol) {
  return AdaptiveSimpson<F>(std::move(f), tol).integrate(a, b);
}

}  // namespace qggm::detail
