#include "qggm/pseudo_likelihood.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "qggm/errors.hpp"

namespace qggm {

namespace {
void check_dims(const DenseMatrix& y, const PrecisionDraw& omega) {
  if (y.cols() != omega.p())
    throw ValidationError("log_pseudo_likelihood: data has " + std::to_string(y.cols()) +
                          " columns but omega is " + std::to_string(omega.p()) + "x" +
                          std::to_string(omega.p()));
}
}  // namespace

double log_pseudo_likelihood_column(const DenseMatrix& y, const PrecisionDraw& omega, std::size_t j) {
  check_dims(y, omega);
  if (j >= omega.p()) throw ValidationError("log_pseudo_likelihood_column: column out of range");
  const std::size_t n = y.rows();
  const std::size_t p = omega.p();
  const double w_jj = omega.diag(j);

  // residual = Y_j + Σ_{k≠j} (ω_kj/ω_jj) Y_k
  std::vector<double> residual(n);
  for (std::size_t r = 0; r < n; ++r) residual[r] = y(r, j);
  for (std::size_t k = 0; k < p; ++k) {
    if (k == j) continue;
    const double coef = omega.offdiag(k, j) / w_jj;
    if (coef == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) residual[r] += coef * y(r, k);
  }
  double sq = 0.0;
  for (double v : residual) sq += v * v;
  return 0.5 * static_cast<double>(n) * std::log(w_jj / (2.0 * std::numbers::pi)) - 0.5 * w_jj * sq;
}

double log_pseudo_likelihood(const DenseMatrix& y, const PrecisionDraw& omega) {
  check_dims(y, omega);
  double total = 0.0;
  for (std::size_t j = 0; j < omega.p(); ++j) total += log_pseudo_likelihood_column(y, omega, j);
  return total;
}

}  // namespace qggm
