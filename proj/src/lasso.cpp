#include "qggm/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qggm/errors.hpp"
#include "qggm/rng.hpp"

namespace qggm {

namespace {

constexpr std::uint64_t kFoldStreamId = 0x1A550ull;

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

// Coordinate descent on the sufficient statistics G = XᵀX, c = Xᵀy.
// `grad` tracks c − Gβ throughout; `beta` is used as the warm start.
class GramLasso {
 public:
  GramLasso(DenseMatrix g, std::vector<double> xty, double n)
      : g_(std::move(g)), xty_(std::move(xty)), n_(n) {}

  std::size_t dim() const { return xty_.size(); }
  const DenseMatrix& gram() const { return g_; }

  double lambda_max() const {
    double m = 0.0;
    for (double c : xty_) m = std::max(m, std::abs(c));
    return m / n_;
  }

  // Returns the number of sweeps used.
  std::size_t solve(double lambda, std::vector<double>& beta) const {
    const std::size_t q = dim();
    beta.resize(q, 0.0);
    std::vector<double> grad = xty_;
    for (std::size_t k = 0; k < q; ++k)
      if (beta[k] != 0.0) axpy(-beta[k], k, grad);

    std::size_t sweeps = 0;
    std::vector<std::size_t> active;
    while (true) {
      // Full sweep, then iterate on the active set until it settles.
      if (++sweeps > kLassoMaxSweeps) break;
      if (sweep_all(lambda, beta, grad) < kLassoTol) return sweeps;
      active.clear();
      for (std::size_t k = 0; k < q; ++k)
        if (beta[k] != 0.0) active.push_back(k);
      while (true) {
        if (++sweeps > kLassoMaxSweeps) break;
        if (sweep(active, lambda, beta, grad) < kLassoTol) break;
      }
      if (sweeps > kLassoMaxSweeps) break;
    }
    throw NumericalError("lasso_cd: no convergence after " + std::to_string(kLassoMaxSweeps) +
                         " sweeps at lambda = " + std::to_string(lambda));
  }

 private:
  void axpy(double a, std::size_t k, std::vector<double>& grad) const {
    auto col = g_.row(k);  // G is symmetric
    for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += a * col[j];
  }

  double update(std::size_t k, double lambda, std::vector<double>& beta,
                std::vector<double>& grad) const {
    const double gkk = g_(k, k) / n_;
    const double old = beta[k];
    const double fresh = gkk > 0.0 ? soft_threshold(grad[k] / n_ + gkk * old, lambda) / gkk : 0.0;
    if (fresh == old) return 0.0;
    beta[k] = fresh;
    axpy(-(fresh - old), k, grad);
    return std::abs(fresh - old);
  }

  double sweep_all(double lambda, std::vector<double>& beta, std::vector<double>& grad) const {
    double change = 0.0;
    for (std::size_t k = 0; k < dim(); ++k) change = std::max(change, update(k, lambda, beta, grad));
    return change;
  }

  double sweep(const std::vector<std::size_t>& idx, double lambda, std::vector<double>& beta,
               std::vector<double>& grad) const {
    double change = 0.0;
    for (std::size_t k : idx) change = std::max(change, update(k, lambda, beta, grad));
    return change;
  }

  DenseMatrix g_;
  std::vector<double> xty_;
  double n_;
};

void check_problem(const DenseMatrix& x, std::span<const double> y) {
  if (x.rows() != y.size()) throw ValidationError("lasso: X rows and y length differ");
  if (x.rows() < 2) throw ValidationError("lasso: need at least 2 observations");
  if (!x.all_finite()) throw ValidationError("lasso: non-finite predictor");
  for (double v : y)
    if (!std::isfinite(v)) throw ValidationError("lasso: non-finite response");
}

GramLasso direct_system(const DenseMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  const std::size_t q = x.cols();
  DenseMatrix g(q, q);
  std::vector<double> xty(q, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    auto xr = x.row(r);
    for (std::size_t a = 0; a < q; ++a) {
      const double v = xr[a];
      if (v == 0.0) continue;
      xty[a] += v * y[r];
      auto grow = g.row(a);
      for (std::size_t b = a; b < q; ++b) grow[b] += v * xr[b];
    }
  }
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a + 1; b < q; ++b) g(b, a) = g(a, b);
  return GramLasso(std::move(g), std::move(xty), static_cast<double>(n));
}

std::vector<double> residual(const DenseMatrix& x, std::span<const double> y,
                             std::span<const double> beta) {
  std::vector<double> r(y.begin(), y.end());
  for (std::size_t row = 0; row < x.rows(); ++row) {
    auto xr = x.row(row);
    double fit = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) fit += xr[k] * beta[k];
    r[row] -= fit;
  }
  return r;
}

LassoFit finish_fit(const DenseMatrix& x, std::span<const double> y, std::vector<double> beta,
                    double lambda, std::size_t sweeps) {
  LassoFit fit;
  fit.s_hat = static_cast<std::size_t>(
      std::count_if(beta.begin(), beta.end(), [](double b) { return b != 0.0; }));
  const auto r = residual(x, y, beta);
  double rss = 0.0;
  for (double v : r) rss += v * v;
  const double dof = static_cast<double>(x.rows()) - static_cast<double>(fit.s_hat);
  fit.mse_df = dof > 0.0 ? rss / dof : std::numeric_limits<double>::quiet_NaN();
  fit.beta = std::move(beta);
  fit.lambda = lambda;
  fit.sweeps = sweeps;
  return fit;
}

// Sub-system for node i from a p×p second-moment matrix M: G = M[-i,-i], c = M[-i,i].
GramLasso node_system(const DenseMatrix& m, std::size_t i, double n) {
  const std::size_t p = m.rows();
  DenseMatrix g(p - 1, p - 1);
  std::vector<double> c(p - 1);
  for (std::size_t a = 0, ra = 0; a < p; ++a) {
    if (a == i) continue;
    c[ra] = m(a, i);
    for (std::size_t b = 0, rb = 0; b < p; ++b) {
      if (b == i) continue;
      g(ra, rb++) = m(a, b);
    }
    ++ra;
  }
  return GramLasso(std::move(g), std::move(c), n);
}

// Held-out squared error ‖y_h − X_h β‖² from the held-out second moments H.
double heldout_error(const DenseMatrix& h, std::size_t i, std::span<const double> beta) {
  const std::size_t p = h.rows();
  std::vector<std::size_t> idx;
  std::vector<double> b;
  for (std::size_t a = 0, ra = 0; a < p; ++a) {
    if (a == i) continue;
    if (beta[ra] != 0.0) {
      idx.push_back(a);
      b.push_back(beta[ra]);
    }
    ++ra;
  }
  double err = h(i, i);
  for (std::size_t u = 0; u < idx.size(); ++u) {
    err -= 2.0 * b[u] * h(idx[u], i);
    for (std::size_t w = 0; w < idx.size(); ++w) err += b[u] * b[w] * h(idx[u], idx[w]);
  }
  return std::max(err, 0.0);
}

DenseMatrix second_moments(const DenseMatrix& y, std::span<const std::size_t> rows) {
  const std::size_t p = y.cols();
  DenseMatrix h(p, p);
  for (std::size_t r : rows) {
    auto yr = y.row(r);
    for (std::size_t a = 0; a < p; ++a) {
      const double v = yr[a];
      if (v == 0.0) continue;
      auto hrow = h.row(a);
      for (std::size_t b = a; b < p; ++b) hrow[b] += v * yr[b];
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) h(b, a) = h(a, b);
  return h;
}

}  // namespace

double lasso_lambda_max(const DenseMatrix& x, std::span<const double> y) {
  check_problem(x, y);
  return direct_system(x, y).lambda_max();
}

std::vector<double> lambda_grid(double lambda_max, std::size_t count, double ratio) {
  if (!(lambda_max > 0.0)) throw ValidationError("lambda_grid: lambda_max must be positive");
  if (count < 2) return {lambda_max};
  std::vector<double> grid(count);
  const double step = std::log(ratio) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = lambda_max * std::exp(step * static_cast<double>(k));
  return grid;
}

LassoFit lasso_cd(const DenseMatrix& x, std::span<const double> y, double lambda) {
  check_problem(x, y);
  if (!(lambda > 0.0)) throw ValidationError("lasso_cd: lambda must be positive");
  const GramLasso sys = direct_system(x, y);
  std::vector<double> beta(x.cols(), 0.0);
  const std::size_t sweeps = sys.solve(lambda, beta);
  return finish_fit(x, y, std::move(beta), lambda, sweeps);
}

std::vector<LassoFit> lasso_path(const DenseMatrix& x, std::span<const double> y,
                                 std::span<const double> lambdas) {
  check_problem(x, y);
  const GramLasso sys = direct_system(x, y);
  std::vector<LassoFit> out;
  std::vector<double> beta(x.cols(), 0.0);
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw ValidationError("lasso_path: lambdas must be positive");
    const std::size_t sweeps = sys.solve(lambda, beta);
    out.push_back(finish_fit(x, y, beta, lambda, sweeps));
  }
  return out;
}

double lasso_objective(const DenseMatrix& x, std::span<const double> y, std::span<const double> beta,
                       double lambda) {
  const auto r = residual(x, y, beta);
  double rss = 0.0;
  for (double v : r) rss += v * v;
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  return rss / (2.0 * static_cast<double>(x.rows())) + lambda * l1;
}

double kkt_violation(const DenseMatrix& x, std::span<const double> y, const LassoFit& fit) {
  const auto r = residual(x, y, fit.beta);
  const double n = static_cast<double>(x.rows());
  double worst = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double g = 0.0;
    for (std::size_t row = 0; row < x.rows(); ++row) g += x(row, j) * r[row];
    g /= n;
    const double b = fit.beta[j];
    const double v = (b == 0.0) ? std::abs(g) - fit.lambda
                                : std::abs(g - fit.lambda * (b > 0.0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

bool passes_kkt(const DenseMatrix& x, std::span<const double> y, const LassoFit& fit, double tol) {
  return kkt_violation(x, y, fit) <= tol;
}

DenseMatrix drop_column(const DenseMatrix& y, std::size_t i) {
  if (i >= y.cols()) throw ValidationError("drop_column: index out of range");
  DenseMatrix x(y.rows(), y.cols() - 1);
  for (std::size_t r = 0; r < y.rows(); ++r)
    for (std::size_t c = 0, rc = 0; c < y.cols(); ++c)
      if (c != i) x(r, rc++) = y(r, c);
  return x;
}

DiagonalEstimate estimate_diagonal(const DenseMatrix& y, std::size_t folds, std::uint64_t seed) {
  const std::size_t n = y.rows();
  const std::size_t p = y.cols();
  if (p < 2) throw ValidationError("estimate_diagonal: need at least 2 variables");
  if (n < 2) throw ValidationError("estimate_diagonal: need at least 2 observations");
  if (folds < 2 || folds > n) throw ValidationError("estimate_diagonal: folds must lie in [2, n]");
  if (!y.all_finite()) throw ValidationError("estimate_diagonal: non-finite data");

  // Row folds shared by all nodes.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  RngStream fold_stream(seed, kFoldStreamId);
  for (std::size_t k = n; k > 1; --k) {
    const std::size_t j = std::min(k - 1, static_cast<std::size_t>(fold_stream.uniform() * k));
    std::swap(perm[k - 1], perm[j]);
  }
  std::vector<std::vector<std::size_t>> fold_rows(folds);
  for (std::size_t pos = 0; pos < n; ++pos) fold_rows[pos % folds].push_back(perm[pos]);

  std::vector<std::size_t> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
  const DenseMatrix full = second_moments(y, all_rows);
  std::vector<DenseMatrix> heldout;
  for (const auto& rows : fold_rows) heldout.push_back(second_moments(y, rows));

  DiagonalEstimate est;
  est.omega.resize(p);
  est.lambda.resize(p);
  est.fallback.assign(p, false);
  est.fits.resize(p);

  for (std::size_t i = 0; i < p; ++i) {
    const DenseMatrix x = drop_column(y, i);
    const std::vector<double> response = y.col(i);
    const GramLasso full_sys = node_system(full, i, static_cast<double>(n));
    const double lmax = full_sys.lambda_max();
    double yty = 0.0;
    for (double v : response) yty += v * v;
    if (!(yty > 0.0))
      throw ValidationError("estimate_diagonal: column " + std::to_string(i) + " is identically zero");

    LassoFit null_fit = finish_fit(x, response, std::vector<double>(p - 1, 0.0), lmax, 0);
    if (!(lmax > 0.0)) {
      est.fits[i] = null_fit;
      est.lambda[i] = 0.0;
      est.omega[i] = 1.0 / null_fit.mse_df;
      continue;
    }

    const std::vector<double> grid = lambda_grid(lmax);
    std::vector<double> cv_error(grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
      const DenseMatrix train = full - heldout[f];
      const double n_train = static_cast<double>(n - fold_rows[f].size());
      const GramLasso sys = node_system(train, i, n_train);
      std::vector<double> beta(p - 1, 0.0);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        try {
          sys.solve(grid[k], beta);
          cv_error[k] += heldout_error(heldout[f], i, beta);
        } catch (const NumericalError&) {
          // An unconverged CV fit cannot be selected.
          cv_error[k] = std::numeric_limits<double>::infinity();
        }
      }
    }
    const std::size_t best = static_cast<std::size_t>(
        std::min_element(cv_error.begin(), cv_error.end()) - cv_error.begin());

    std::vector<double> beta(p - 1, 0.0);
    std::size_t sweeps = 0;
    for (std::size_t k = 0; k <= best; ++k) sweeps += full_sys.solve(grid[k], beta);
    LassoFit fit = finish_fit(x, response, std::move(beta), grid[best], sweeps);

    const bool degenerate = !(fit.mse_df > 1e-12 * yty / static_cast<double>(n));
    if (degenerate) {
      est.fallback[i] = true;
      fit = null_fit;
    }
    est.lambda[i] = fit.lambda;
    est.omega[i] = 1.0 / fit.mse_df;
    est.fits[i] = std::move(fit);
  }
  return est;
}

}  // namespace qggm
