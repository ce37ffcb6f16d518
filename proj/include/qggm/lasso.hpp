#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qggm/matrix.hpp"

namespace qggm {

struct LassoFit {
  std::vector<double> beta;
  double lambda = 0.0;
  std::size_t s_hat = 0;  ///< number of exactly-nonzero coefficients
  double mse_df = 0.0;    ///< ‖y − Xβ‖² / (n − s_hat)
  std::size_t sweeps = 0;
};

inline constexpr double kLassoTol = 1e-7;
inline constexpr std::size_t kLassoMaxSweeps = 10'000;

/// max_j |X_jᵀy| / n: the smallest penalty with an all-zero solution.
double lasso_lambda_max(const DenseMatrix& x, std::span<const double> y);

/// `count` log-spaced penalties from lambda_max down to ratio·lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t count = 50, double ratio = 1e-3);

/// Minimizes (1/2n)‖y − Xβ‖² + λ‖β‖₁ by cyclic coordinate descent with
/// soft-thresholding, no intercept, no standardization. Stops when the largest
/// coefficient change in a sweep is below kLassoTol; throws NumericalError
/// after kLassoMaxSweeps sweeps.
LassoFit lasso_cd(const DenseMatrix& x, std::span<const double> y, double lambda);

/// Warm-started fits along a decreasing penalty sequence.
std::vector<LassoFit> lasso_path(const DenseMatrix& x, std::span<const double> y,
                                 std::span<const double> lambdas);

double lasso_objective(const DenseMatrix& x, std::span<const double> y, std::span<const double> beta,
                       double lambda);

/// Largest violation of the optimality conditions, computed from X directly:
/// |X_jᵀr/n| − λ for zero coefficients, |X_jᵀr/n − λ·sign β_j| otherwise.
double kkt_violation(const DenseMatrix& x, std::span<const double> y, const LassoFit& fit);
bool passes_kkt(const DenseMatrix& x, std::span<const double> y, const LassoFit& fit,
                double tol = 1e-5);

/// Y with column i removed (predictors for node i).
DenseMatrix drop_column(const DenseMatrix& y, std::size_t i);

struct DiagonalEstimate {
  std::vector<double> omega;     ///< ω̂_ii = 1 / mse_df
  std::vector<double> lambda;    ///< CV-selected penalty per column
  std::vector<bool> fallback;    ///< degenerate fit replaced by the λ_max fit
  std::vector<LassoFit> fits;    ///< final full-data fit per column
};

/// For each node, picks λ by `folds`-fold CV (held-out MSE over a 50-point
/// grid), refits on all rows, and inverts the df-adjusted residual variance.
/// Fold membership of rows is drawn once from (seed, fold stream).
DiagonalEstimate estimate_diagonal(const DenseMatrix& y, std::size_t folds = 5,
                                   std::uint64_t seed = 1);

}  // namespace qggm
