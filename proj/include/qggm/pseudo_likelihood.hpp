#pragma once

#include <cstddef>

#include "qggm/matrix.hpp"

namespace qggm {

/// Log of the column-j conditional Gaussian score:
///   (n/2)·log(ω_jj/2π) − (ω_jj/2)·‖Y_j + Σ_{k≠j} (ω_kj/ω_jj)·Y_k‖².
double log_pseudo_likelihood_column(const DenseMatrix& y, const PrecisionDraw& omega, std::size_t j);

/// Sum of the p column scores. 2π constants are kept.
double log_pseudo_likelihood(const DenseMatrix& y, const PrecisionDraw& omega);

}  // namespace qggm
