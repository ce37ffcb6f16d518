#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "qggm/matrix.hpp"

namespace qggm {

/// max_j Σ_i |a_ij|
double operator_l1_norm(const DenseMatrix& a);

/// Largest singular value by power iteration on AᵀA (relative tolerance 1e-8,
/// at most 10⁴ iterations). Throws NumericalError on non-convergence.
double spectral_norm(const DenseMatrix& a);

enum class SymmetrizeMode { Exact, Heuristic, Auto };

/// Exact mode is used by Auto up to this dimension.
inline constexpr std::size_t kExactModeMaxP = 30;

SymmetrizeMode parse_symmetrize_mode(std::string_view name);
std::string to_string(SymmetrizeMode mode);

struct SymmetrizeResult {
  DenseMatrix matrix;
  /// Exact or Heuristic, never Auto.
  SymmetrizeMode mode_used;
  /// ‖matrix − input‖_ℓ1
  double objective;
  std::size_t lp_pivots = 0;
  bool bland_engaged = false;
};

/// Nearest symmetric matrix in the induced ℓ1 norm (exact, via LP) or the
/// entrywise min-magnitude choice (heuristic). The diagonal passes through and
/// symmetric input comes back unchanged.
SymmetrizeResult symmetrize_l1(const DenseMatrix& omega_bar, SymmetrizeMode mode = SymmetrizeMode::Auto);

}  // namespace qggm
