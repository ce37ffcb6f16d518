#pragma once

#include <cstddef>

#include "qggm/matrix.hpp"

namespace qggm {

/// Latent scales of the half-Cauchy scale-mixture augmentation:
///   ω_ij | λ²_ij, τ² ~ N(0, λ²_ij τ²),  λ²_ij | v_ij ~ IG(1/2, 1/v_ij),
///   τ² | κ ~ IG(1/2, 1/κ),  v_ij, κ ~ IG(1/2, 1).
/// lambda2 and v carry a zero diagonal; all off-diagonal entries are positive.
struct HorseshoeState {
  DenseMatrix lambda2;
  DenseMatrix v;
  double tau2 = 1.0;
  double kappa = 1.0;

  /// λ² = v = τ² = κ = 1.
  static HorseshoeState initial(std::size_t p);

  std::size_t p() const { return lambda2.rows(); }
  /// Throws ValidationError if any invariant is broken.
  void validate() const;
};

/// Inputs of the prior concentration and thickness conditions.
struct PriorConditionSpec {
  double a_n = 0.0;    ///< concentration radius
  double E_n = 0.0;    ///< signal-strength bound
  std::size_t p = 0;
  double u = 0.0;      ///< concentration exponent, > 0
  double c = 0.0;      ///< thickness exponent, > 1
  double alpha = 0.0;  ///< global scale

  void validate() const;
};

inline constexpr double kDefaultQuadratureTol = 1e-8;

/// Marginal density of ω = alpha·λ·z with λ ~ C⁺(0, 1), z ~ N(0, 1):
///   ∫₀^∞ N(x | 0, alpha²λ²)·(2/π)(1 + λ²)⁻¹ dλ.
/// Infinite at x = 0. Absolute error ≤ tol (or 1e-12 relative, if looser).
double horseshoe_marginal_density(double x, double alpha, double tol = kDefaultQuadratureTol);

/// P(|ω| > a) under the same marginal.
double horseshoe_tail_mass(double a, double alpha, double tol = kDefaultQuadratureTol);

struct ConcentrationCheck {
  double mass_outside;
  double threshold;  ///< p^{-(1+u)}
  bool passes;
};

struct ThicknessCheck {
  double inf_density;
  double threshold;  ///< p^{-c}
  bool passes;
};

/// 1 − ∫_{−a_n}^{a_n} π_α ≤ p^{-(1+u)}.
ConcentrationCheck check_concentration(const PriorConditionSpec& spec,
                                       double tol = kDefaultQuadratureTol);

/// inf_{|x| ≤ E_n} π_α(x) ≥ p^{-c}.
ThicknessCheck check_thickness(const PriorConditionSpec& spec, double tol = kDefaultQuadratureTol);

}  // namespace qggm
