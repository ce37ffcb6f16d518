#include "qggm/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qggm/errors.hpp"
#include "quadrature.hpp"

namespace qggm {

HorseshoeState HorseshoeState::initial(std::size_t p) {
  HorseshoeState s{DenseMatrix(p, p, 1.0), DenseMatrix(p, p, 1.0), 1.0, 1.0};
  for (std::size_t i = 0; i < p; ++i) {
    s.lambda2(i, i) = 0.0;
    s.v(i, i) = 0.0;
  }
  return s;
}

void HorseshoeState::validate() const {
  const std::size_t n = p();
  if (lambda2.cols() != n || v.rows() != n || v.cols() != n)
    throw ValidationError("HorseshoeState: scale matrices must be p x p");
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(tau2) || !positive(kappa))
    throw ValidationError("HorseshoeState: tau2 and kappa must be positive and finite");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!positive(lambda2(i, j)) || !positive(v(i, j)))
        throw ValidationError("HorseshoeState: non-positive local scale at (" + std::to_string(i) +
                              ", " + std::to_string(j) + ")");
    }
}

void PriorConditionSpec::validate() const {
  auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
  if (!positive(a_n) || !positive(E_n) || !positive(u) || !positive(alpha))
    throw ValidationError("PriorConditionSpec: a_n, E_n, u and alpha must be positive");
  if (!(a_n < E_n)) throw ValidationError("PriorConditionSpec: requires a_n < E_n");
  if (!(c > 1.0) || !std::isfinite(c)) throw ValidationError("PriorConditionSpec: requires c > 1");
  if (p < 1) throw ValidationError("PriorConditionSpec: requires p >= 1");
}

namespace {

constexpr double kUpperCut = 40.0;  // exp(-40²/2) underflows.

void check_tol(double tol) {
  if (!(tol > 0.0) || tol > 1e-4) throw ValidationError("quadrature tolerance must lie in (0, 1e-4]");
}

// Cheap composite Simpson used only to scale the adaptive tolerance.
template <class F>
double rough_integral(F& f, double a, double b) {
  constexpr int panels = 64;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int k = 1; k < panels; ++k) acc += f(a + k * h) * ((k % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

template <class F>
double integrate_scaled(F f, double a, double b, double abs_tol) {
  const double guess = std::abs(rough_integral(f, a, b));
  const double eps = std::max(abs_tol, 1e-12 * guess);
  return detail::adaptive_simpson(f, a, b, eps > 0.0 ? eps : abs_tol);
}

}  // namespace

double horseshoe_marginal_density(double x, double alpha, double tol) {
  check_tol(tol);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be positive");
  if (!std::isfinite(x)) throw ValidationError("density argument must be finite");
  if (x == 0.0) return std::numeric_limits<double>::infinity();

  // With u = |x|/(alpha·λ) the integral becomes
  //   K·∫₀^∞ u·e^{-u²/2}/(u² + c²) du,  c = |x|/alpha,  K = (2/π)/(√(2π)·alpha),
  // and u = e^s turns the c-scale feature into a smooth shoulder.
  const double c = std::abs(x) / alpha;
  const double c2 = c * c;
  const double prefactor = (2.0 / std::numbers::pi) / (std::sqrt(2.0 * std::numbers::pi) * alpha);
  auto integrand = [c2](double s) {
    const double u2 = std::exp(2.0 * s);
    return u2 * std::exp(-0.5 * u2) / (u2 + c2);
  };
  const double lo = std::min(std::log(c), 0.0) - 15.0;
  const double hi = std::log(kUpperCut);
  return prefactor * integrate_scaled(integrand, lo, hi, tol / prefactor);
}

double horseshoe_tail_mass(double a, double alpha, double tol) {
  check_tol(tol);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be positive");
  if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("radius must be positive");

  // P(|z| > a/(alpha·λ)) averaged over λ ~ C⁺(0,1); with s = k/λ, k = a/alpha:
  //   (2/π)·∫₀^∞ erfc(s/√2)·k/(s² + k²) ds.
  const double k = a / alpha;
  auto integrand = [k](double t) {
    const double s = std::exp(t);
    return std::erfc(s / std::numbers::sqrt2) * k * s / (s * s + k * k);
  };
  const double lo = std::min(std::log(k), 0.0) - 30.0;
  const double hi = std::log(kUpperCut);
  const double scale = 2.0 / std::numbers::pi;
  // Relative accuracy matters when the mass is tiny, so tighten below tol.
  const double guess = scale * std::abs(rough_integral(integrand, lo, hi));
  const double abs_tol = std::min(tol, std::max(1e-6 * guess, 1e-300));
  const double mass = scale * integrate_scaled(integrand, lo, hi, abs_tol / scale);
  return std::clamp(mass, 0.0, 1.0);
}

ConcentrationCheck check_concentration(const PriorConditionSpec& spec, double tol) {
  spec.validate();
  const double mass = horseshoe_tail_mass(spec.a_n, spec.alpha, tol);
  const double threshold = std::pow(static_cast<double>(spec.p), -(1.0 + spec.u));
  return {mass, threshold, mass <= threshold};
}

ThicknessCheck check_thickness(const PriorConditionSpec& spec, double tol) {
  spec.validate();
  // The marginal is even and decreasing in |x|, so the infimum sits at |x| = E_n;
  // the grid scan guards that claim numerically.
  constexpr int grid = 200;
  double inf_density = horseshoe_marginal_density(spec.E_n, spec.alpha, tol);
  for (int k = 1; k < grid; ++k) {
    const double x = spec.E_n * k / grid;
    inf_density = std::min(inf_density, horseshoe_marginal_density(x, spec.alpha, tol));
  }
  const double threshold = std::pow(static_cast<double>(spec.p), -spec.c);
  return {inf_density, threshold, inf_density >= threshold};
}

}  // namespace qggm
