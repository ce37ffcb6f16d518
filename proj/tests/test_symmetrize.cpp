#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qggm/errors.hpp"
#include "qggm/rng.hpp"
#include "qggm/simplex.hpp"
#include "qggm/symmetrize.hpp"

using namespace qggm;

namespace {

DenseMatrix random_square(std::size_t p, RngStream& rng, bool symmetric = false) {
  DenseMatrix a(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) a(i, j) = sample_normal(rng, 0, 1);
  if (symmetric)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  return a;
}

}  // namespace

TEST_CASE("simplex: textbook maximization") {
  // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
  LpProblem lp;
  lp.objective = {-3, -5};
  lp.constraints = {{{1, 0}, Relation::LessEqual, 4}, {{0, 2}, Relation::LessEqual, 12},
                    {{3, 2}, Relation::LessEqual, 18}};
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-36));
  CHECK(s.x[0] == doctest::Approx(2));
  CHECK(s.x[1] == doctest::Approx(6));
}

TEST_CASE("simplex: equality, >= rows, free and bounded variables") {
  // min x − y, x + y = 1, x − y ≥ −3, y ≤ 1.5, x free.
  LpProblem lp;
  lp.objective = {1, -1};
  lp.constraints = {{{1, 1}, Relation::Equal, 1}, {{1, -1}, Relation::GreaterEqual, -3}};
  lp.lower = {-INFINITY, 0};
  lp.upper = {INFINITY, 1.5};
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(-0.5));
  CHECK(s.x[1] == doctest::Approx(1.5));
  CHECK(s.objective == doctest::Approx(-2.0));
}

TEST_CASE("simplex: infeasible and unbounded problems") {
  LpProblem inf;
  inf.objective = {1};
  inf.constraints = {{{1}, Relation::LessEqual, -1}};
  CHECK(solve_lp(inf).status == LpStatus::Infeasible);
  LpProblem unb;
  unb.objective = {-1, 0};
  unb.constraints = {{{1, -1}, Relation::LessEqual, 1}};
  CHECK(solve_lp(unb).status == LpStatus::Unbounded);
}

TEST_CASE("simplex: random small LPs match vertex enumeration") {
  RngStream rng(12, 0);
  for (int rep = 0; rep < 30; ++rep) {
    // min cᵀx over 0 ≤ x ≤ 1 (box keeps it bounded) with two random ≤ rows.
    LpProblem lp;
    lp.objective = {sample_normal(rng, 0, 1), sample_normal(rng, 0, 1)};
    for (int r = 0; r < 2; ++r)
      lp.constraints.push_back({{sample_normal(rng, 0, 1), sample_normal(rng, 0, 1)}, Relation::LessEqual,
                                0.5 + rng.uniform()});
    lp.lower = {0, 0};
    lp.upper = {1, 1};
    double best = INFINITY;
    for (int a = 0; a <= 2000; ++a)
      for (int b = 0; b <= 2000; b += 1) {
        const double x = a / 2000.0, y = b / 2000.0;
        bool ok = true;
        for (const auto& c : lp.constraints) ok = ok && c.coeffs[0] * x + c.coeffs[1] * y <= c.rhs + 1e-12;
        if (ok) best = std::min(best, lp.objective[0] * x + lp.objective[1] * y);
      }
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective <= best + 1e-9);
    CHECK(s.objective >= best - 2e-3);
  }
}

TEST_CASE("operator_l1_norm and spectral_norm: examples") {
  CHECK(operator_l1_norm(DenseMatrix::identity(4)) == 1.0);
  CHECK(operator_l1_norm(DenseMatrix{{1, -3}, {2, 0}}) == 3.0);
  CHECK(spectral_norm(DenseMatrix{{3, 0}, {0, 1}}) == doctest::Approx(3.0).epsilon(1e-8));
  const std::vector<double> u{0.6, 0.8, 0.0}, v{0.0, 0.6, -0.8};
  DenseMatrix r1(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r1(i, j) = u[i] * v[j];
  CHECK(spectral_norm(r1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(spectral_norm(DenseMatrix(3, 3)) == 0.0);
}

TEST_CASE("spectral_norm matches a Jacobi eigen-solver and is dominated by the l1 norm") {
  RngStream rng(14, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = rep < 10 ? 5 : 6;
    const DenseMatrix a = random_square(p, rng, true);
    const auto ev = oracle::jacobi_eigenvalues(a);
    const double ref = std::max(std::abs(ev.front()), std::abs(ev.back()));
    const double sn = spectral_norm(a);
    CHECK(sn == doctest::Approx(ref).epsilon(1e-6));
    CHECK(operator_l1_norm(a) >= sn - 1e-9);
  }
}

TEST_CASE("symmetrize: 2x2 worked example against a grid") {
  const DenseMatrix w{{1, 0.4}, {0.2, 1}};
  const SymmetrizeResult r = symmetrize_l1(w, SymmetrizeMode::Exact);
  CHECK(r.objective == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(std::abs(oracle::grid_symmetrize_2x2(w, -1, 1, 1e-4) - r.objective) <= 2e-4);
  CHECK(r.matrix.is_symmetric());
  CHECK(r.matrix(0, 0) == 1.0);
  const SymmetrizeResult h = symmetrize_l1(w, SymmetrizeMode::Heuristic);
  CHECK(h.matrix(0, 1) == 0.2);
  CHECK(h.objective == doctest::Approx(0.2));
}

TEST_CASE("symmetrize: symmetric input is returned unchanged") {
  RngStream rng(15, 0);
  const DenseMatrix a = random_square(6, rng, true);
  for (auto mode : {SymmetrizeMode::Exact, SymmetrizeMode::Heuristic, SymmetrizeMode::Auto}) {
    const SymmetrizeResult r = symmetrize_l1(a, mode);
    CHECK(r.matrix == a);
    CHECK(r.objective == 0.0);
  }
}

TEST_CASE("symmetrize: heuristic ties keep the upper entry") {
  const DenseMatrix w{{1, -0.3}, {0.3, 1}};
  CHECK(symmetrize_l1(w, SymmetrizeMode::Heuristic).matrix(1, 0) == -0.3);
}

TEST_CASE("symmetrize: exact optimum matches oracles on 2x2 and 3x3 cases") {
  RngStream rng(16, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const DenseMatrix w2 = random_square(2, rng);
    const double lo = -4, hi = 4;
    const SymmetrizeResult r2 = symmetrize_l1(w2, SymmetrizeMode::Exact);
    CHECK(std::abs(oracle::grid_symmetrize_2x2(w2, lo, hi, 1e-4) - r2.objective) <= 2e-4);
    const DenseMatrix w3 = random_square(3, rng);
    const SymmetrizeResult r3 = symmetrize_l1(w3, SymmetrizeMode::Exact);
    CHECK(std::abs(oracle::nested_symmetrize_3x3(w3, lo, hi) - r3.objective) <= 2e-4);
  }
}

TEST_CASE("symmetrize: exact beats heuristic and averaging; both obey the triangle bound") {
  RngStream rng(18, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const DenseMatrix w = random_square(5, rng);
    const SymmetrizeResult ex = symmetrize_l1(w, SymmetrizeMode::Exact);
    const SymmetrizeResult he = symmetrize_l1(w, SymmetrizeMode::Heuristic);
    CHECK(ex.objective <= he.objective + 1e-9);
    const DenseMatrix avg = 0.5 * (w + w.transpose());
    CHECK(ex.objective <= operator_l1_norm(avg - w) + 1e-9);
    for (int m = 0; m < 3; ++m) {
      const DenseMatrix ref = random_square(5, rng, true);
      const double bound = 2.0 * operator_l1_norm(w - ref) + 1e-9;
      CHECK(operator_l1_norm(ex.matrix - ref) <= bound);
      CHECK(operator_l1_norm(he.matrix - ref) <= bound);
    }
  }
}

TEST_CASE("symmetrize: idempotent, auto picks by dimension") {
  RngStream rng(19, 0);
  const DenseMatrix w = random_square(7, rng);
  for (auto mode : {SymmetrizeMode::Exact, SymmetrizeMode::Heuristic}) {
    const DenseMatrix once = symmetrize_l1(w, mode).matrix;
    CHECK(symmetrize_l1(once, mode).matrix == once);
  }
  CHECK(symmetrize_l1(w).mode_used == SymmetrizeMode::Exact);
  CHECK(symmetrize_l1(random_square(31, rng)).mode_used == SymmetrizeMode::Heuristic);
  CHECK_THROWS_AS(parse_symmetrize_mode("median"), ValidationError);
  CHECK_THROWS_AS(symmetrize_l1(DenseMatrix(2, 3)), ValidationError);
}
