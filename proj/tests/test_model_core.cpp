#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "qggm/errors.hpp"
#include "qggm/matrix.hpp"
#include "qggm/pseudo_likelihood.hpp"
#include "qggm/rng.hpp"

using namespace qggm;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
  DenseMatrix m(r, c);
  for (double& v : m.data()) v = sample_normal(rng, 0.0, 1.0);
  return m;
}

PrecisionDraw random_draw(std::size_t p, RngStream& rng) {
  std::vector<double> diag(p);
  for (double& d : diag) d = 0.5 + rng.uniform();
  DenseMatrix off(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j) off(i, j) = 0.3 * sample_normal(rng, 0.0, 1.0);
  return PrecisionDraw(diag, off);
}

}  // namespace

TEST_CASE("DenseMatrix validates its data") {
  CHECK_THROWS_AS(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), ValidationError);
  CHECK_THROWS_AS(DenseMatrix(1, 1, std::vector<double>{NAN}), ValidationError);
  const DenseMatrix a{{1, 2}, {3, 4}};
  CHECK(a.transpose() == DenseMatrix{{1, 3}, {2, 4}});
  CHECK_FALSE(a.is_symmetric());
  CHECK(DenseMatrix::identity(3).is_symmetric());
}

TEST_CASE("gram: worked examples") {
  CHECK(gram(DenseMatrix{{1}, {-1}}).matrix() == DenseMatrix{{2}});
  CHECK(gram(DenseMatrix(4, 3)).matrix() == DenseMatrix(3, 3));
  CHECK(gram(DenseMatrix{{1, 2}, {3, 4}}).matrix() == DenseMatrix{{10, 14}, {14, 20}});
}

TEST_CASE("gram: rejects empty input") {
  CHECK_THROWS_AS(gram(DenseMatrix()), ValidationError);
}

TEST_CASE("gram: matches a naive triple loop and is exactly symmetric") {
  RngStream rng(11, 0);
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t p = 1; p <= 8; ++p) {
      const DenseMatrix y = random_matrix(n, p, rng);
      const GramMatrix s = gram(y);
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
          double ref = 0.0;
          for (std::size_t r = 0; r < n; ++r) ref += y(r, a) * y(r, b);
          CHECK(std::abs(s(a, b) - ref) <= 1e-12);
          CHECK(s(a, b) == s(b, a));
        }
    }
}

TEST_CASE("PrecisionDraw invariants") {
  CHECK_THROWS_AS(PrecisionDraw(std::vector<double>{1.0, 0.0}), ValidationError);
  PrecisionDraw w(std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(w.set_offdiag(1, 1, 0.5), ValidationError);
  w.set_offdiag(0, 1, 0.5);
  const DenseMatrix d = w.to_dense();
  CHECK(d(0, 0) == 1.0);
  CHECK(d(1, 1) == 2.0);
  CHECK(d(0, 1) == 0.5);
  CHECK(d(1, 0) == 0.0);
  CHECK_THROWS_AS(PrecisionDraw(std::vector<double>{1.0, 1.0}, DenseMatrix{{0.1, 0.2}, {0.3, 0.0}}),
                  ValidationError);
}

TEST_CASE("pseudo-likelihood: worked examples") {
  const double two_pi = 2.0 * std::numbers::pi;
  {
    const DenseMatrix y{{0}, {0}};
    CHECK(log_pseudo_likelihood(y, PrecisionDraw(std::vector<double>{1.0})) ==
          doctest::Approx(-std::log(two_pi)).epsilon(1e-14));
  }
  {
    const DenseMatrix y{{1, 1}};
    const double expected = 2.0 * (0.5 * std::log(1.0 / two_pi) - 0.5);
    CHECK(log_pseudo_likelihood(y, PrecisionDraw(std::vector<double>{1.0, 1.0})) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
  {
    // Term by term: column 1 residual rows (1, 0.5), column 2 rows (0.5, 1).
    const DenseMatrix y{{1, 0}, {0, 1}};
    PrecisionDraw w(std::vector<double>{1.0, 1.0});
    w.set_offdiag(0, 1, 0.5);
    w.set_offdiag(1, 0, 0.5);
    const double col = std::log(1.0 / two_pi) - 0.5 * (1.0 + 0.25);
    CHECK(log_pseudo_likelihood(y, w) == doctest::Approx(2.0 * col).epsilon(1e-14));
  }
}

TEST_CASE("pseudo-likelihood: agrees with the 1/omega_jj-factored oracle and is additive") {
  RngStream rng(5, 0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t p = 2 + static_cast<std::size_t>(rep % 5), n = 3 + static_cast<std::size_t>(rep);
    const DenseMatrix y = random_matrix(n, p, rng);
    const PrecisionDraw w = random_draw(p, rng);
    const double total = log_pseudo_likelihood(y, w);
    double sum = 0.0;
    for (std::size_t j = 0; j < p; ++j) sum += log_pseudo_likelihood_column(y, w, j);
    CHECK(std::abs(total - sum) <= 1e-10 * std::abs(total));
    CHECK(total == doctest::Approx(oracle::pseudo_loglik(y, w.to_dense())).epsilon(1e-10));
  }
}

TEST_CASE("pseudo-likelihood: both algebraic forms agree at a symmetric precision") {
  RngStream rng(6, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t p = 4, n = 12;
    const DenseMatrix y = random_matrix(n, p, rng);
    DenseMatrix off(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) off(i, j) = off(j, i) = 0.2 * sample_normal(rng, 0, 1);
    const PrecisionDraw w(std::vector<double>(p, 1.3), off);
    CHECK(log_pseudo_likelihood(y, w) == doctest::Approx(oracle::pseudo_loglik(y, w.to_dense())).epsilon(1e-10));
  }
}

TEST_CASE("pseudo-likelihood: changing column j only moves score j") {
  RngStream rng(7, 0);
  const DenseMatrix y = random_matrix(10, 4, rng);
  PrecisionDraw w = random_draw(4, rng);
  std::vector<double> before(4);
  for (std::size_t j = 0; j < 4; ++j) before[j] = log_pseudo_likelihood_column(y, w, j);
  w.set_offdiag(0, 2, w.offdiag(0, 2) + 0.7);
  w.set_offdiag(3, 2, -1.1);
  for (std::size_t j = 0; j < 4; ++j) {
    const double after = log_pseudo_likelihood_column(y, w, j);
    if (j == 2)
      CHECK(after != before[j]);
    else
      CHECK(after == before[j]);
  }
}

TEST_CASE("pseudo-likelihood: dimension mismatch is rejected") {
  CHECK_THROWS_AS(log_pseudo_likelihood(DenseMatrix(3, 2), PrecisionDraw(std::vector<double>{1, 1, 1})),
                  ValidationError);
}
