#include <cmath>

#include "doctest.h"
#include "qggm/errors.hpp"
#include "qggm/metrics.hpp"
#include "qggm/rng.hpp"
#include "qggm/symmetrize.hpp"

using namespace qggm;

namespace {

std::vector<DenseMatrix> draws_from(const std::vector<std::pair<double, double>>& pairs) {
  // Each pair gives (ω_01, ω_10) for one 2×2 draw.
  std::vector<DenseMatrix> out;
  for (auto [a, b] : pairs) out.push_back(DenseMatrix{{1, a}, {b, 1}});
  return out;
}

}  // namespace

TEST_CASE("frobenius_error: examples and oracle") {
  const DenseMatrix a{{1, 2}, {3, 4}};
  CHECK(frobenius_error(a, a) == 0.0);
  DenseMatrix b = a;
  b(1, 0) += 3.0;
  CHECK(frobenius_error(a, b) == 3.0);
  RngStream rng(1, 0);
  DenseMatrix x(4, 4), y(4, 4);
  for (double& v : x.data()) v = sample_normal(rng, 0, 1);
  for (double& v : y.data()) v = sample_normal(rng, 0, 1);
  double ss = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) ss += (x(i, j) - y(i, j)) * (x(i, j) - y(i, j));
  CHECK(std::abs(frobenius_error(x, y) - std::sqrt(ss)) < 1e-12);
  CHECK_THROWS_AS(frobenius_error(a, DenseMatrix(3, 3)), ValidationError);
}

TEST_CASE("select_edges: positive draws, centred draws and the OR rule") {
  const SortedDraws positive(draws_from({{0.1, 0.2}, {0.3, 0.4}, {0.2, 0.1}, {0.5, 0.3}}));
  CHECK(select_edges(positive, 0.5)(0, 1));
  CHECK(select_edges(positive, 0.5)(1, 0));
  CHECK_FALSE(select_edges(positive, 0.5)(0, 0));

  const SortedDraws centred(draws_from({{-2, -1}, {-1, -2}, {0, 0}, {1, 2}, {2, 1}}));
  CHECK_FALSE(select_edges(centred, 0.5)(0, 1));

  // ω_01 straddles zero, ω_10 sits in (0.1, 0.3).
  const SortedDraws mixed(draws_from({{-1, 0.1}, {1, 0.2}, {-0.5, 0.3}, {0.5, 0.2}, {0.0, 0.15}}));
  CHECK(select_edges(mixed, 0.5)(0, 1));
}

TEST_CASE("tpr_fpr: examples") {
  const std::vector<Edge> support{{0, 1}};
  EdgeSelection exact(4);
  exact.set(0, 1);
  auto r = tpr_fpr(exact, support, 4);
  CHECK(r.tpr == 1.0);
  CHECK(r.fpr == 0.0);
  EdgeSelection all(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) all.set(i, j);
  r = tpr_fpr(all, support, 4);
  CHECK(r.tpr == 1.0);
  CHECK(r.fpr == 1.0);
  EdgeSelection two(4);
  two.set(0, 1);
  two.set(2, 3);
  r = tpr_fpr(two, support, 4);
  CHECK(r.tpr == 1.0);
  CHECK(r.fpr == doctest::Approx(0.2));
  r = tpr_fpr(two, {}, 4);
  CHECK_FALSE(r.tpr_defined);
  CHECK(std::isnan(r.tpr));
}

TEST_CASE("roc_sweep: monotone in the level, strong edge fixture reaches (0, 1)") {
  RngStream rng(2, 0);
  std::vector<DenseMatrix> draws;
  for (int k = 0; k < 300; ++k) {
    DenseMatrix d = DenseMatrix::identity(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j) d(i, j) = sample_normal(rng, (i + j == 1) ? -0.5 : 0.0, 0.0016);
    draws.push_back(d);
  }
  const SortedDraws sorted(draws);
  const std::vector<Edge> support{{0, 1}};
  const auto roc = roc_sweep(sorted, support, default_roc_levels());
  CHECK(roc.size() == 200);
  CHECK(roc.front().level == doctest::Approx(0.01));
  CHECK(roc.back().level == 0.9999);
  bool hit = false;
  for (std::size_t k = 1; k < roc.size(); ++k) {
    CHECK(roc[k].fpr <= roc[k - 1].fpr);
    CHECK(roc[k].tpr <= roc[k - 1].tpr);
  }
  for (const auto& pt : roc) hit = hit || (pt.tpr == 1.0 && pt.fpr == 0.0);
  CHECK(hit);
  CHECK(roc.front().fpr > 0.5);
  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(roc_sweep(sorted, support, bad), ValidationError);
}

TEST_CASE("gelman_rubin: identical, iid and separated chains") {
  std::vector<double> base(100);
  RngStream rng(3, 0);
  for (double& v : base) v = sample_normal(rng, 0, 1);
  CHECK(gelman_rubin({base, base}) == doctest::Approx(std::sqrt(99.0 / 100.0)).epsilon(1e-12));

  std::vector<double> a(10000), b(10000);
  for (double& v : a) v = sample_normal(rng, 0, 1);
  for (double& v : b) v = sample_normal(rng, 0, 1);
  const double r = gelman_rubin({a, b});
  CHECK(r >= 0.99);
  CHECK(r <= 1.02);

  std::vector<double> c(100), d(100);
  for (double& v : c) v = sample_normal(rng, 0, 1);
  for (double& v : d) v = sample_normal(rng, 10, 1);
  CHECK(gelman_rubin({c, d}) > 5.0);

  // Invariant under a common affine map.
  auto affine = [](std::vector<double> v) {
    for (double& x : v) x = 3.5 * x - 2.0;
    return v;
  };
  CHECK(std::abs(gelman_rubin({affine(c), affine(d)}) - gelman_rubin({c, d})) < 1e-10);

  CHECK_THROWS_AS(gelman_rubin({a}), ValidationError);
  CHECK_THROWS_AS(gelman_rubin({std::vector<double>(20, 1.0), std::vector<double>(20, 1.0)}), NumericalError);
  CHECK_THROWS_AS(gelman_rubin({std::vector<double>(5, 1.0), std::vector<double>(5, 2.0)}), ValidationError);
}

TEST_CASE("contraction_rates: examples") {
  CHECK(contraction_rates(10, 100, {}).epsilon_n == 0.0);
  std::vector<Edge> hubs;
  for (std::size_t g = 0; g < 10; ++g)
    for (std::size_t k = 1; k < 10; ++k) hubs.emplace_back(10 * g, 10 * g + k);
  const ContractionRates r = contraction_rates(100, 150, hubs);
  CHECK(r.d_star == 9);
  CHECK(r.s_star_ordered == 180);
  CHECK(r.s_star_upper == 90);
  CHECK(r.epsilon_n == doctest::Approx(std::sqrt(180 * std::log(100.0) / 150)));
  CHECK(r.epsilon_n == doctest::Approx(2.35).epsilon(0.01));
  const ContractionRates r2 = contraction_rates(100, 300, hubs);
  CHECK(r.epsilon_n / r2.epsilon_n == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.rate_spectral / r2.rate_spectral == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("symmetrized estimate stays inside the norm-equivalence envelope") {
  RngStream rng(4, 0);
  for (int rep = 0; rep < 20; ++rep) {
    DenseMatrix truth = DenseMatrix::identity(6), bar(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i + 1; j < 6; ++j) truth(i, j) = truth(j, i) = rng.uniform() < 0.3 ? -0.3 : 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) bar(i, j) = truth(i, j) + 0.1 * sample_normal(rng, 0, 1);
    const DenseMatrix s = symmetrize_l1(bar).matrix;
    CHECK(frobenius_error(s, truth) <=
          frobenius_error(bar, truth) + 2.0 * std::sqrt(6.0) * operator_l1_norm(bar - truth));
  }
}
