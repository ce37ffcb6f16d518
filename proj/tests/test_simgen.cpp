#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qggm/errors.hpp"
#include "qggm/metrics.hpp"
#include "qggm/simgen.hpp"

using namespace qggm;

namespace {

PatternSpec spec_for(PatternKind kind, std::size_t p, std::uint64_t seed = 1) {
  PatternSpec s;
  s.kind = kind;
  s.p = p;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("pattern names round-trip") {
  for (PatternKind k : all_patterns()) CHECK(parse_pattern(to_string(k)) == k);
  CHECK_THROWS_AS(parse_pattern("stars"), ValidationError);
}

TEST_CASE("Hubs, p = 100: 90 entries of 0.25 and d* = 9") {
  const GroundTruth t = generate_pattern(spec_for(PatternKind::Hubs, 100));
  CHECK(t.support.size() == 90);
  for (auto [i, j] : t.support) CHECK(t.omega_star(i, j) == 0.25);
  CHECK(contraction_rates(100, 150, t.support).d_star == 9);
  CHECK(t.min_eig >= 0.05);
}

TEST_CASE("Cliques, p = 100: 30 entries of -0.45 and block eigenvalues") {
  const GroundTruth t = generate_pattern(spec_for(PatternKind::Cliques, 100));
  CHECK(t.support.size() == 30);
  for (auto [i, j] : t.support) CHECK(t.omega_star(i, j) == -0.45);
  DenseMatrix block(3, 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) block(a, b) = t.omega_star(a, b);
  const auto ev = oracle::jacobi_eigenvalues(block);
  CHECK(ev[0] == doctest::Approx(0.10));
  CHECK(ev[1] == doctest::Approx(1.45));
  CHECK(ev[2] == doctest::Approx(1.45));
}

TEST_CASE("Hubs+Cliques, p = 100: 45 hub and 15 clique entries") {
  const GroundTruth t = generate_pattern(spec_for(PatternKind::HubsCliques, 100));
  CHECK(t.support.size() == 60);
  std::size_t hubs = 0, cliques = 0;
  for (auto [i, j] : t.support) {
    hubs += t.omega_star(i, j) == -0.2;
    cliques += t.omega_star(i, j) == 0.5;
  }
  CHECK(hubs == 45);
  CHECK(cliques == 15);
}

TEST_CASE("randomized patterns: PD floor, value ranges and plausible counts") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GroundTruth r = generate_pattern(spec_for(PatternKind::Random, 100, seed));
    CHECK(r.min_eig >= 0.05);
    CHECK(r.support.size() >= 20);
    CHECK(r.support.size() <= 85);  // Binomial(4950, 0.01): mean 49.5, sd 7
    for (auto [i, j] : r.support) {
      CHECK(r.omega_star(i, j) <= -0.2);
      CHECK(r.omega_star(i, j) >= -0.8);
    }
    const GroundTruth hr = generate_pattern(spec_for(PatternKind::HubsRandom, 100, seed));
    CHECK(hr.support.size() >= 90);
    const GroundTruth cr = generate_pattern(spec_for(PatternKind::CliquesRandom, 100, seed));
    std::size_t within = 0;
    for (auto [i, j] : cr.support) within += cr.omega_star(i, j) == -0.3;
    CHECK(within == 30);
    CHECK(cr.min_eig >= 0.05);
  }
}

TEST_CASE("patterns: deterministic kinds ignore the seed, random kinds reproduce") {
  CHECK(generate_pattern(spec_for(PatternKind::Hubs, 40, 1)).omega_star ==
        generate_pattern(spec_for(PatternKind::Hubs, 40, 2)).omega_star);
  CHECK(generate_pattern(spec_for(PatternKind::Random, 40, 3)).omega_star ==
        generate_pattern(spec_for(PatternKind::Random, 40, 3)).omega_star);
  for (PatternKind k : all_patterns()) {
    const GroundTruth t = generate_pattern(spec_for(k, 20, 4));
    CHECK(t.omega_star.is_symmetric());
    for (std::size_t i = 0; i < 20; ++i) CHECK(t.omega_star(i, i) == 1.0);
  }
}

TEST_CASE("patterns: validation") {
  CHECK_THROWS_AS(generate_pattern(spec_for(PatternKind::Hubs, 25)), ValidationError);
  PatternSpec s = spec_for(PatternKind::Random, 10);
  s.edge_prob = 0.9;
  s.random_low = 0.7;
  s.random_high = 0.8;
  s.max_attempts = 3;
  CHECK_THROWS_AS(generate_pattern(s), NumericalError);
}

TEST_CASE("check_pd: examples") {
  CHECK(check_pd(DenseMatrix::identity(4), 0.05).ok);
  const PdCheck bad = check_pd(DenseMatrix{{1, 0.999}, {0.999, 1}}, 0.05);
  CHECK_FALSE(bad.ok);
  CHECK(bad.min_eig == doctest::Approx(0.001));
  DenseMatrix star = DenseMatrix::identity(10);
  for (std::size_t k = 1; k < 10; ++k) star(0, k) = star(k, 0) = 0.25;
  const PdCheck hub = check_pd(star, 0.05);
  CHECK(hub.ok);
  CHECK(hub.min_eig == doctest::Approx(0.25));
}

TEST_CASE("sample_mvn: identity, two-node correlation, determinism") {
  GroundTruth id;
  id.omega_star = DenseMatrix::identity(4);
  RngStream a(1, 1);
  const DenseMatrix y = sample_mvn(id, 5000, a);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      double c = 0;
      for (std::size_t r = 0; r < 5000; ++r) c += y(r, i) * y(r, j);
      CHECK(std::abs(c / 5000) < 0.06);
    }
  RngStream a2(1, 1);
  CHECK(sample_mvn(id, 5000, a2) == y);

  GroundTruth two;
  two.omega_star = DenseMatrix{{1, -0.5}, {-0.5, 1}};
  RngStream b(2, 1);
  const DenseMatrix z = sample_mvn(two, 5000, b);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t r = 0; r < 5000; ++r) {
    sxx += z(r, 0) * z(r, 0);
    syy += z(r, 1) * z(r, 1);
    sxy += z(r, 0) * z(r, 1);
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy) - 0.5) < 0.05);
}

TEST_CASE("sample_mvn: sample precision converges to the truth") {
  GroundTruth t;
  t.omega_star = DenseMatrix{{1, 0.3, 0, 0, 0}, {0.3, 1, -0.2, 0, 0}, {0, -0.2, 1, 0, 0.4},
                             {0, 0, 0, 1, 0}, {0, 0, 0.4, 0, 1}};
  RngStream rng(5, 1);
  const DenseMatrix y = sample_mvn(t, 20000, rng);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(5, 5);
  for (std::size_t r = 0; r < 20000; ++r)
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) cov(i, j) += y(r, i) * y(r, j) / 20000.0;
  const Eigen::MatrixXd prec = cov.inverse();
  double err = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) err += std::pow(prec(i, j) - t.omega_star(i, j), 2);
  CHECK(std::sqrt(err) < 0.15);
}
