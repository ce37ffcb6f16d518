#include "qggm/simgen.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "qggm/errors.hpp"

namespace qggm {

namespace {

struct PatternName {
  PatternKind kind;
  const char* name;
};

constexpr PatternName kNames[] = {
    {PatternKind::Random, "random"},
    {PatternKind::Hubs, "hubs"},
    {PatternKind::Cliques, "cliques"},
    {PatternKind::HubsRandom, "hubs-random"},
    {PatternKind::CliquesRandom, "cliques-random"},
    {PatternKind::HubsCliques, "hubs-cliques"},
};

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) m(r, c) = a(r, c);
  return m;
}

void set_pair(DenseMatrix& m, std::size_t i, std::size_t j, double v) {
  m(i, j) = v;
  m(j, i) = v;
}

void add_hub(DenseMatrix& m, std::size_t start, std::size_t size, double value) {
  for (std::size_t k = 1; k < size; ++k) set_pair(m, start, start + k, value);
}

void add_clique(DenseMatrix& m, std::size_t start, std::size_t size, double value) {
  for (std::size_t a = 0; a < size; ++a)
    for (std::size_t b = a + 1; b < size; ++b) set_pair(m, start + a, start + b, value);
}

double neg_uniform(RngStream& rng, double lo, double hi) {
  return -(lo + (hi - lo) * rng.uniform());
}

// Deterministic part of the pattern (group structure only).
DenseMatrix base_matrix(const PatternSpec& s) {
  DenseMatrix m = DenseMatrix::identity(s.p);
  const std::size_t groups = s.uses_groups() ? s.p / s.group_size : 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t start = g * s.group_size;
    switch (s.kind) {
      case PatternKind::Hubs:
      case PatternKind::HubsRandom:
        add_hub(m, start, s.group_size, s.hub_value);
        break;
      case PatternKind::Cliques:
        add_clique(m, start, s.clique_size, s.clique_value);
        break;
      case PatternKind::CliquesRandom:
        add_clique(m, start, s.clique_size, s.cr_within);
        break;
      case PatternKind::HubsCliques:
        if (g < groups / 2)
          add_hub(m, start, s.group_size, s.hc_hub);
        else
          add_clique(m, start, s.clique_size, s.hc_clique);
        break;
      case PatternKind::Random:
        break;
    }
  }
  return m;
}

void add_random_part(const PatternSpec& s, DenseMatrix& m, RngStream& rng) {
  const std::size_t p = s.p;
  const double prob = s.resolved_edge_prob();
  switch (s.kind) {
    case PatternKind::Random:
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
          if (rng.uniform() < prob) set_pair(m, i, j, neg_uniform(rng, s.random_low, s.random_high));
      break;
    case PatternKind::HubsRandom: {
      const std::size_t groups = p / s.group_size;
      const double group_prob = 1.0 / static_cast<double>(groups);
      for (std::size_t k1 = 0; k1 < groups; ++k1)
        for (std::size_t k2 = k1 + 1; k2 < groups; ++k2) {
          if (!(rng.uniform() < group_prob)) continue;
          const auto pick = [&](std::size_t g) {
            const auto off = static_cast<std::size_t>(rng.uniform() * static_cast<double>(s.group_size));
            return g * s.group_size + std::min(off, s.group_size - 1);
          };
          const std::size_t i = pick(k1);
          const std::size_t j = pick(k2);
          set_pair(m, i, j, neg_uniform(rng, s.random_low, s.random_high));
        }
      break;
    }
    case PatternKind::CliquesRandom:
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
          if (m(i, j) != 0.0) continue;
          if (rng.uniform() < prob) set_pair(m, i, j, s.cr_between);
        }
      break;
    default:
      break;
  }
}

bool is_randomized(PatternKind k) {
  return k == PatternKind::Random || k == PatternKind::HubsRandom || k == PatternKind::CliquesRandom;
}

}  // namespace

PatternKind parse_pattern(std::string_view name) {
  for (const auto& n : kNames)
    if (name == n.name) return n.kind;
  throw ValidationError("unknown pattern '" + std::string(name) +
                        "' (expected random, hubs, cliques, hubs-random, cliques-random or hubs-cliques)");
}

std::string to_string(PatternKind kind) {
  for (const auto& n : kNames)
    if (kind == n.kind) return n.name;
  return "unknown";
}

const std::vector<PatternKind>& all_patterns() {
  static const std::vector<PatternKind> kinds = {PatternKind::Random,        PatternKind::Hubs,
                                                 PatternKind::Cliques,       PatternKind::HubsRandom,
                                                 PatternKind::CliquesRandom, PatternKind::HubsCliques};
  return kinds;
}

double PatternSpec::resolved_edge_prob() const {
  return edge_prob > 0.0 ? edge_prob : 1.0 / static_cast<double>(p);
}

void PatternSpec::validate() const {
  if (p < 2) throw ValidationError("pattern: p must be at least 2");
  if (!(edge_prob >= 0.0 && edge_prob < 1.0))
    throw ValidationError("pattern: edge probability must lie in (0, 1)");
  if (!(random_low >= 0.0 && random_low < random_high))
    throw ValidationError("pattern: need 0 <= random_low < random_high");
  if (!(pd_floor > 0.0)) throw ValidationError("pattern: pd_floor must be positive");
  if (max_attempts == 0) throw ValidationError("pattern: max_attempts must be at least 1");
  if (uses_groups()) {
    if (group_size < 2) throw ValidationError("pattern: group size must be at least 2");
    if (p % group_size != 0)
      throw ValidationError("pattern: p = " + std::to_string(p) + " is not divisible by group size " +
                            std::to_string(group_size));
    if (clique_size < 2 || clique_size > group_size)
      throw ValidationError("pattern: clique size must lie in [2, group size]");
    if (kind == PatternKind::HubsCliques && p / group_size < 2)
      throw ValidationError("pattern: hubs-cliques needs at least two groups");
    if (kind == PatternKind::HubsRandom && p / group_size < 2)
      throw ValidationError("pattern: hubs-random needs at least two groups");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> support_of(const DenseMatrix& omega) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < omega.rows(); ++i)
    for (std::size_t j = i + 1; j < omega.cols(); ++j)
      if (omega(i, j) != 0.0) out.emplace_back(i, j);
  return out;
}

PdCheck check_pd(const DenseMatrix& a, double floor) {
  if (!a.is_square() || !a.is_symmetric()) throw ValidationError("check_pd: matrix must be symmetric");
  const Eigen::MatrixXd m = to_eigen(a);
  const Eigen::MatrixXd shifted = m - floor * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  const Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  return {llt.info() == Eigen::Success && min_eig > floor, min_eig};
}

GroundTruth generate_pattern(const PatternSpec& spec) {
  spec.validate();
  const DenseMatrix base = base_matrix(spec);
  RngStream rng(spec.seed, 0);
  const std::size_t budget = is_randomized(spec.kind) ? spec.max_attempts : 1;
  double last_min = 0.0;
  for (std::size_t attempt = 1; attempt <= budget; ++attempt) {
    DenseMatrix m = base;
    add_random_part(spec, m, rng);
    const PdCheck pd = check_pd(m, spec.pd_floor);
    last_min = pd.min_eig;
    if (pd.ok) {
      GroundTruth t;
      t.support = support_of(m);
      t.omega_star = std::move(m);
      t.min_eig = pd.min_eig;
      t.attempts = attempt;
      return t;
    }
  }
  throw NumericalError("generate_pattern: " + to_string(spec.kind) + " with p = " + std::to_string(spec.p) +
                       " did not reach min eigenvalue " + std::to_string(spec.pd_floor) + " within " +
                       std::to_string(budget) + " attempts (last " + std::to_string(last_min) + ")");
}

DenseMatrix sample_mvn(const GroundTruth& truth, std::size_t n, RngStream& stream) {
  const std::size_t p = truth.omega_star.rows();
  if (n == 0) throw ValidationError("sample_mvn: n must be positive");
  const Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(truth.omega_star));
  if (llt.info() != Eigen::Success)
    throw NumericalError("sample_mvn: Cholesky of the true precision failed (internal error)");
  const auto upper = llt.matrixU();  // Lᵀ
  DenseMatrix y(n, p);
  Eigen::VectorXd z(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < p; ++k) z(k) = sample_normal(stream, 0.0, 1.0);
    const Eigen::VectorXd x = upper.solve(z);
    for (std::size_t k = 0; k < p; ++k) y(r, k) = x(k);
  }
  return y;
}

}  // namespace qggm
