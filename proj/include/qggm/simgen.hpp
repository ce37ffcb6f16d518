#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qggm/matrix.hpp"
#include "qggm/rng.hpp"

namespace qggm {

enum class PatternKind { Random, Hubs, Cliques, HubsRandom, CliquesRandom, HubsCliques };

/// "random", "hubs", "cliques", "hubs-random", "cliques-random", "hubs-cliques".
PatternKind parse_pattern(std::string_view name);
std::string to_string(PatternKind kind);
const std::vector<PatternKind>& all_patterns();

struct PatternSpec {
  PatternKind kind = PatternKind::Random;
  std::size_t p = 100;
  std::uint64_t seed = 1;

  std::size_t group_size = 10;
  std::size_t clique_size = 3;
  /// Edge probability for Random and Cliques+Random; 0 means 1/p.
  double edge_prob = 0.0;
  double hub_value = 0.25;
  double clique_value = -0.45;
  /// Random magnitudes are −Unif(random_low, random_high).
  double random_low = 0.2;
  double random_high = 0.8;
  double cr_within = -0.3;
  double cr_between = 0.2;
  double hc_hub = -0.2;
  double hc_clique = 0.5;

  double pd_floor = 0.05;
  // Random at p = 100 clears the floor on roughly 1 draw in 1000.
  std::size_t max_attempts = 20000;

  bool uses_groups() const { return kind != PatternKind::Random; }
  double resolved_edge_prob() const;
  void validate() const;
};

struct GroundTruth {
  DenseMatrix omega_star;
  /// Upper-triangular pairs (i < j) with a nonzero entry, in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> support;
  double min_eig = 0.0;
  /// Draws needed to reach pd_floor (1 for deterministic patterns).
  std::size_t attempts = 1;
};

/// Builds Ω* with unit diagonal. Groups are contiguous blocks of group_size
/// indices; the hub is the first member and cliques use the first clique_size
/// members. Randomized portions are redrawn until the smallest eigenvalue
/// exceeds pd_floor; throws NumericalError after max_attempts.
GroundTruth generate_pattern(const PatternSpec& spec);

/// n rows of N(0, Ω*⁻¹): with Ω* = LLᵀ each row is L⁻ᵀz.
DenseMatrix sample_mvn(const GroundTruth& truth, std::size_t n, RngStream& stream);

struct PdCheck {
  bool ok;
  double min_eig;
};

/// ok when A − floor·I admits a Cholesky factor; min_eig from a symmetric
/// eigen-decomposition.
PdCheck check_pd(const DenseMatrix& a, double floor);

/// Support pairs of a symmetric matrix (i < j, entry nonzero).
std::vector<std::pair<std::size_t, std::size_t>> support_of(const DenseMatrix& omega);

}  // namespace qggm
