#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qggm/gibbs.hpp"
#include "qggm/matrix.hpp"

namespace qggm {

/// Upper-triangular index pair, first < second.
using Edge = std::pair<std::size_t, std::size_t>;

/// Symmetric boolean p×p selection; the diagonal is never set.
class EdgeSelection {
 public:
  explicit EdgeSelection(std::size_t p = 0) : p_(p), mask_(p * p, 0) {}
  std::size_t p() const { return p_; }
  bool operator()(std::size_t i, std::size_t j) const { return mask_[i * p_ + j] != 0; }
  void set(std::size_t i, std::size_t j);
  std::vector<Edge> edges() const;

 private:
  std::size_t p_;
  std::vector<char> mask_;
};

double frobenius_error(const DenseMatrix& est, const DenseMatrix& truth);

/// (i, j) with i < j is selected when the level interval of ω_ij or of ω_ji excludes zero.
EdgeSelection select_edges(const PosteriorSummary& summary, double level);
EdgeSelection select_edges(const SortedDraws& draws, double level);
/// Same rule on precomputed bands.
EdgeSelection select_edges(const CredibleBand& band);

/// Edges with a nonzero off-diagonal entry in either orientation (for point estimates).
EdgeSelection nonzero_pattern(const DenseMatrix& est);

struct SelectionRates {
  double tpr;  ///< NaN when the support is empty
  double fpr;  ///< 0 when there is no null pair
  bool tpr_defined;
  bool fpr_defined;
};

SelectionRates tpr_fpr(const EdgeSelection& selected, std::span<const Edge> support, std::size_t p);

struct RocPoint {
  double level;
  double fpr;
  double tpr;
};

/// 200 log-spaced levels from 0.01 to 0.9999.
std::vector<double> default_roc_levels();

std::vector<RocPoint> roc_sweep(const PosteriorSummary& summary, std::span<const Edge> support,
                                std::span<const double> levels);
std::vector<RocPoint> roc_sweep(const SortedDraws& draws, std::span<const Edge> support,
                                std::span<const double> levels);

/// Classic potential scale reduction factor, √((W(m−1)/m + B/m)/W).
double gelman_rubin(const std::vector<std::vector<double>>& chains);

struct ContractionRates {
  double epsilon_n;      ///< √(S*·log p / n), S* over ordered pairs
  double rate_spectral;  ///< d*·√(log p / n)
  std::size_t s_star_ordered;
  std::size_t s_star_upper;
  std::size_t d_star;
  std::vector<std::size_t> column_degrees;
};

ContractionRates contraction_rates(std::size_t p, std::size_t n, std::span<const Edge> support);

struct EvalReport {
  double frob_error = 0.0;
  double spectral_error = 0.0;
  SelectionRates rates{};
  std::vector<RocPoint> roc;
  ContractionRates contraction{};
  std::map<std::string, double> gelman_rubin;
};

}  // namespace qggm
