#include "qggm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qggm/errors.hpp"

namespace qggm {

void EdgeSelection::set(std::size_t i, std::size_t j) {
  if (i == j) return;
  mask_[i * p_ + j] = 1;
  mask_[j * p_ + i] = 1;
}

std::vector<Edge> EdgeSelection::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = i + 1; j < p_; ++j)
      if ((*this)(i, j)) out.emplace_back(i, j);
  return out;
}

double frobenius_error(const DenseMatrix& est, const DenseMatrix& truth) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols())
    throw ValidationError("frobenius_error: shape mismatch");
  double acc = 0.0;
  auto a = est.data();
  auto b = truth.data();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace {
bool excludes_zero(std::pair<double, double> interval) {
  return interval.first > 0.0 || interval.second < 0.0;
}
}  // namespace

EdgeSelection select_edges(const SortedDraws& draws, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("select_edges: level must lie in (0, 1)");
  const std::size_t p = draws.p();
  EdgeSelection sel(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (excludes_zero(draws.interval(i, j, level)) || excludes_zero(draws.interval(j, i, level)))
        sel.set(i, j);
  return sel;
}

EdgeSelection select_edges(const PosteriorSummary& summary, double level) {
  return select_edges(SortedDraws(summary.samples), level);
}

EdgeSelection select_edges(const CredibleBand& band) {
  const std::size_t p = band.lower.rows();
  EdgeSelection sel(p);
  auto excl = [&](std::size_t r, std::size_t c) {
    return excludes_zero({band.lower(r, c), band.upper(r, c)});
  };
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (excl(i, j) || excl(j, i)) sel.set(i, j);
  return sel;
}

EdgeSelection nonzero_pattern(const DenseMatrix& est) {
  if (!est.is_square()) throw ValidationError("nonzero_pattern: matrix must be square");
  const std::size_t p = est.rows();
  EdgeSelection sel(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      if (est(i, j) != 0.0 || est(j, i) != 0.0) sel.set(i, j);
  return sel;
}

SelectionRates tpr_fpr(const EdgeSelection& selected, std::span<const Edge> support, std::size_t p) {
  if (selected.p() != p) throw ValidationError("tpr_fpr: selection size does not match p");
  std::vector<char> truth(p * p, 0);
  for (auto [i, j] : support) {
    if (i >= p || j >= p || i == j) throw ValidationError("tpr_fpr: support pair out of range");
    truth[std::min(i, j) * p + std::max(i, j)] = 1;
  }
  std::size_t support_size = 0, hits = 0, false_hits = 0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool t = truth[i * p + j] != 0;
      support_size += t;
      if (selected(i, j)) (t ? hits : false_hits)++;
    }
  const std::size_t pairs = p * (p - 1) / 2;
  const std::size_t nulls = pairs - support_size;
  SelectionRates r{};
  r.tpr_defined = support_size > 0;
  r.fpr_defined = nulls > 0;
  r.tpr = r.tpr_defined ? static_cast<double>(hits) / static_cast<double>(support_size)
                        : std::numeric_limits<double>::quiet_NaN();
  r.fpr = r.fpr_defined ? static_cast<double>(false_hits) / static_cast<double>(nulls) : 0.0;
  return r;
}

std::vector<double> default_roc_levels() {
  constexpr int steps = 200;
  const double lo = std::log(0.01);
  const double hi = std::log(0.9999);
  std::vector<double> levels(steps);
  for (int k = 0; k < steps; ++k) levels[k] = std::exp(lo + (hi - lo) * k / (steps - 1));
  levels.back() = 0.9999;
  return levels;
}

std::vector<RocPoint> roc_sweep(const SortedDraws& draws, std::span<const Edge> support,
                                std::span<const double> levels) {
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] > 0.0 && levels[k] < 1.0))
      throw ValidationError("roc_sweep: levels must lie in (0, 1)");
    if (k > 0 && !(levels[k] > levels[k - 1]))
      throw ValidationError("roc_sweep: levels must be strictly increasing");
  }
  std::vector<RocPoint> out;
  out.reserve(levels.size());
  for (double level : levels) {
    const SelectionRates r = tpr_fpr(select_edges(draws, level), support, draws.p());
    out.push_back({level, r.fpr, r.tpr});
  }
  return out;
}

std::vector<RocPoint> roc_sweep(const PosteriorSummary& summary, std::span<const Edge> support,
                                std::span<const double> levels) {
  return roc_sweep(SortedDraws(summary.samples), support, levels);
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  const std::size_t k = chains.size();
  if (k < 2) throw ValidationError("gelman_rubin: need at least 2 chains");
  const std::size_t m = chains.front().size();
  if (m < 10) throw ValidationError("gelman_rubin: chains must have length >= 10");
  std::vector<double> means(k), vars(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (chains[c].size() != m) throw ValidationError("gelman_rubin: chains differ in length");
    double mean = 0.0;
    for (double x : chains[c]) mean += x;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double x : chains[c]) ss += (x - mean) * (x - mean);
    means[c] = mean;
    vars[c] = ss / static_cast<double>(m - 1);
  }
  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(k);
  if (!(w > 0.0)) throw NumericalError("gelman_rubin: zero within-chain variance");

  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= static_cast<double>(k);
  double b_over_m = 0.0;  // variance of chain means
  for (double mu : means) b_over_m += (mu - grand) * (mu - grand);
  b_over_m /= static_cast<double>(k - 1);

  const double md = static_cast<double>(m);
  return std::sqrt((w * (md - 1.0) / md + b_over_m) / w);
}

ContractionRates contraction_rates(std::size_t p, std::size_t n, std::span<const Edge> support) {
  if (p < 2 || n < 1) throw ValidationError("contraction_rates: need p >= 2 and n >= 1");
  ContractionRates r{};
  r.column_degrees.assign(p, 0);
  for (auto [i, j] : support) {
    if (i >= p || j >= p || i == j) throw ValidationError("contraction_rates: bad support pair");
    ++r.column_degrees[i];
    ++r.column_degrees[j];
  }
  r.s_star_upper = support.size();
  r.s_star_ordered = 2 * support.size();
  r.d_star = *std::max_element(r.column_degrees.begin(), r.column_degrees.end());
  const double scale = std::log(static_cast<double>(p)) / static_cast<double>(n);
  r.epsilon_n = std::sqrt(static_cast<double>(r.s_star_ordered) * scale);
  r.rate_spectral = static_cast<double>(r.d_star) * std::sqrt(scale);
  return r;
}

}  // namespace qggm
