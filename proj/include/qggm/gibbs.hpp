#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qggm/horseshoe.hpp"
#include "qggm/matrix.hpp"
#include "qggm/rng.hpp"

namespace qggm {

/// Latent scales are kept inside [kScaleFloor, kScaleCeiling].
inline constexpr double kScaleFloor = 1e-12;
inline constexpr double kScaleCeiling = 1e12;

struct GibbsConfig {
  std::size_t n_iter = 6000;
  std::size_t burn_in = 1000;
  std::size_t thin = 10;
  std::uint64_t seed = 1;
  std::size_t n_chains = 1;
  bool column_parallel = false;

  /// floor((n_iter − burn_in)/thin)
  std::size_t retained() const;
  void validate() const;
};

struct NormalParams {
  double mean;
  double var;
};

struct GammaParams {
  double shape;
  double rate;
};

// ---- full conditionals -----------------------------------------------------
//
// Column i of Ω holds ω_ji, j ≠ i. Given everything else,
//   ω_ji ~ N(−(Σ_{k≠j} (ω_ki/ω_ii)·s_kj)·var,  var),
//   var = 1/(s_jj/ω_ii + 1/(τ²λ²_ji)),
// where the sum includes k = i with ω_ii on the diagonal (it comes from
// completing the square in the column score).
//   1/λ²_ji ~ Exp(ω²_ji/(2τ²) + 1/v_ji),   1/v_ji ~ Exp(1 + 1/λ²_ji),
//   1/τ² ~ Gamma((p(p−1)+1)/2, 1/κ + ½Σ_{j≠i} ω²_ji/λ²_ji),
//   1/κ ~ Exp(1 + 1/τ²).

/// Direct O(p) evaluation of the ω_ji conditional at the current state.
NormalParams omega_conditional(const HorseshoeState& state, const PrecisionDraw& omega,
                               const GramMatrix& s, std::size_t i, std::size_t j);

/// Rate of the exponential conditional of 1/λ²_ji.
double local_scale_rate(double omega_ji, double tau2, double v_ji);
/// Rate of the exponential conditional of 1/v_ji.
double auxiliary_rate(double lambda2_ji);
GammaParams global_scale_conditional(const HorseshoeState& state, const PrecisionDraw& omega);
/// Rate of the exponential conditional of 1/κ.
double kappa_rate(double tau2);

/// Redraws ω_ji for j ≠ i in increasing j, each conditional on the entries of
/// column i drawn before it. Other columns are untouched. Throws
/// NumericalError naming (i, j) if a conditional mean or variance is not finite.
void update_omega_column(const HorseshoeState& state, PrecisionDraw& omega, const GramMatrix& s,
                         std::size_t i, RngStream& stream);

/// λ²_ji then v_ji for every j ≠ i of column i.
void update_local_scales_column(HorseshoeState& state, const PrecisionDraw& omega, std::size_t i,
                                RngStream& stream);

/// All off-diagonal (λ², v) pairs from a single stream, column by column.
void update_local_scales(HorseshoeState& state, const PrecisionDraw& omega, RngStream& stream);

/// τ² then κ.
void update_global_scale(HorseshoeState& state, const PrecisionDraw& omega, RngStream& stream);

/// For each column in `order`: update_omega_column then
/// update_local_scales_column, column c drawing from column_streams[c].
/// Given τ² and κ the columns are conditionally independent, so any order
/// (or any thread partition) yields the same draws.
void sweep_columns(HorseshoeState& state, PrecisionDraw& omega, const GramMatrix& s,
                   std::span<RngStream> column_streams, std::span<const std::size_t> order);

// ---- posterior summaries ---------------------------------------------------

/// Empirical quantile of sorted data at probability q, interpolating linearly
/// between order statistics at positions (N+1)q (clamped to the sample range).
double empirical_quantile(std::span<const double> sorted, double q);

/// Equal-tailed interval at `level` of entry (i, j) across `samples`.
std::pair<double, double> credible_interval(std::span<const DenseMatrix> samples, std::size_t i,
                                            std::size_t j, double level);

/// Retained draws re-laid out entry-major and sorted per entry, so quantiles
/// at many levels cost O(1) each.
class SortedDraws {
 public:
  SortedDraws() = default;
  explicit SortedDraws(std::span<const DenseMatrix> samples);

  std::size_t p() const { return p_; }
  std::size_t count() const { return count_; }
  std::span<const double> entry(std::size_t i, std::size_t j) const {
    return {values_.data() + (i * p_ + j) * count_, count_};
  }
  std::pair<double, double> interval(std::size_t i, std::size_t j, double level) const;

 private:
  std::size_t p_ = 0;
  std::size_t count_ = 0;
  std::vector<double> values_;
};

struct CredibleBand {
  double level;
  DenseMatrix lower;
  DenseMatrix upper;
};

struct PosteriorSummary {
  std::size_t p = 0;
  std::vector<double> diag;
  DenseMatrix mean;
  std::vector<DenseMatrix> samples;
  std::vector<CredibleBand> bands;
  /// ‖Ω_t − Ω_ref‖_F for every iteration.
  std::vector<double> frob_trace;
  /// τ² for every iteration.
  std::vector<double> tau2_trace;
  /// ‖Ω_t‖_F for every iteration.
  std::vector<double> norm_trace;
  /// Per-iteration values of the monitored entries listed in `monitored`.
  std::vector<std::vector<double>> entry_traces;
  std::vector<std::pair<std::size_t, std::size_t>> monitored;

  const CredibleBand& band(double level) const;
};

struct ChainOptions {
  /// Reference for frob_trace; defaults to the zero off-diagonal matrix with the given diagonal.
  std::optional<DenseMatrix> reference;
  /// Chain 0 starts from ω = 0, τ² = 1; later chains start overdispersed.
  std::size_t chain_index = 0;
  std::vector<std::pair<std::size_t, std::size_t>> monitored;
};

/// Runs one chain with the diagonal frozen at `diag`. Each column owns the
/// stream (seed, chain·2³² + column); the global update owns its own.
PosteriorSummary run_chain(const DenseMatrix& y, std::span<const double> diag,
                           const GibbsConfig& config, std::span<const double> levels,
                           const ChainOptions& options = {});

struct MultiChainResult {
  /// Pooled over all chains.
  PosteriorSummary pooled;
  /// Per-chain traces; samples are moved into `pooled`.
  std::vector<PosteriorSummary> chains;
  /// R̂ per monitored scalar ("frobenius_norm", "tau2", "omega[i,j]"); empty with one chain.
  std::map<std::string, double> gelman_rubin;
};

/// Five off-diagonal positions picked from `seed`, identical for every chain.
std::vector<std::pair<std::size_t, std::size_t>> monitored_entries(std::size_t p,
                                                                   std::uint64_t seed,
                                                                   std::size_t count = 5);

/// Runs config.n_chains chains on up to `jobs` threads and pools the draws.
MultiChainResult run_chains(const DenseMatrix& y, std::span<const double> diag,
                            const GibbsConfig& config, std::span<const double> levels,
                            const std::optional<DenseMatrix>& reference, std::size_t jobs = 1);

/// Mean, sorted draws and bands from a stack of retained draws.
void summarize_samples(PosteriorSummary& summary, std::span<const double> levels);

}  // namespace qggm
