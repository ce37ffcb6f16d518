#include "qggm/gibbs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "qggm/errors.hpp"
#include "qggm/metrics.hpp"

namespace qggm {

std::size_t GibbsConfig::retained() const {
  if (n_iter <= burn_in || thin == 0) return 0;
  return (n_iter - burn_in) / thin;
}

void GibbsConfig::validate() const {
  if (thin < 1) throw ValidationError("GibbsConfig: thin must be >= 1");
  if (burn_in >= n_iter) throw ValidationError("GibbsConfig: burn_in must be < n_iter");
  if (retained() < 2)
    throw ValidationError("GibbsConfig: (n_iter - burn_in)/thin must leave at least 2 draws");
  if (n_chains < 1) throw ValidationError("GibbsConfig: n_chains must be >= 1");
}

namespace {

double clamp_scale(double x) {
  if (std::isnan(x)) return kScaleCeiling;
  return std::clamp(x, kScaleFloor, kScaleCeiling);
}

std::uint64_t column_stream_id(std::size_t chain, std::size_t column) {
  return (static_cast<std::uint64_t>(chain) << 32) | static_cast<std::uint64_t>(column);
}
std::uint64_t global_stream_id(std::size_t chain) {
  return (static_cast<std::uint64_t>(chain) << 32) | 0xFFFF'FFFFull;
}
std::uint64_t init_stream_id(std::size_t chain) {
  return (static_cast<std::uint64_t>(chain) << 32) | 0xFFFF'FFFEull;
}
constexpr std::uint64_t kMonitorStreamId = 0xFFFF'FFFF'FFFF'0001ull;

}  // namespace

NormalParams omega_conditional(const HorseshoeState& state, const PrecisionDraw& omega,
                               const GramMatrix& s, std::size_t i, std::size_t j) {
  const std::size_t p = omega.p();
  const double w_ii = omega.diag(i);
  double cross = 0.0;  // Σ_{k≠j} ω_ki s_kj, with ω_ii in the k = i slot
  for (std::size_t k = 0; k < p; ++k) {
    if (k == j) continue;
    const double w_ki = (k == i) ? w_ii : omega.offdiag(k, i);
    cross += w_ki * s(k, j);
  }
  const double precision = s(j, j) / w_ii + 1.0 / (state.tau2 * state.lambda2(j, i));
  const double var = 1.0 / precision;
  return {-(cross / w_ii) * var, var};
}

double local_scale_rate(double omega_ji, double tau2, double v_ji) {
  return omega_ji * omega_ji / (2.0 * tau2) + 1.0 / v_ji;
}

double auxiliary_rate(double lambda2_ji) { return 1.0 + 1.0 / lambda2_ji; }

GammaParams global_scale_conditional(const HorseshoeState& state, const PrecisionDraw& omega) {
  const std::size_t p = omega.p();
  double sum = 0.0;
  for (std::size_t r = 0; r < p; ++r) {
    auto w = omega.offdiag().row(r);
    auto l = state.lambda2.row(r);
    for (std::size_t c = 0; c < p; ++c)
      if (r != c) sum += w[c] * w[c] / l[c];
  }
  const double pd = static_cast<double>(p);
  return {(pd * (pd - 1.0) + 1.0) / 2.0, 1.0 / state.kappa + 0.5 * sum};
}

double kappa_rate(double tau2) { return 1.0 + 1.0 / tau2; }

void update_omega_column(const HorseshoeState& state, PrecisionDraw& omega, const GramMatrix& s,
                         std::size_t i, RngStream& stream) {
  const std::size_t p = omega.p();
  const double w_ii = omega.diag(i);

  std::vector<double> column(p);
  for (std::size_t k = 0; k < p; ++k) column[k] = (k == i) ? w_ii : omega.offdiag(k, i);

  // acc[j] = Σ_k column[k]·s_kj, kept current as entries change.
  std::vector<double> acc(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const double w = column[k];
    if (w == 0.0) continue;
    auto srow = s.row(k);
    for (std::size_t j = 0; j < p; ++j) acc[j] += w * srow[j];
  }

  for (std::size_t j = 0; j < p; ++j) {
    if (j == i) continue;
    const double old = column[j];
    const double s_jj = s(j, j);
    const double cross = acc[j] - old * s_jj;
    const double precision = s_jj / w_ii + 1.0 / (state.tau2 * state.lambda2(j, i));
    const double var = 1.0 / precision;
    const double mean = -(cross / w_ii) * var;
    if (!std::isfinite(mean) || !std::isfinite(var) || !(var > 0.0)) {
      throw NumericalError("update_omega_column: non-finite conditional for omega(" +
                           std::to_string(j) + ", " + std::to_string(i) +
                           "); the Gram matrix may be degenerate");
    }
    const double fresh = sample_normal(stream, mean, var);
    column[j] = fresh;
    const double delta = fresh - old;
    if (delta != 0.0) {
      auto srow = s.row(j);
      for (std::size_t k = 0; k < p; ++k) acc[k] += delta * srow[k];
    }
  }

  for (std::size_t k = 0; k < p; ++k)
    if (k != i) omega.set_offdiag(k, i, column[k]);
}

void update_local_scales_column(HorseshoeState& state, const PrecisionDraw& omega, std::size_t i,
                                RngStream& stream) {
  const std::size_t p = omega.p();
  for (std::size_t j = 0; j < p; ++j) {
    if (j == i) continue;
    const double inv_l = sample_exponential(stream, local_scale_rate(omega.offdiag(j, i), state.tau2,
                                                                      state.v(j, i)));
    const double lambda2 = clamp_scale(1.0 / inv_l);
    state.lambda2(j, i) = lambda2;
    const double inv_v = sample_exponential(stream, auxiliary_rate(lambda2));
    state.v(j, i) = clamp_scale(1.0 / inv_v);
  }
}

void update_local_scales(HorseshoeState& state, const PrecisionDraw& omega, RngStream& stream) {
  if (!(state.tau2 > 0.0)) throw ValidationError("update_local_scales: tau2 must be positive");
  for (std::size_t i = 0; i < omega.p(); ++i) update_local_scales_column(state, omega, i, stream);
}

void update_global_scale(HorseshoeState& state, const PrecisionDraw& omega, RngStream& stream) {
  const GammaParams g = global_scale_conditional(state, omega);
  if (!std::isfinite(g.rate))
    throw NumericalError("update_global_scale: non-finite rate for 1/tau2");
  state.tau2 = clamp_scale(1.0 / sample_gamma(stream, g.shape, g.rate));
  state.kappa = clamp_scale(1.0 / sample_exponential(stream, kappa_rate(state.tau2)));
}

void sweep_columns(HorseshoeState& state, PrecisionDraw& omega, const GramMatrix& s,
                   std::span<RngStream> column_streams, std::span<const std::size_t> order) {
  for (std::size_t i : order) {
    update_omega_column(state, omega, s, i, column_streams[i]);
    update_local_scales_column(state, omega, i, column_streams[i]);
  }
}

// ---------------------------------------------------------------------------

double empirical_quantile(std::span<const double> sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ValidationError("empirical_quantile: no samples");
  // 1-based position h = (N+1)q.
  const double h = (static_cast<double>(n) + 1.0) * q;
  if (h <= 1.0) return sorted.front();
  if (h >= static_cast<double>(n)) return sorted.back();
  const double fl = std::floor(h);
  const std::size_t lo = static_cast<std::size_t>(fl) - 1;
  const double frac = h - fl;
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {
void check_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw ValidationError("credible level must lie in (0, 1), got " + std::to_string(level));
}
std::pair<double, double> interval_from_sorted(std::span<const double> sorted, double level) {
  const double tail = 0.5 * (1.0 - level);
  return {empirical_quantile(sorted, tail), empirical_quantile(sorted, 1.0 - tail)};
}
}  // namespace

std::pair<double, double> credible_interval(std::span<const DenseMatrix> samples, std::size_t i,
                                            std::size_t j, double level) {
  check_level(level);
  if (samples.size() < 2) throw ValidationError("credible_interval: need at least 2 samples");
  std::vector<double> values;
  values.reserve(samples.size());
  for (const auto& m : samples) values.push_back(m(i, j));
  std::sort(values.begin(), values.end());
  return interval_from_sorted(values, level);
}

SortedDraws::SortedDraws(std::span<const DenseMatrix> samples)
    : p_(samples.empty() ? 0 : samples.front().rows()), count_(samples.size()) {
  values_.resize(p_ * p_ * count_);
  for (std::size_t t = 0; t < count_; ++t) {
    auto d = samples[t].data();
    for (std::size_t e = 0; e < p_ * p_; ++e) values_[e * count_ + t] = d[e];
  }
  for (std::size_t e = 0; e < p_ * p_; ++e)
    std::sort(values_.begin() + static_cast<std::ptrdiff_t>(e * count_),
              values_.begin() + static_cast<std::ptrdiff_t>((e + 1) * count_));
}

std::pair<double, double> SortedDraws::interval(std::size_t i, std::size_t j, double level) const {
  check_level(level);
  return interval_from_sorted(entry(i, j), level);
}

const CredibleBand& PosteriorSummary::band(double level) const {
  for (const auto& b : bands)
    if (b.level == level) return b;
  throw ValidationError("PosteriorSummary: no credible band at level " + std::to_string(level));
}

void summarize_samples(PosteriorSummary& summary, std::span<const double> levels) {
  const std::size_t p = summary.p;
  const std::size_t count = summary.samples.size();
  if (count < 2) throw ValidationError("summarize_samples: need at least 2 retained draws");
  summary.mean = DenseMatrix(p, p);
  auto m = summary.mean.data();
  for (const auto& s : summary.samples) {
    auto d = s.data();
    for (std::size_t e = 0; e < m.size(); ++e) m[e] += d[e];
  }
  for (double& v : m) v /= static_cast<double>(count);
  for (std::size_t i = 0; i < p; ++i) summary.mean(i, i) = summary.diag[i];

  summary.bands.clear();
  if (levels.empty()) return;
  const SortedDraws sorted(summary.samples);
  for (double level : levels) {
    check_level(level);
    CredibleBand band{level, DenseMatrix(p, p), DenseMatrix(p, p)};
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) {
        auto [lo, hi] = sorted.interval(i, j, level);
        band.lower(i, j) = lo;
        band.upper(i, j) = hi;
      }
    summary.bands.push_back(std::move(band));
  }
}

namespace {

double frobenius_distance(const PrecisionDraw& omega, const DenseMatrix& reference) {
  const std::size_t p = omega.p();
  double acc = 0.0;
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      const double w = (r == c) ? omega.diag(r) : omega.offdiag(r, c);
      const double d = w - reference(r, c);
      acc += d * d;
    }
  return std::sqrt(acc);
}

double frobenius_norm(const PrecisionDraw& omega) {
  double acc = 0.0;
  for (double d : omega.diag()) acc += d * d;
  for (double w : omega.offdiag().data()) acc += w * w;
  return std::sqrt(acc);
}

void parallel_sweep(HorseshoeState& state, PrecisionDraw& omega, const GramMatrix& s,
                    std::span<RngStream> streams, std::span<const std::size_t> order) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), order.size()));
  if (workers == 1) {
    sweep_columns(state, omega, s, streams, order);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (order.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(order.size(), w * chunk);
      const std::size_t end = std::min(order.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          sweep_columns(state, omega, s, streams, order.subspan(begin, end - begin));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

PosteriorSummary run_chain(const DenseMatrix& y, std::span<const double> diag,
                           const GibbsConfig& config, std::span<const double> levels,
                           const ChainOptions& options) {
  config.validate();
  const std::size_t p = y.cols();
  if (diag.size() != p)
    throw ValidationError("run_chain: diagonal has " + std::to_string(diag.size()) +
                          " entries, data has " + std::to_string(p) + " columns");
  if (y.rows() < 1) throw ValidationError("run_chain: data has no rows");

  const GramMatrix s = gram(y);
  std::vector<double> diag_copy(diag.begin(), diag.end());
  PrecisionDraw omega(diag_copy);
  HorseshoeState state = HorseshoeState::initial(p);

  const std::size_t chain = options.chain_index;
  if (chain > 0) {
    RngStream init(config.seed, init_stream_id(chain));
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c)
        if (r != c) omega.set_offdiag(r, c, sample_normal(init, 0.0, 0.01));
    state.tau2 = (chain % 2 == 1) ? 0.01 : 100.0;
  }

  DenseMatrix reference;
  if (options.reference) {
    reference = *options.reference;
    if (reference.rows() != p || reference.cols() != p)
      throw ValidationError("run_chain: reference matrix must be p x p");
  } else {
    reference = DenseMatrix(p, p);
    for (std::size_t i = 0; i < p; ++i) reference(i, i) = diag_copy[i];
  }

  std::vector<RngStream> streams;
  streams.reserve(p);
  for (std::size_t i = 0; i < p; ++i) streams.emplace_back(config.seed, column_stream_id(chain, i));
  RngStream global(config.seed, global_stream_id(chain));
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});

  PosteriorSummary summary;
  summary.p = p;
  summary.diag = diag_copy;
  summary.monitored = options.monitored;
  summary.samples.reserve(config.retained());
  summary.frob_trace.reserve(config.n_iter);
  summary.tau2_trace.reserve(config.n_iter);
  summary.norm_trace.reserve(config.n_iter);
  summary.entry_traces.assign(options.monitored.size(), {});

  for (std::size_t it = 0; it < config.n_iter; ++it) {
    try {
      if (config.column_parallel)
        parallel_sweep(state, omega, s, streams, order);
      else
        sweep_columns(state, omega, s, streams, order);
      update_global_scale(state, omega, global);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at iteration " + std::to_string(it) +
                           " of chain " + std::to_string(chain));
    }

    summary.frob_trace.push_back(frobenius_distance(omega, reference));
    summary.tau2_trace.push_back(state.tau2);
    summary.norm_trace.push_back(frobenius_norm(omega));
    for (std::size_t m = 0; m < options.monitored.size(); ++m) {
      auto [r, c] = options.monitored[m];
      summary.entry_traces[m].push_back(omega.offdiag(r, c));
    }
    if (it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0)
      summary.samples.push_back(omega.to_dense());
  }

  summarize_samples(summary, levels);
  return summary;
}

std::vector<std::pair<std::size_t, std::size_t>> monitored_entries(std::size_t p,
                                                                   std::uint64_t seed,
                                                                   std::size_t count) {
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c)
      if (r != c) all.emplace_back(r, c);
  if (all.size() <= count) return all;
  RngStream stream(seed, kMonitorStreamId);
  // Partial Fisher-Yates from our own uniform draws keeps this portable.
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t span = all.size() - k;
    const std::size_t pick = k + std::min(span - 1, static_cast<std::size_t>(stream.uniform() * span));
    std::swap(all[k], all[pick]);
  }
  all.resize(count);
  return all;
}

MultiChainResult run_chains(const DenseMatrix& y, std::span<const double> diag,
                            const GibbsConfig& config, std::span<const double> levels,
                            const std::optional<DenseMatrix>& reference, std::size_t jobs) {
  config.validate();
  const std::size_t chains = config.n_chains;
  const auto monitored = monitored_entries(y.cols(), config.seed);

  MultiChainResult result;
  result.chains.resize(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto run_one = [&](std::size_t c) {
    try {
      ChainOptions opts{reference, c, monitored};
      // Bands are computed once on the pooled draws below.
      result.chains[c] = run_chain(y, diag, config, {}, opts);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, chains));
  if (workers == 1) {
    for (std::size_t c = 0; c < chains; ++c) run_one(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < chains; c = next++) run_one(c);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorSummary& pooled = result.pooled;
  pooled.p = y.cols();
  pooled.diag.assign(diag.begin(), diag.end());
  pooled.monitored = monitored;
  for (auto& ch : result.chains) {
    for (auto& m : ch.samples) pooled.samples.push_back(std::move(m));
    ch.samples.clear();
  }
  const PosteriorSummary& first = result.chains.front();
  pooled.frob_trace = first.frob_trace;
  pooled.tau2_trace = first.tau2_trace;
  pooled.norm_trace = first.norm_trace;
  pooled.entry_traces = first.entry_traces;
  summarize_samples(pooled, levels);

  if (chains >= 2) {
    auto post_burn = [&](const std::vector<double>& trace) {
      return std::vector<double>(trace.begin() + static_cast<std::ptrdiff_t>(config.burn_in),
                                 trace.end());
    };
    auto rhat = [&](auto&& pick) {
      std::vector<std::vector<double>> series;
      for (const auto& ch : result.chains) series.push_back(post_burn(pick(ch)));
      return gelman_rubin(series);
    };
    result.gelman_rubin["frobenius_norm"] = rhat([](const PosteriorSummary& c) -> const auto& {
      return c.norm_trace;
    });
    result.gelman_rubin["tau2"] = rhat([](const PosteriorSummary& c) -> const auto& {
      return c.tau2_trace;
    });
    for (std::size_t m = 0; m < monitored.size(); ++m) {
      const std::string name = "omega[" + std::to_string(monitored[m].first) + "," +
                               std::to_string(monitored[m].second) + "]";
      result.gelman_rubin[name] = rhat([m](const PosteriorSummary& c) -> const auto& {
        return c.entry_traces[m];
      });
    }
  }
  return result;
}

}  // namespace qggm
