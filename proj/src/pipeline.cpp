#include "qggm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "qggm/errors.hpp"

namespace qggm {

namespace fs = std::filesystem;

#ifndef QGGM_VERSION
#define QGGM_VERSION "0.1.0"
#endif

std::string version() { return QGGM_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Json header(const std::string& command, const Json& config) {
  Json j;
  j["version"] = version();
  j["command"] = command;
  j["config"] = config;
  return j;
}

void write_meta_sidecar(const fs::path& csv, const std::string& command, const Json& config) {
  write_json(fs::path(csv.string() + ".meta.json"), header(command, config));
}

Json gibbs_to_json(const GibbsConfig& g) {
  return Json{{"iterations", g.n_iter}, {"burn_in", g.burn_in}, {"thin", g.thin},
              {"seed", g.seed},         {"chains", g.n_chains}, {"column_parallel", g.column_parallel}};
}

Json options_to_json(const FitOptions& o) {
  return Json{{"gibbs", gibbs_to_json(o.gibbs)},
              {"known_diag", o.known_diag},
              {"symmetrize", to_string(o.symmetrize)},
              {"level", o.level},
              {"cv_folds", o.folds},
              {"jobs", o.jobs},
              {"per_sample_symmetrize", o.per_sample_symmetrize}};
}

Json pattern_to_json(const PatternSpec& s) {
  return Json{{"kind", to_string(s.kind)},
              {"p", s.p},
              {"seed", s.seed},
              {"group_size", s.group_size},
              {"clique_size", s.clique_size},
              {"edge_prob", s.resolved_edge_prob()},
              {"hub_value", s.hub_value},
              {"clique_value", s.clique_value},
              {"random_low", s.random_low},
              {"random_high", s.random_high},
              {"cliques_random_within", s.cr_within},
              {"cliques_random_between", s.cr_between},
              {"hubs_cliques_hub", s.hc_hub},
              {"hubs_cliques_clique", s.hc_clique},
              {"pd_floor", s.pd_floor},
              {"max_attempts", s.max_attempts}};
}

std::vector<std::string> path_strings(const std::vector<fs::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

double nan_if_undefined(double v, bool defined) { return defined ? v : kNaN; }

Json report_to_json(const EvalReport& r) {
  Json roc = Json::array();
  for (const auto& pt : r.roc) roc.push_back({pt.level, pt.fpr, pt.tpr});
  Json rhat = Json::object();
  for (const auto& [k, v] : r.gelman_rubin) rhat[k] = v;
  return Json{{"frob_error", r.frob_error},
              {"spectral_error", r.spectral_error},
              {"tpr", nan_if_undefined(r.rates.tpr, r.rates.tpr_defined)},
              {"fpr", r.rates.fpr},
              {"tpr_defined", r.rates.tpr_defined},
              {"fpr_defined", r.rates.fpr_defined},
              {"roc", roc},
              {"epsilon_n", r.contraction.epsilon_n},
              {"rate_spectral", r.contraction.rate_spectral},
              {"s_star_ordered", r.contraction.s_star_ordered},
              {"s_star_upper", r.contraction.s_star_upper},
              {"d_star", r.contraction.d_star},
              {"gelman_rubin", rhat},
              {"gelman_rubin_variant", "classic"}};
}

template <typename F>
void run_pool(std::size_t count, std::size_t jobs, F&& task) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t k) {
    try {
      task(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) guarded(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) guarded(k);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string replicate_name(std::size_t r) {
  std::string digits = std::to_string(r);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "Y_" + digits + ".csv";
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return kNaN;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void require_file(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec))
    throw IoError("missing " + what + ": expected file at '" + path.string() + "'");
}

}  // namespace

// ---- in-memory fit ----------------------------------------------------------

void FitOptions::validate() const {
  gibbs.validate();
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("credible level must lie in (0, 1)");
  if (folds < 2) throw ValidationError("cv folds must be at least 2");
  if (jobs < 1) throw ValidationError("jobs must be at least 1");
}

FitOutcome fit_data(const DenseMatrix& y, const FitOptions& options,
                    const std::optional<DenseMatrix>& reference) {
  options.validate();
  if (!y.all_finite()) throw ValidationError("fit: data contain non-finite values");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t p = y.cols();
  if (p < 2) throw ValidationError("fit: need at least 2 columns");

  FitOutcome out;
  out.method = options.known_diag ? kMethodKnownDiag : kMethodEstimatedDiag;
  if (options.known_diag) {
    out.diag.assign(p, 1.0);
  } else {
    out.diag_estimate = estimate_diagonal(y, options.folds, options.gibbs.seed);
    out.diag = out.diag_estimate->omega;
  }

  const std::vector<double> levels{options.level};
  out.chains = run_chains(y, out.diag, options.gibbs, levels, reference, options.jobs);
  PosteriorSummary& pooled = out.chains.pooled;
  if (options.per_sample_symmetrize) {
    for (auto& s : pooled.samples) s = symmetrize_l1(s, options.symmetrize).matrix;
    summarize_samples(pooled, levels);
  }
  out.estimate = symmetrize_l1(pooled.mean, options.symmetrize);
  out.selected = select_edges(pooled.band(options.level));
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

EvalReport evaluate_fit(const FitOutcome& fit, const GroundTruth& truth, std::size_t n,
                        std::span<const double> roc_levels) {
  const std::size_t p = truth.omega_star.rows();
  EvalReport r;
  r.frob_error = frobenius_error(fit.estimate.matrix, truth.omega_star);
  r.spectral_error = spectral_norm(fit.estimate.matrix - truth.omega_star);
  r.rates = tpr_fpr(fit.selected, truth.support, p);
  if (!roc_levels.empty() && !fit.chains.pooled.samples.empty())
    r.roc = roc_sweep(fit.chains.pooled, truth.support, roc_levels);
  r.contraction = contraction_rates(p, n, truth.support);
  r.gelman_rubin = fit.chains.gelman_rubin;
  return r;
}

// ---- simulate ---------------------------------------------------------------

Json SimulateConfig::to_json() const {
  return Json{{"pattern", pattern_to_json(pattern)},
              {"n", n},
              {"reps", reps},
              {"out_dir", out_dir.string()},
              {"force", force}};
}

namespace {

Json truth_to_json(const GroundTruth& t, const PatternSpec& spec) {
  const ContractionRates cr = contraction_rates(spec.p, 1, t.support);
  return Json{{"pattern", to_string(spec.kind)},
              {"p", spec.p},
              {"omega_star", matrix_to_json(t.omega_star)},
              {"support", pairs_to_json(t.support)},
              {"s_star_upper", cr.s_star_upper},
              {"s_star_ordered", cr.s_star_ordered},
              {"d_star", cr.d_star},
              {"min_eig", t.min_eig},
              {"attempts", t.attempts}};
}

}  // namespace

std::vector<fs::path> simulate(const SimulateConfig& config) {
  if (config.n < 1) throw ValidationError("simulate: n must be at least 1");
  if (config.reps < 1) throw ValidationError("simulate: replicate count must be at least 1");
  if (config.out_dir.empty()) throw ValidationError("simulate: output directory is required");
  const GroundTruth truth = generate_pattern(config.pattern);
  std::vector<DenseMatrix> data;
  data.reserve(config.reps);
  for (std::size_t r = 0; r < config.reps; ++r) {
    RngStream stream(config.pattern.seed + r, 1);
    data.push_back(sample_mvn(truth, config.n, stream));
  }

  prepare_output_dir(config.out_dir, config.force);
  const Json cfg = config.to_json();
  std::vector<fs::path> written;

  Json truth_json = header("simulate", cfg);
  truth_json.update(truth_to_json(truth, config.pattern));
  const fs::path truth_path = config.out_dir / "truth.json";
  write_json(truth_path, truth_json);
  written.push_back(truth_path);

  Json files = Json::array();
  for (std::size_t r = 0; r < config.reps; ++r) {
    const fs::path path = config.out_dir / replicate_name(r);
    write_csv_matrix(path, data[r]);
    files.push_back({{"file", path.filename().string()},
                     {"seed", config.pattern.seed + r},
                     {"n", config.n},
                     {"p", config.pattern.p}});
    written.push_back(path);
  }

  Json manifest = header("simulate", cfg);
  manifest["pattern"] = to_string(config.pattern.kind);
  manifest["truth"] = "truth.json";
  manifest["min_eig"] = truth.min_eig;
  manifest["attempts"] = truth.attempts;
  manifest["support_size"] = truth.support.size();
  manifest["datasets"] = files;
  const fs::path manifest_path = config.out_dir / "manifest.json";
  write_json(manifest_path, manifest);
  written.push_back(manifest_path);
  return written;
}

GroundTruth load_truth(const fs::path& path) {
  require_file(path, "truth file");
  const Json j = read_json(path);
  if (!j.contains("omega_star") || !j.contains("support"))
    throw ValidationError(path.string() + ": not a truth file (missing omega_star or support)");
  GroundTruth t;
  t.omega_star = matrix_from_json(j["omega_star"]);
  t.support = pairs_from_json(j["support"]);
  t.min_eig = j.value("min_eig", kNaN);
  t.attempts = j.value("attempts", std::size_t{1});
  if (!t.omega_star.is_square()) throw ValidationError(path.string() + ": omega_star is not square");
  return t;
}

// ---- fit --------------------------------------------------------------------

Json FitConfig::to_json() const {
  return Json{{"inputs", path_strings(inputs)},
              {"out_dir", out_dir.string()},
              {"truth", truth ? Json(truth->string()) : Json(nullptr)},
              {"options", options_to_json(options)},
              {"write_samples", write_samples}};
}

namespace {

Json trace_json(const PosteriorSummary& chain) {
  Json entries = Json::object();
  for (std::size_t m = 0; m < chain.monitored.size(); ++m) {
    const auto [r, c] = chain.monitored[m];
    entries["omega[" + std::to_string(r) + "," + std::to_string(c) + "]"] = chain.entry_traces[m];
  }
  return Json{{"frobenius_distance", chain.frob_trace},
              {"frobenius_norm", chain.norm_trace},
              {"tau2", chain.tau2_trace},
              {"entries", entries}};
}

Json fit_to_json(const FitOutcome& f, std::size_t n, const FitOptions& opt, bool reference_is_truth,
                 const std::optional<std::string>& samples_file) {
  const PosteriorSummary& pooled = f.chains.pooled;
  Json j;
  j["method"] = f.method;
  j["p"] = pooled.p;
  j["n"] = n;
  j["diag"] = f.diag;
  if (f.diag_estimate) {
    std::vector<bool> fallback(f.diag_estimate->fallback.begin(), f.diag_estimate->fallback.end());
    j["diag_estimates"] = Json{{"omega", f.diag_estimate->omega},
                               {"lambda", f.diag_estimate->lambda},
                               {"fallback", fallback}};
  } else {
    j["diag_estimates"] = nullptr;
  }
  j["posterior_mean"] = matrix_to_json(pooled.mean);
  j["estimate"] = matrix_to_json(f.estimate.matrix);
  j["symmetrize"] = Json{{"mode_requested", to_string(opt.symmetrize)},
                         {"mode_used", to_string(f.estimate.mode_used)},
                         {"objective", f.estimate.objective},
                         {"lp_pivots", f.estimate.lp_pivots},
                         {"bland_engaged", f.estimate.bland_engaged},
                         {"per_sample", opt.per_sample_symmetrize}};
  const CredibleBand& band = pooled.band(opt.level);
  j["credible_level"] = opt.level;
  j["band"] = Json{{"lower", matrix_to_json(band.lower)}, {"upper", matrix_to_json(band.upper)}};
  j["selected_edges"] = pairs_to_json(f.selected.edges());
  j["retained_samples"] = pooled.samples.size();
  j["samples_path"] = samples_file ? Json(*samples_file) : Json(nullptr);
  j["trace_reference"] = reference_is_truth ? "truth" : "zero-offdiag";
  Json rhat = Json::object();
  for (const auto& [k, v] : f.chains.gelman_rubin) rhat[k] = v;
  j["gelman_rubin"] = rhat;
  j["gelman_rubin_variant"] = "classic";
  Json chains = Json::array();
  for (const auto& ch : f.chains.chains) chains.push_back(trace_json(ch));
  j["chains"] = chains;
  return j;
}

}  // namespace

std::vector<fs::path> fit(const FitConfig& config) {
  config.options.validate();
  if (config.inputs.empty()) throw ValidationError("fit: at least one input CSV is required");
  if (config.out_dir.empty()) throw ValidationError("fit: output directory is required");
  std::optional<DenseMatrix> reference;
  if (config.truth) reference = load_truth(*config.truth).omega_star;
  for (const auto& in : config.inputs) require_file(in, "input CSV");

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (!fs::is_directory(config.out_dir))
    throw IoError("cannot create output directory '" + config.out_dir.string() + "'");

  const Json cfg = config.to_json();
  std::vector<fs::path> outputs(config.inputs.size());
  const bool fan_out = config.inputs.size() > 1;
  run_pool(config.inputs.size(), fan_out ? config.options.jobs : 1, [&](std::size_t k) {
    const fs::path& input = config.inputs[k];
    const DenseMatrix y = read_csv_matrix(input);
    if (reference && reference->rows() != y.cols())
      throw ValidationError(input.string() + ": has " + std::to_string(y.cols()) +
                            " columns but the truth is " + std::to_string(reference->rows()) + " x " +
                            std::to_string(reference->rows()));
    FitOptions opt = config.options;
    if (fan_out) opt.jobs = 1;
    const FitOutcome f = fit_data(y, opt, reference);

    const std::string stem = input.stem().string();
    std::optional<std::string> samples_file;
    if (config.write_samples) {
      samples_file = stem + ".samples.bin";
      write_samples(config.out_dir / *samples_file, f.chains.pooled.samples);
    }
    Json j = header("fit", cfg);
    j["input"] = input.string();
    j.update(fit_to_json(f, y.rows(), config.options, reference.has_value(), samples_file));
    const fs::path out = config.out_dir / (stem + ".fit.json");
    write_json(out, j);
    write_json(config.out_dir / (stem + ".timing.json"),
               Json{{"version", version()}, {"fit", out.filename().string()}, {"wall_seconds", f.wall_seconds}});
    outputs[k] = out;
  });
  return outputs;
}

// ---- evaluate / roc ---------------------------------------------------------

namespace {

struct LoadedFit {
  std::string method;
  std::size_t n = 0;
  DenseMatrix estimate;
  std::vector<std::pair<std::size_t, std::size_t>> selected;
  std::optional<fs::path> samples;
  std::map<std::string, double> gelman_rubin;
  double wall_seconds = kNaN;
};

LoadedFit load_fit(const fs::path& path) {
  require_file(path, "fit file");
  const Json j = read_json(path);
  for (const char* key : {"method", "n", "estimate", "selected_edges"})
    if (!j.contains(key)) throw ValidationError(path.string() + ": not a fit file (missing '" + key + "')");
  LoadedFit f;
  f.method = j["method"].get<std::string>();
  f.n = j["n"].get<std::size_t>();
  f.estimate = matrix_from_json(j["estimate"]);
  f.selected = pairs_from_json(j["selected_edges"]);
  if (j.contains("samples_path") && j["samples_path"].is_string())
    f.samples = path.parent_path() / j["samples_path"].get<std::string>();
  if (j.contains("gelman_rubin"))
    for (const auto& [k, v] : j["gelman_rubin"].items()) f.gelman_rubin[k] = v.get<double>();
  std::string stem = path.filename().string();
  const auto dot = stem.find(".fit.json");
  if (dot != std::string::npos) {
    const fs::path timing = path.parent_path() / (stem.substr(0, dot) + ".timing.json");
    std::error_code ec;
    if (fs::is_regular_file(timing, ec)) f.wall_seconds = read_json(timing).value("wall_seconds", kNaN);
  }
  return f;
}

std::vector<RocPoint> roc_from_samples(const fs::path& samples_path, const GroundTruth& truth) {
  require_file(samples_path, "posterior sample file");
  const std::vector<DenseMatrix> samples = read_samples(samples_path);
  if (samples.empty()) throw ValidationError(samples_path.string() + ": holds no draws");
  if (samples.front().rows() != truth.omega_star.rows())
    throw ValidationError(samples_path.string() + ": dimension does not match the truth");
  const SortedDraws sorted(samples);
  const std::vector<double> levels = default_roc_levels();
  return roc_sweep(sorted, truth.support, levels);
}

EdgeSelection selection_from_pairs(std::size_t p, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  EdgeSelection sel(p);
  for (auto [i, j] : pairs) {
    if (i >= p || j >= p) throw ValidationError("selected edge out of range");
    sel.set(i, j);
  }
  return sel;
}

}  // namespace

Json EvaluateConfig::to_json() const {
  return Json{{"truth", truth.string()},
              {"fits", path_strings(fits)},
              {"external", path_strings(external)},
              {"external_method", external_method},
              {"out_dir", out_dir.string()}};
}

std::vector<fs::path> evaluate(const EvaluateConfig& config) {
  if (config.fits.empty() && config.external.empty())
    throw ValidationError("evaluate: give at least one fit or external estimate");
  if (config.out_dir.empty()) throw ValidationError("evaluate: output directory is required");
  const GroundTruth truth = load_truth(config.truth);
  const std::string pattern = read_json(config.truth).value("pattern", std::string("unknown"));
  const std::size_t p = truth.omega_star.rows();
  const Json cfg = config.to_json();

  struct Row {
    std::vector<double> frob, tpr, fpr, minutes;
  };
  std::map<std::string, Row> table;
  std::vector<std::string> method_order;
  auto row_for = [&](const std::string& method) -> Row& {
    if (!table.count(method)) method_order.push_back(method);
    return table[method];
  };

  std::vector<fs::path> written;
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);

  auto emit = [&](const fs::path& source, const std::string& method, const EvalReport& r, double seconds) {
    Row& row = row_for(method);
    row.frob.push_back(r.frob_error);
    if (r.rates.tpr_defined) row.tpr.push_back(r.rates.tpr);
    row.fpr.push_back(r.rates.fpr);
    if (std::isfinite(seconds)) row.minutes.push_back(seconds / 60.0);
    Json j = header("evaluate", cfg);
    j["source"] = source.string();
    j["method"] = method;
    j["pattern"] = pattern;
    j["report"] = report_to_json(r);
    std::string stem = source.stem().string();
    if (stem.ends_with(".fit")) stem.resize(stem.size() - 4);
    const fs::path out = config.out_dir / ("eval_" + stem + ".json");
    write_json(out, j);
    written.push_back(out);
  };

  for (const auto& path : config.fits) {
    const LoadedFit f = load_fit(path);
    if (f.estimate.rows() != p) throw ValidationError(path.string() + ": dimension does not match the truth");
    EvalReport r;
    r.frob_error = frobenius_error(f.estimate, truth.omega_star);
    r.spectral_error = spectral_norm(f.estimate - truth.omega_star);
    r.rates = tpr_fpr(selection_from_pairs(p, f.selected), truth.support, p);
    if (f.samples) r.roc = roc_from_samples(*f.samples, truth);
    r.contraction = contraction_rates(p, f.n, truth.support);
    r.gelman_rubin = f.gelman_rubin;
    emit(path, f.method, r, f.wall_seconds);
  }
  for (const auto& path : config.external) {
    require_file(path, "external estimate");
    const DenseMatrix est = read_csv_matrix(path);
    if (est.rows() != p || est.cols() != p)
      throw ValidationError(path.string() + ": external estimate must be " + std::to_string(p) + " x " +
                            std::to_string(p));
    EvalReport r;
    r.frob_error = frobenius_error(est, truth.omega_star);
    r.spectral_error = spectral_norm(est - truth.omega_star);
    r.rates = tpr_fpr(nonzero_pattern(est), truth.support, p);
    r.contraction = contraction_rates(p, 1, truth.support);
    emit(path, config.external_method, r, kNaN);
  }

  std::string csv = "pattern,method,replicates,frob_mean,frob_sd,tpr_pct_mean,tpr_pct_sd,fpr_pct_mean,fpr_pct_sd,wall_minutes_mean\n";
  for (const auto& method : method_order) {
    const Row& row = table[method];
    auto pct = [](std::vector<double> v) {
      for (double& x : v) x *= 100.0;
      return v;
    };
    const std::vector<double> cells = {mean_of(row.frob),     sd_of(row.frob),     mean_of(pct(row.tpr)),
                                       sd_of(pct(row.tpr)),   mean_of(pct(row.fpr)), sd_of(pct(row.fpr)),
                                       mean_of(row.minutes)};
    csv += pattern + "," + method + "," + std::to_string(row.frob.size());
    for (double c : cells) csv += "," + format_double(c);
    csv += "\n";
  }
  const fs::path table_path = config.out_dir / "table1.csv";
  write_text(table_path, csv);
  write_meta_sidecar(table_path, "evaluate", cfg);
  written.push_back(table_path);
  return written;
}

Json RocConfig::to_json() const {
  return Json{{"truth", truth.string()}, {"fit", fit.string()}, {"out", out.string()}};
}

fs::path roc(const RocConfig& config) {
  if (config.out.empty()) throw ValidationError("roc: output path is required");
  const GroundTruth truth = load_truth(config.truth);
  const LoadedFit f = load_fit(config.fit);
  if (!f.samples)
    throw ValidationError(config.fit.string() + ": fit was run without a sample file; ROC needs the draws");
  const std::vector<RocPoint> points = roc_from_samples(*f.samples, truth);
  std::vector<std::vector<double>> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) rows.push_back({pt.fpr, pt.tpr});
  write_csv_table(config.out, {"fpr", "tpr"}, rows);
  Json cfg = config.to_json();
  cfg["levels"] = Json{{"count", points.size()}, {"first", points.front().level}, {"last", points.back().level}};
  write_meta_sidecar(config.out, "roc", cfg);
  return config.out;
}

// ---- diagnose ---------------------------------------------------------------

Json DiagnoseConfig::to_json() const {
  return Json{{"fit", fit.string()}, {"out_dir", out_dir.string()}};
}

std::vector<fs::path> diagnose(const DiagnoseConfig& config) {
  require_file(config.fit, "fit file");
  if (config.out_dir.empty()) throw ValidationError("diagnose: output directory is required");
  const Json j = read_json(config.fit);
  if (!j.contains("chains")) throw ValidationError(config.fit.string() + ": fit file has no chain traces");
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  const Json cfg = config.to_json();
  std::vector<fs::path> written;

  std::size_t k = 0;
  for (const auto& chain : j["chains"]) {
    std::vector<std::string> head = {"iteration", "frobenius_distance", "frobenius_norm", "tau2"};
    std::vector<std::vector<double>> cols = {chain["frobenius_distance"].get<std::vector<double>>(),
                                             chain["frobenius_norm"].get<std::vector<double>>(),
                                             chain["tau2"].get<std::vector<double>>()};
    for (const auto& [name, trace] : chain["entries"].items()) {
      head.push_back(name);
      cols.push_back(trace.get<std::vector<double>>());
    }
    std::vector<std::vector<double>> rows(cols.front().size());
    for (std::size_t it = 0; it < rows.size(); ++it) {
      rows[it].push_back(static_cast<double>(it));
      for (const auto& c : cols) rows[it].push_back(c.at(it));
    }
    const fs::path out = config.out_dir / ("trace_chain" + std::to_string(k++) + ".csv");
    write_csv_table(out, head, rows);
    write_meta_sidecar(out, "diagnose", cfg);
    written.push_back(out);
  }

  Json rhat = header("diagnose", cfg);
  rhat["variant"] = "classic";
  rhat["chains"] = k;
  rhat["burn_in"] = j["config"]["options"]["gibbs"]["burn_in"];
  rhat["threshold"] = 1.1;
  rhat["rhat"] = j.value("gelman_rubin", Json::object());
  if (k < 2) rhat["note"] = "R-hat needs at least two chains";
  const fs::path rhat_path = config.out_dir / "rhat.json";
  write_json(rhat_path, rhat);
  written.push_back(rhat_path);
  return written;
}

// ---- check-prior / bench ----------------------------------------------------

Json CheckPriorConfig::to_json() const {
  return Json{{"alpha", spec.alpha}, {"a_n", spec.a_n}, {"E_n", spec.E_n}, {"p", spec.p},
              {"u", spec.u},         {"c", spec.c},     {"out", out ? Json(out->string()) : Json(nullptr)}};
}

Json check_prior(const CheckPriorConfig& config) {
  config.spec.validate();
  const ConcentrationCheck conc = check_concentration(config.spec);
  const ThicknessCheck thick = check_thickness(config.spec);
  Json j = header("check-prior", config.to_json());
  j["alpha"] = config.spec.alpha;
  j["a_n"] = config.spec.a_n;
  j["E_n"] = config.spec.E_n;
  j["p"] = config.spec.p;
  j["u"] = config.spec.u;
  j["c"] = config.spec.c;
  j["mass_outside"] = conc.mass_outside;
  j["mass_threshold"] = conc.threshold;
  j["inf_density"] = thick.inf_density;
  j["density_threshold"] = thick.threshold;
  j["passes_concentration"] = conc.passes;
  j["passes_thickness"] = thick.passes;
  if (config.out) write_json(*config.out, j);
  return j;
}

Json BenchConfig::to_json() const {
  return Json{{"pattern", pattern_to_json(pattern)},
              {"n", n},
              {"options", options_to_json(options)},
              {"out", out ? Json(out->string()) : Json(nullptr)}};
}

Json bench(const BenchConfig& config) {
  const GroundTruth truth = generate_pattern(config.pattern);
  RngStream stream(config.pattern.seed, 1);
  const DenseMatrix y = sample_mvn(truth, config.n, stream);
  const auto start = std::chrono::steady_clock::now();
  const FitOutcome f = fit_data(y, config.options, truth.omega_star);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const SelectionRates rates = tpr_fpr(f.selected, truth.support, truth.omega_star.rows());

  Json j = header("bench", config.to_json());
  j["method"] = f.method;
  j["p"] = config.pattern.p;
  j["n"] = config.n;
  j["iterations"] = config.options.gibbs.n_iter;
  j["chains"] = config.options.gibbs.n_chains;
  j["wall_seconds"] = seconds;
  j["wall_minutes"] = seconds / 60.0;
  j["reference_minutes"] = 7.73;
  j["frob_error"] = frobenius_error(f.estimate.matrix, truth.omega_star);
  j["tpr"] = nan_if_undefined(rates.tpr, rates.tpr_defined);
  j["fpr"] = rates.fpr;
  if (config.out) write_json(*config.out, j);
  return j;
}

}  // namespace qggm
