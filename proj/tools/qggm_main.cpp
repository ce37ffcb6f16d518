// qggm: command-line front end for simulation, fitting and evaluation.

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "qggm/errors.hpp"
#include "qggm/pipeline.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::size_t default_jobs() {
  if (const char* env = std::getenv("QGGM_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw qggm::ValidationError("QGGM_JOBS must be a positive integer, got '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void add_pattern_options(CLI::App* cmd, qggm::PatternSpec& spec, std::string& pattern) {
  cmd->add_option("--pattern", pattern,
                  "random, hubs, cliques, hubs-random, cliques-random or hubs-cliques")
      ->required();
  cmd->add_option("--p", spec.p, "Dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", spec.seed, "Base seed");
  cmd->add_option("--group-size", spec.group_size, "Group size for grouped patterns");
  cmd->add_option("--clique-size", spec.clique_size, "Clique size inside each group");
  cmd->add_option("--edge-prob", spec.edge_prob, "Random edge probability (default 1/p)");
  cmd->add_option("--pd-floor", spec.pd_floor, "Smallest admissible eigenvalue of the truth");
  cmd->add_option("--max-attempts", spec.max_attempts, "Redraws allowed to reach the PD floor");
}

void add_fit_options(CLI::App* cmd, qggm::FitOptions& o, std::string& symmetrize) {
  cmd->add_option("--iters", o.gibbs.n_iter, "Gibbs iterations");
  cmd->add_option("--burn-in", o.gibbs.burn_in, "Burn-in iterations");
  cmd->add_option("--thin", o.gibbs.thin, "Thinning interval");
  cmd->add_option("--chains", o.gibbs.n_chains, "Number of chains");
  cmd->add_option("--seed", o.gibbs.seed, "Sampler seed");
  cmd->add_flag("--column-parallel", o.gibbs.column_parallel, "Update columns on worker threads");
  cmd->add_flag("--known-diag", o.known_diag, "Fix the diagonal at one instead of estimating it");
  cmd->add_option("--symmetrize", symmetrize, "exact, heuristic or auto")
      ->check(CLI::IsMember({"exact", "heuristic", "auto"}));
  cmd->add_option("--level", o.level, "Credible level for edge selection");
  cmd->add_option("--cv-folds", o.folds, "Folds for the diagonal estimator");
  cmd->add_flag("--per-sample-symmetrize", o.per_sample_symmetrize,
                "Symmetrize every draw before summarizing");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Bayesian graphical horseshoe: simulate, fit and evaluate"};
  app.set_version_flag("--version", qggm::version());
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1);
  std::size_t jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (default: QGGM_JOBS or logical cores)");

  // simulate
  qggm::SimulateConfig sim;
  std::string sim_pattern;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a true precision matrix and datasets");
  add_pattern_options(simulate, sim.pattern, sim_pattern);
  simulate->add_option("--n", sim.n, "Rows per dataset");
  simulate->add_option("--reps", sim.reps, "Number of datasets");
  simulate->add_option("--out-dir", sim_out, "Output directory")->required();
  simulate->add_flag("--force", sim.force, "Write into a non-empty directory");

  // fit
  qggm::FitConfig fit;
  std::vector<std::string> fit_inputs;
  std::string fit_out, fit_truth, fit_sym = "auto";
  bool no_samples = false;
  auto* fitcmd = app.add_subcommand("fit", "Run the sampler on one or more datasets");
  fitcmd->add_option("--input", fit_inputs, "Headerless CSV (repeatable)")->required();
  fitcmd->add_option("--out-dir", fit_out, "Output directory")->required();
  fitcmd->add_option("--truth", fit_truth, "truth.json; used as the Frobenius-trace reference");
  fitcmd->add_flag("--no-samples", no_samples, "Skip the binary sample file");
  add_fit_options(fitcmd, fit.options, fit_sym);

  // evaluate
  qggm::EvaluateConfig ev;
  std::vector<std::string> ev_fits, ev_external;
  std::string ev_truth, ev_out;
  auto* evaluate = app.add_subcommand("evaluate", "Score fits against the truth");
  evaluate->add_option("--truth", ev_truth, "truth.json")->required();
  evaluate->add_option("--fit", ev_fits, "Fit JSON (repeatable)");
  evaluate->add_option("--external", ev_external, "Point-estimate CSV of another method (repeatable)");
  evaluate->add_option("--external-method", ev.external_method, "Method tag for external estimates");
  evaluate->add_option("--out-dir", ev_out, "Output directory")->required();

  // roc
  std::string roc_truth, roc_fit, roc_out;
  auto* roccmd = app.add_subcommand("roc", "ROC curve over credible levels");
  roccmd->add_option("--truth", roc_truth, "truth.json")->required();
  roccmd->add_option("--fit", roc_fit, "Fit JSON")->required();
  roccmd->add_option("--out", roc_out, "Output CSV")->required();

  // diagnose
  std::string diag_fit, diag_out;
  auto* diagnose = app.add_subcommand("diagnose", "Trace CSVs and R-hat");
  diagnose->add_option("--fit", diag_fit, "Fit JSON")->required();
  diagnose->add_option("--out-dir", diag_out, "Output directory")->required();

  // check-prior
  qggm::CheckPriorConfig prior;
  std::string prior_out;
  auto* checkprior = app.add_subcommand("check-prior", "Check the prior concentration and thickness conditions");
  checkprior->add_option("--alpha", prior.spec.alpha, "Global scale")->required();
  checkprior->add_option("--a-n", prior.spec.a_n, "Concentration radius")->required();
  checkprior->add_option("--E-n", prior.spec.E_n, "Signal-strength bound")->required();
  checkprior->add_option("--p", prior.spec.p, "Dimension")->required();
  checkprior->add_option("--u", prior.spec.u, "Concentration exponent")->required();
  checkprior->add_option("--c", prior.spec.c, "Thickness exponent")->required();
  checkprior->add_option("--out", prior_out, "Output JSON (default: stdout)");

  // bench
  qggm::BenchConfig bench;
  std::string bench_pattern, bench_out, bench_sym = "auto";
  auto* benchcmd = app.add_subcommand("bench", "Time one end-to-end fit on simulated data");
  add_pattern_options(benchcmd, bench.pattern, bench_pattern);
  benchcmd->add_option("--n", bench.n, "Rows");
  benchcmd->add_option("--out", bench_out, "Output JSON (default: stdout)");
  {
    // --seed is shared: it seeds both the data and the sampler.
    auto& o = bench.options;
    benchcmd->add_option("--iters", o.gibbs.n_iter, "Gibbs iterations");
    benchcmd->add_option("--burn-in", o.gibbs.burn_in, "Burn-in iterations");
    benchcmd->add_option("--thin", o.gibbs.thin, "Thinning interval");
    benchcmd->add_option("--chains", o.gibbs.n_chains, "Number of chains");
    benchcmd->add_flag("--known-diag", o.known_diag, "Fix the diagonal at one");
    benchcmd->add_option("--symmetrize", bench_sym, "exact, heuristic or auto")
        ->check(CLI::IsMember({"exact", "heuristic", "auto"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    const std::size_t workers = jobs > 0 ? jobs : default_jobs();
    if (*simulate) {
      sim.pattern.kind = qggm::parse_pattern(sim_pattern);
      sim.out_dir = sim_out;
      for (const auto& p : qggm::simulate(sim)) std::cout << p.string() << "\n";
    } else if (*fitcmd) {
      for (const auto& in : fit_inputs) fit.inputs.emplace_back(in);
      fit.out_dir = fit_out;
      if (!fit_truth.empty()) fit.truth = fit_truth;
      fit.write_samples = !no_samples;
      fit.options.symmetrize = qggm::parse_symmetrize_mode(fit_sym);
      fit.options.jobs = workers;
      for (const auto& p : qggm::fit(fit)) std::cout << p.string() << "\n";
    } else if (*evaluate) {
      ev.truth = ev_truth;
      for (const auto& f : ev_fits) ev.fits.emplace_back(f);
      for (const auto& f : ev_external) ev.external.emplace_back(f);
      ev.out_dir = ev_out;
      for (const auto& p : qggm::evaluate(ev)) std::cout << p.string() << "\n";
    } else if (*roccmd) {
      std::cout << qggm::roc({roc_truth, roc_fit, roc_out}).string() << "\n";
    } else if (*diagnose) {
      for (const auto& p : qggm::diagnose({diag_fit, diag_out})) std::cout << p.string() << "\n";
    } else if (*checkprior) {
      if (!prior_out.empty()) prior.out = prior_out;
      const auto j = qggm::check_prior(prior);
      if (!prior.out) std::cout << j.dump(2) << "\n";
    } else if (*benchcmd) {
      bench.pattern.kind = qggm::parse_pattern(bench_pattern);
      bench.options.gibbs.seed = bench.pattern.seed;
      bench.options.symmetrize = qggm::parse_symmetrize_mode(bench_sym);
      bench.options.jobs = workers;
      if (!bench_out.empty()) bench.out = bench_out;
      const auto j = qggm::bench(bench);
      std::cerr << "fit took " << j["wall_minutes"].get<double>() << " minutes\n";
      if (!bench.out) std::cout << j.dump(2) << "\n";
    }
  } catch (const qggm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qggm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qggm::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
