#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "qggm/errors.hpp"
#include "qggm/pipeline.hpp"

using namespace qggm;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("qggm_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

FitOptions quick_options() {
  FitOptions o;
  o.gibbs.n_iter = 600;
  o.gibbs.burn_in = 100;
  o.gibbs.thin = 5;
  o.gibbs.n_chains = 2;
  o.gibbs.seed = 7;
  return o;
}

SimulateConfig quick_sim(const fs::path& dir, std::size_t reps = 2) {
  SimulateConfig s;
  s.pattern.kind = PatternKind::Cliques;
  s.pattern.p = 10;
  s.pattern.seed = 3;
  s.n = 60;
  s.reps = reps;
  s.out_dir = dir;
  return s;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(QGGM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool is_empty_dir(const fs::path& p) { return !fs::exists(p) || fs::is_empty(p); }

}  // namespace

TEST_CASE("default sampler settings retain 500 draws") {
  CHECK(GibbsConfig{}.retained() == 500);
}

TEST_CASE("simulate: files, manifest and reproducibility") {
  TempDir a, b;
  const auto files = simulate(quick_sim(a / "sim"));
  CHECK(fs::exists(a / "sim/truth.json"));
  CHECK(fs::exists(a / "sim/Y_000.csv"));
  CHECK(fs::exists(a / "sim/Y_001.csv"));
  CHECK(fs::exists(a / "sim/manifest.json"));
  const DenseMatrix y0 = read_csv_matrix(a / "sim/Y_000.csv");
  CHECK(y0.rows() == 60);
  CHECK(y0.cols() == 10);
  CHECK(read_csv_matrix(a / "sim/Y_001.csv") != y0);

  simulate(quick_sim(b / "sim"));
  CHECK(read_text(a / "sim/Y_000.csv") == read_text(b / "sim/Y_000.csv"));
  CHECK(load_truth(a / "sim/truth.json").omega_star == load_truth(b / "sim/truth.json").omega_star);

  const GroundTruth t = load_truth(a / "sim/truth.json");
  CHECK(t.support.size() == 3);
  CHECK(t.omega_star(0, 1) == -0.45);
}

TEST_CASE("simulate: validation happens before any write") {
  TempDir d;
  SimulateConfig s = quick_sim(d / "bad");
  s.pattern.kind = PatternKind::Hubs;
  s.pattern.p = 25;
  CHECK_THROWS_AS(simulate(s), ValidationError);
  CHECK(is_empty_dir(d / "bad"));
  s = quick_sim(d / "bad");
  s.n = 0;
  CHECK_THROWS_AS(simulate(s), ValidationError);
  CHECK(is_empty_dir(d / "bad"));
}

TEST_CASE("simulate: refuses a non-empty directory unless forced") {
  TempDir d;
  write_text(d / "out/keep.txt", "x");
  CHECK_THROWS_AS(simulate(quick_sim(d / "out")), IoError);
  SimulateConfig s = quick_sim(d / "out");
  s.force = true;
  CHECK_NOTHROW(simulate(s));
}

TEST_CASE("fit, evaluate, roc and diagnose round trip") {
  TempDir d;
  simulate(quick_sim(d / "sim"));

  FitConfig fc;
  fc.inputs = {d / "sim/Y_000.csv", d / "sim/Y_001.csv"};
  fc.out_dir = d / "fit";
  fc.truth = d / "sim/truth.json";
  fc.options = quick_options();
  fc.options.jobs = 2;
  const auto fits = fit(fc);
  REQUIRE(fits.size() == 2);

  const Json j = read_json(d / "fit/Y_000.fit.json");
  for (const char* key : {"version", "command", "config", "method", "p", "n", "diag", "posterior_mean", "estimate",
                          "symmetrize", "band", "selected_edges", "retained_samples", "gelman_rubin", "chains"})
    CHECK_MESSAGE(j.contains(key), key);
  CHECK(j["method"] == kMethodEstimatedDiag);
  CHECK(j["retained_samples"] == 200);
  CHECK(j["trace_reference"] == "truth");
  CHECK(fs::exists(d / "fit/Y_000.timing.json"));
  const auto samples = read_samples(d / "fit/Y_000.samples.bin");
  CHECK(samples.size() == 200);
  CHECK(samples.front().rows() == 10);
  const DenseMatrix est = matrix_from_json(j["estimate"]);
  CHECK(est.is_symmetric());

  // Same inputs, one worker: identical numbers.
  FitConfig serial = fc;
  serial.out_dir = d / "fit_serial";
  serial.options.jobs = 1;
  fit(serial);
  const Json k = read_json(d / "fit_serial/Y_000.fit.json");
  CHECK(k["posterior_mean"] == j["posterior_mean"]);
  CHECK(k["estimate"] == j["estimate"]);
  CHECK(k["chains"] == j["chains"]);
  CHECK(read_text(d / "fit_serial/Y_001.samples.bin") == read_text(d / "fit/Y_001.samples.bin"));

  EvaluateConfig ec;
  ec.truth = d / "sim/truth.json";
  ec.fits = fits;
  ec.out_dir = d / "eval";
  evaluate(ec);
  const std::string table = read_text(d / "eval/table1.csv");
  CHECK(table.rfind("pattern,method,replicates,frob_mean,frob_sd,tpr_pct_mean,tpr_pct_sd,fpr_pct_mean,"
                    "fpr_pct_sd,wall_minutes_mean\n",
                    0) == 0);
  CHECK(table.find("cliques,quasiGHS,2,") != std::string::npos);
  CHECK(fs::exists(d / "eval/table1.csv.meta.json"));
  const Json report = read_json(d / "eval/eval_Y_000.json");
  CHECK(report["method"] == kMethodEstimatedDiag);
  CHECK(report["report"].contains("frob_error"));
  CHECK(report["report"].contains("roc"));
  CHECK(report["report"].contains("epsilon_n"));

  roc({d / "sim/truth.json", d / "fit/Y_000.fit.json", d / "roc.csv"});
  std::ifstream in(d / "roc.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "fpr,tpr");
  std::vector<std::pair<double, double>> curve;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    curve.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  CHECK(curve.size() == 200);
  for (std::size_t r = 1; r < curve.size(); ++r) {
    CHECK(curve[r].first <= curve[r - 1].first);
    CHECK(curve[r].second <= curve[r - 1].second);
  }

  const auto traces = diagnose({d / "fit/Y_000.fit.json", d / "diag"});
  CHECK(fs::exists(d / "diag/trace_chain0.csv"));
  CHECK(fs::exists(d / "diag/trace_chain1.csv"));
  const Json rhat = read_json(d / "diag/rhat.json");
  CHECK(rhat["chains"] == 2);
  CHECK(rhat["rhat"].contains("frobenius_norm"));
  CHECK(rhat["rhat"].contains("tau2"));
}

TEST_CASE("fit: known diagonal and missing files") {
  TempDir d;
  simulate(quick_sim(d / "sim", 1));
  FitConfig fc;
  fc.inputs = {d / "sim/Y_000.csv"};
  fc.out_dir = d / "fit";
  fc.options = quick_options();
  fc.options.known_diag = true;
  fc.write_samples = false;
  fit(fc);
  const Json j = read_json(d / "fit/Y_000.fit.json");
  CHECK(j["method"] == kMethodKnownDiag);
  CHECK(j["trace_reference"] == "zero-offdiag");
  CHECK(j["samples_path"].is_null());
  for (const auto& v : j["diag"]) CHECK(v.get<double>() == 1.0);

  FitConfig missing = fc;
  missing.inputs = {d / "nope.csv"};
  missing.out_dir = d / "fit2";
  CHECK_THROWS_AS(fit(missing), IoError);
}

TEST_CASE("check_prior and bench produce complete reports") {
  CheckPriorConfig cp;
  cp.spec.p = 100;
  cp.spec.a_n = 1e-3;
  cp.spec.E_n = 1.0;
  cp.spec.u = 0.5;
  cp.spec.c = 2.0;
  cp.spec.alpha = 1e-3 * 1e-3 / (100.0 * 100.0);
  const Json j = check_prior(cp);
  CHECK(j["passes_concentration"] == true);
  CHECK(j.contains("passes_thickness"));
  CHECK(j["mass_outside"].get<double>() <= j["mass_threshold"].get<double>());
  cp.spec.u = -1.0;
  CHECK_THROWS_AS(check_prior(cp), ValidationError);

  BenchConfig bc;
  bc.pattern.kind = PatternKind::Hubs;
  bc.pattern.p = 10;
  bc.n = 40;
  bc.options = quick_options();
  const Json b = bench(bc);
  CHECK(b["reference_minutes"] == 7.73);
  CHECK(b["wall_seconds"].get<double>() > 0.0);
  CHECK(std::isfinite(b["frob_error"].get<double>()));
}

TEST_CASE("cli: exit codes, config file and jobs") {
  TempDir d;
  const fs::path log = d / "log.txt";
  CHECK(run_cli("--version", log) == 0);
  CHECK(run_cli("simulate --pattern hubs --p 25 --out-dir " + (d / "bad").string(), log) == 2);
  CHECK(is_empty_dir(d / "bad"));
  CHECK(run_cli("simulate --pattern stars --out-dir " + (d / "bad").string(), log) == 2);
  CHECK(run_cli("simulate --bogus", log) == 2);
  CHECK(run_cli("", log) == 2);

  CHECK(run_cli("simulate --pattern cliques --p 10 --n 40 --out-dir " + (d / "sim").string(), log) == 0);
  CHECK(fs::exists(d / "sim/Y_000.csv"));
  CHECK(run_cli("simulate --pattern cliques --p 10 --n 40 --out-dir " + (d / "sim").string(), log) == 4);
  CHECK(run_cli("simulate --pattern cliques --p 10 --n 40 --force --out-dir " + (d / "sim").string(), log) == 0);

  write_text(d / "fit.ini", "[fit]\niters = 300\nburn-in = 100\nthin = 4\n");
  CHECK(run_cli("--config " + (d / "fit.ini").string() + " fit --input " + (d / "sim/Y_000.csv").string() +
                    " --out-dir " + (d / "fit").string(),
                log) == 0);
  CHECK(read_json(d / "fit/Y_000.fit.json")["retained_samples"] == 50);

  CHECK(run_cli("fit --input " + (d / "missing.csv").string() + " --out-dir " + (d / "fit2").string(), log) == 4);
  CHECK(run_cli("fit --input " + (d / "sim/Y_000.csv").string() + " --iters 10 --burn-in 20 --out-dir " +
                    (d / "fit3").string(),
                log) == 2);

  setenv("QGGM_JOBS", "1", 1);
  CHECK(run_cli("fit --iters 200 --burn-in 100 --input " + (d / "sim/Y_000.csv").string() + " --out-dir " +
                    (d / "fit4").string(),
                log) == 0);
  unsetenv("QGGM_JOBS");
  CHECK(read_json(d / "fit4/Y_000.fit.json")["config"]["options"]["jobs"] == 1);

  CHECK(run_cli("check-prior --alpha 1e-10 --a-n 1e-3 --E-n 1 --p 100 --u 0.5 --c 2", log) == 0);
  CHECK(read_text(log).find("passes_concentration") != std::string::npos);
}
