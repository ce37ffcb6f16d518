#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qggm/gibbs.hpp"
#include "qggm/io.hpp"
#include "qggm/lasso.hpp"
#include "qggm/metrics.hpp"
#include "qggm/simgen.hpp"
#include "qggm/symmetrize.hpp"

namespace qggm {

/// "0.1.0" or "0.1.0-g<describe>" when built from a git checkout.
std::string version();

/// Method tags as printed in result tables.
inline constexpr const char* kMethodKnownDiag = "quasiGHS-diag";
inline constexpr const char* kMethodEstimatedDiag = "quasiGHS";

// ---- in-memory fit ----------------------------------------------------------

struct FitOptions {
  GibbsConfig gibbs;
  /// Plug in ω_ii = 1 instead of estimating the diagonal.
  bool known_diag = false;
  SymmetrizeMode symmetrize = SymmetrizeMode::Auto;
  /// Credible level for edge selection.
  double level = 0.5;
  std::size_t folds = 5;
  std::size_t jobs = 1;
  /// Symmetrize every retained draw before summarizing (ROC experiments).
  bool per_sample_symmetrize = false;

  void validate() const;
};

struct FitOutcome {
  std::string method;
  std::vector<double> diag;
  std::optional<DiagonalEstimate> diag_estimate;
  MultiChainResult chains;
  SymmetrizeResult estimate;
  EdgeSelection selected;
  double wall_seconds = 0.0;
};

/// Diagonal estimation (unless known), Gibbs chains, symmetrized posterior
/// mean and credible-interval edge selection.
FitOutcome fit_data(const DenseMatrix& y, const FitOptions& options,
                    const std::optional<DenseMatrix>& reference = std::nullopt);

EvalReport evaluate_fit(const FitOutcome& fit, const GroundTruth& truth, std::size_t n,
                        std::span<const double> roc_levels);

// ---- file workflows ---------------------------------------------------------
//
// Each writes JSON carrying {"version", "command", "config"}; CSV outputs get a
// "<file>.meta.json" sidecar with the same header.

struct SimulateConfig {
  PatternSpec pattern;
  std::size_t n = 150;
  std::size_t reps = 1;
  std::filesystem::path out_dir;
  bool force = false;

  Json to_json() const;
};

/// Writes truth.json, Y_000.csv, Y_001.csv, ... and manifest.json. Replicate r
/// draws from seed + r. Everything is validated before the first write.
std::vector<std::filesystem::path> simulate(const SimulateConfig& config);

struct FitConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir;
  /// Optional truth.json whose Ω* becomes the Frobenius-trace reference.
  std::optional<std::filesystem::path> truth;
  FitOptions options;
  bool write_samples = true;

  Json to_json() const;
};

/// One "<stem>.fit.json" (plus ".timing.json" and ".samples.bin") per input.
std::vector<std::filesystem::path> fit(const FitConfig& config);

struct EvaluateConfig {
  std::filesystem::path truth;
  std::vector<std::filesystem::path> fits;
  /// Point estimates of other methods (CSV), tagged with external_method.
  std::vector<std::filesystem::path> external;
  std::string external_method = "external";
  std::filesystem::path out_dir;

  Json to_json() const;
};

/// table1.csv (pattern, method, frob mean/sd, tpr, fpr, wall time) and one
/// EvalReport JSON per fit or external estimate.
std::vector<std::filesystem::path> evaluate(const EvaluateConfig& config);

struct RocConfig {
  std::filesystem::path truth;
  std::filesystem::path fit;
  std::filesystem::path out;

  Json to_json() const;
};

/// Two-column CSV (fpr, tpr) over the default level grid, in level order.
std::filesystem::path roc(const RocConfig& config);

struct DiagnoseConfig {
  std::filesystem::path fit;
  std::filesystem::path out_dir;

  Json to_json() const;
};

/// trace_chain<k>.csv per chain and rhat.json.
std::vector<std::filesystem::path> diagnose(const DiagnoseConfig& config);

struct CheckPriorConfig {
  PriorConditionSpec spec;
  std::optional<std::filesystem::path> out;

  Json to_json() const;
};

Json check_prior(const CheckPriorConfig& config);

struct BenchConfig {
  PatternSpec pattern;
  std::size_t n = 150;
  FitOptions options;
  std::optional<std::filesystem::path> out;

  Json to_json() const;
};

/// Simulates one dataset and times fit_data end to end.
Json bench(const BenchConfig& config);

/// Loads truth.json written by simulate.
GroundTruth load_truth(const std::filesystem::path& path);

}  // namespace qggm
