#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uq/effectiveness.hpp"
#include "uq/error.hpp"
#include "uq/methods.hpp"
#include "uq/provider.hpp"
#include "uq/response.hpp"
#include "uq/stability.hpp"

namespace uq {

enum ExitCode : int { kExitSuccess = 0, kExitPartial = 1, kExitFatal = 2 };

struct RunConfig {
  std::filesystem::path input;                  // responses JSONL
  std::optional<std::filesystem::path> scores;  // default <out_dir>/scores.csv
  std::optional<std::filesystem::path> eval;       // default <out_dir>/eval.csv
  std::optional<std::filesystem::path> stability;  // default <out_dir>/stability.csv
  std::vector<Method> methods;                  // empty: derived from `similarity`
  std::vector<SimilarityKind> similarity;       // empty with empty methods: jaccard
  std::optional<ProviderEndpoint> provider;
  std::optional<std::filesystem::path> precomputed_dir;
  std::optional<std::filesystem::path> cache_dir;  // UQ_CACHE_DIR still wins
  double dse_threshold = kDefaultDseThreshold;
  TieBreak tie;
  DeltaMode delta_mode = DeltaMode::kRelative;
  double epsilon = kChangeRatioEpsilon;
  PredictionRule prediction = PredictionRule::kMajority;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;

  std::filesystem::path scores_path() const;
  std::filesystem::path eval_path() const;
  std::filesystem::path stability_path() const;
  // Methods to run, in registry order. Throws ConfigError when a method
  // needs a similarity kind that `similarity` excludes.
  std::vector<Method> resolved_methods() const;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct CommandResult {
  int exit_code = kExitSuccess;
  std::vector<std::string> messages;  // diagnostics for stderr
  std::vector<std::filesystem::path> outputs;
};

// One per (item, method).
struct ScoreRow {
  std::string item_id;
  ConfigKey config;
  Method method = Method::kNumset;
  double uncertainty = 0.0;
  bool capped = false;
  std::vector<double> prefix;  // u_2..u_N
};

struct ComputeOutput {
  std::vector<ScoreRow> rows;
  std::vector<std::string> errors;
  std::set<SimilarityKind> failed_kinds;
  std::size_t capped = 0;
};

// Provider defaults to an HttpProvider built from cfg.provider when null.
ComputeOutput compute_scores(const std::vector<ResponseSet>& sets, const RunConfig& cfg,
                             Provider* provider = nullptr);

void write_scores(const std::filesystem::path& path, const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> read_scores(const std::filesystem::path& path);

struct EvalRow {
  ConfigKey config;
  Method method = Method::kNumset;
  EffectivenessResult result;
};

// Groups rows by configuration and method and joins them with the
// responses' predictions. Rows without a response land in `unmatched`.
std::map<std::pair<ConfigKey, Method>, std::vector<ScoredItem>> join_predictions(
    const std::vector<ScoreRow>& rows, const std::vector<ResponseSet>& sets, PredictionRule rule,
    std::vector<std::string>* unmatched = nullptr);

std::vector<EvalRow> evaluate_scores(const std::vector<ScoreRow>& rows,
                                     const std::vector<ResponseSet>& sets, PredictionRule rule,
                                     TieBreak tie, std::vector<std::string>* unmatched = nullptr);

struct StabilityRow {
  ConfigKey config;
  Method method = Method::kNumset;
  std::size_t items = 0;
  StabilityResult result;
};

std::vector<StabilityRow> stability_of(const std::vector<ScoreRow>& rows, DeltaMode mode,
                                       double eps);

std::map<ConfigKey, CorrelationMatrix> correlations_of(const std::vector<ScoreRow>& rows);
// Elementwise mean over configurations of each defined coefficient.
CorrelationMatrix mean_correlation(const std::map<ConfigKey, CorrelationMatrix>& per_config);

CommandResult run_compute(const RunConfig& cfg, Provider* provider = nullptr);
CommandResult run_eval(const RunConfig& cfg);
CommandResult run_stability(const RunConfig& cfg);
CommandResult run_correlate(const RunConfig& cfg);
CommandResult run_report(const RunConfig& cfg);

}  // namespace uq
