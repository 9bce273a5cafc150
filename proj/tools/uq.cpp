// uq: uncertainty scores for repeated LLM gradings, and benchmarks over them.
//
//   uq compute   --input responses.jsonl --methods ce,mar --out-dir out
//   uq eval      --input responses.jsonl --out-dir out
//   uq stability --out-dir out
//   uq correlate --out-dir out
//   uq report    --input responses.jsonl --out-dir out
//   uq synth     --out synthetic.jsonl --items 500 --samples 5 --seed 42

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "uq/pipeline.hpp"
#include "uq/synthetic.hpp"

namespace {

struct Options {
  std::string input;
  std::string scores;
  std::string eval;
  std::string stability;
  std::vector<std::string> methods;
  std::vector<std::string> similarity;
  std::string provider_url;
  std::string provider_model = "unspecified";
  int provider_timeout_ms = 30000;
  int provider_batch = 32;
  int provider_parallel = 4;
  int provider_retries = 3;
  std::string precomputed_dir;
  std::string cache_dir;
  double dse_threshold = uq::kDefaultDseThreshold;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string tie_break = "item_id";
  std::string delta_mode = "relative";
  double epsilon = uq::kChangeRatioEpsilon;
  std::string prediction = "majority";
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Responses JSONL");
  cmd->add_option("--scores", o.scores, "Scores CSV (default <out-dir>/scores.csv)");
  cmd->add_option("--eval", o.eval, "Effectiveness CSV (default <out-dir>/eval.csv)");
  cmd->add_option("--stability", o.stability, "Stability CSV (default <out-dir>/stability.csv)");
  cmd->add_option("--methods", o.methods, "Comma-separated method ids")->delimiter(',');
  cmd->add_option("--similarity", o.similarity, "Similarity kinds: jaccard,embed,nli")
      ->delimiter(',');
  cmd->add_option("--provider-url", o.provider_url, "Base URL of the /embed and /nli service");
  cmd->add_option("--provider-model", o.provider_model,
                  "Model id behind the provider, recorded in cache keys and metadata");
  cmd->add_option("--provider-timeout-ms", o.provider_timeout_ms);
  cmd->add_option("--provider-batch", o.provider_batch);
  cmd->add_option("--provider-parallel", o.provider_parallel);
  cmd->add_option("--provider-retries", o.provider_retries);
  cmd->add_option("--precomputed-dir", o.precomputed_dir, "Directory of similarity matrix JSON");
  cmd->add_option("--cache-dir", o.cache_dir, "Provider cache (UQ_CACHE_DIR overrides)");
  cmd->add_option("--dse-threshold", o.dse_threshold, "Bidirectional entailment cutoff");
  cmd->add_option("--out-dir", o.out_dir);
  cmd->add_option("--seed", o.seed, "Seed for --tie-break random");
  cmd->add_option("--tie-break", o.tie_break, "Rejection-curve tie order")
      ->check(CLI::IsMember({"item_id", "random"}));
  cmd->add_option("--delta-mode", o.delta_mode)->check(CLI::IsMember({"relative", "absolute"}));
  cmd->add_option("--epsilon", o.epsilon, "Change-ratio denominator offset");
  cmd->add_option("--prediction", o.prediction, "Grade used as the prediction")
      ->check(CLI::IsMember({"majority", "first"}));
}

uq::RunConfig to_config(const Options& o) {
  uq::RunConfig cfg;
  cfg.input = o.input;
  if (!o.scores.empty()) cfg.scores = o.scores;
  if (!o.eval.empty()) cfg.eval = o.eval;
  if (!o.stability.empty()) cfg.stability = o.stability;
  for (const auto& m : o.methods) {
    auto id = uq::method_from_string(m);
    if (!id) throw uq::ConfigError("unknown method \"" + m + "\"");
    cfg.methods.push_back(*id);
  }
  for (const auto& s : o.similarity) {
    auto k = uq::similarity_kind_from_string(s);
    if (!k) throw uq::ConfigError("unknown similarity kind \"" + s + "\"");
    cfg.similarity.push_back(*k);
  }
  if (!o.provider_url.empty()) {
    uq::ProviderEndpoint ep;
    ep.base_url = o.provider_url;
    ep.model_id = o.provider_model;
    ep.timeout_ms = o.provider_timeout_ms;
    ep.max_batch = o.provider_batch;
    ep.max_parallel = o.provider_parallel;
    ep.max_retries = o.provider_retries;
    cfg.provider = ep;
  }
  if (!o.precomputed_dir.empty()) cfg.precomputed_dir = o.precomputed_dir;
  if (!o.cache_dir.empty()) cfg.cache_dir = o.cache_dir;
  cfg.dse_threshold = o.dse_threshold;
  cfg.out_dir = o.out_dir;
  cfg.seed = o.seed;
  cfg.tie.seed = o.seed;
  cfg.tie.mode = o.tie_break == "random" ? uq::TieBreak::Mode::kRandom : uq::TieBreak::Mode::kItemId;
  cfg.delta_mode = o.delta_mode == "absolute" ? uq::DeltaMode::kAbsolute : uq::DeltaMode::kRelative;
  cfg.epsilon = o.epsilon;
  cfg.prediction =
      o.prediction == "first" ? uq::PredictionRule::kFirstSample : uq::PredictionRule::kMajority;
  return cfg;
}

int write_synthetic(const std::string& path, const uq::SyntheticOptions& opt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    spdlog::error("cannot write {}", path);
    return uq::kExitFatal;
  }
  for (const auto& item : uq::synthetic_corpus(opt)) out << uq::to_json(item.set).dump() << '\n';
  return out ? uq::kExitSuccess : uq::kExitFatal;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("uq"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Uncertainty quantification for repeated LLM gradings"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose);

  Options o;
  auto* compute = app.add_subcommand("compute", "Per-item uncertainty scores");
  auto* eval = app.add_subcommand("eval", "AUROC, C-index, AUARC, AUERC per configuration");
  auto* stability = app.add_subcommand("stability", "Change ratio and stepwise Spearman");
  auto* correlate = app.add_subcommand("correlate", "Pearson correlation between methods");
  auto* report = app.add_subcommand("report", "Rank tables, heatmap and plots");
  for (auto* cmd : {compute, eval, stability, correlate, report}) add_common(cmd, o);

  std::string synth_out = "synthetic.jsonl";
  uq::SyntheticOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic responses file");
  synth->add_option("--out", synth_out);
  synth->add_option("--items", synth_opt.items);
  synth->add_option("--samples", synth_opt.samples);
  synth->add_option("--seed", synth_opt.seed);
  synth->add_option("--configs", synth_opt.configs);
  synth->add_option("--q-min", synth_opt.q_min);
  synth->add_option("--q-max", synth_opt.q_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return uq::kExitFatal;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  if (synth->parsed()) return write_synthetic(synth_out, synth_opt);

  uq::RunConfig cfg;
  try {
    cfg = to_config(o);
  } catch (const uq::Error& e) {
    spdlog::error("{}", e.what());
    return uq::kExitFatal;
  }

  uq::CommandResult res;
  if (compute->parsed()) {
    res = uq::run_compute(cfg);
  } else if (eval->parsed()) {
    res = uq::run_eval(cfg);
  } else if (stability->parsed()) {
    res = uq::run_stability(cfg);
  } else if (correlate->parsed()) {
    res = uq::run_correlate(cfg);
  } else {
    res = uq::run_report(cfg);
  }
  for (const auto& p : res.outputs) std::cout << p.generic_string() << '\n';
  return res.exit_code;
}
