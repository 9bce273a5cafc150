#include "uq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "uq/csv.hpp"
#include "uq/error.hpp"
#include "uq/svg.hpp"

namespace uq {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path RunConfig::scores_path() const { return scores ? *scores : out_dir / "scores.csv"; }
fs::path RunConfig::eval_path() const { return eval ? *eval : out_dir / "eval.csv"; }
fs::path RunConfig::stability_path() const {
  return stability ? *stability : out_dir / "stability.csv";
}

std::vector<Method> RunConfig::resolved_methods() const {
  auto allowed = [&](SimilarityKind k) {
    return similarity.empty() ||
           std::find(similarity.begin(), similarity.end(), k) != similarity.end();
  };

  std::vector<Method> out;
  if (methods.empty()) {
    std::vector<SimilarityKind> kinds = similarity;
    if (kinds.empty()) kinds.push_back(SimilarityKind::kJaccard);
    for (const auto& mi : all_methods()) {
      if (!mi.kind || std::find(kinds.begin(), kinds.end(), *mi.kind) != kinds.end()) {
        out.push_back(mi.id);
      }
    }
    return out;
  }
  for (const auto& mi : all_methods()) {
    if (std::find(methods.begin(), methods.end(), mi.id) == methods.end()) continue;
    if (mi.kind && !allowed(*mi.kind)) {
      throw ConfigError(fmt::format("method {} needs similarity kind {}, which --similarity excludes",
                                    mi.name, to_string(*mi.kind)));
    }
    out.push_back(mi.id);
  }
  return out;
}

namespace {

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < workers; ++t) threads.emplace_back(body);
  body();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<fs::path> default_cache_dir() {
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return fs::path(xdg) / "uq";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return fs::path(home) / ".cache" / "uq";
  }
  return std::nullopt;
}

std::string file_stem(const ConfigKey& c) {
  std::string s = c.label();
  for (char& ch : s) {
    const bool keep = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                      (ch >= '0' && ch <= '9') || ch == '-' || ch == '_' || ch == '.';
    if (!keep) ch = '_';
  }
  return s;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

std::string methods_needing(SimilarityKind k, const std::vector<Method>& methods) {
  std::string out;
  for (Method m : methods) {
    if (info(m).kind == k) {
      if (!out.empty()) out += ",";
      out += to_string(m);
    }
  }
  return out;
}

ConfigKey config_from_row(const csv::Table& t, const std::vector<std::string>& row,
                          std::size_t line) {
  ConfigKey c;
  c.model = row[t.require("model")];
  c.question = row[t.require("question")];
  const auto& s = row[t.require("strategy")];
  auto strategy = strategy_from_string(s);
  if (!strategy) throw ParseError(line, "unknown strategy \"" + s + "\"");
  c.strategy = *strategy;
  return c;
}

Method method_from_row(const csv::Table& t, const std::vector<std::string>& row,
                       std::size_t line) {
  const auto& name = row[t.require("method")];
  auto m = method_from_string(name);
  if (!m) throw ParseError(line, "unknown method \"" + name + "\"");
  return *m;
}

std::vector<std::string> config_fields(const ConfigKey& c) {
  return {c.model, c.question, std::string(to_string(c.strategy))};
}

// Reorders a matrix from name order into registry order.
CorrelationMatrix in_registry_order(const CorrelationMatrix& cm) {
  std::vector<std::size_t> order;
  for (const auto& mi : all_methods()) {
    auto it = std::find(cm.methods.begin(), cm.methods.end(), mi.name);
    if (it != cm.methods.end()) order.push_back(static_cast<std::size_t>(it - cm.methods.begin()));
  }
  CorrelationMatrix out;
  for (std::size_t a : order) {
    out.methods.push_back(cm.methods[a]);
    std::vector<std::optional<double>> row;
    for (std::size_t b : order) row.push_back(cm.r[a][b]);
    out.r.push_back(std::move(row));
  }
  return out;
}

std::string timestamp() {
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                  std::chrono::system_clock::now())));
}

json conventions(const RunConfig& cfg) {
  return {
      {"log_base", "e"},
      {"invalid_label", "own category"},
      {"spectral_epsilon", kSpectralEpsilon},
      {"eigen_cap", 1.0 / kSpectralEpsilon},
      {"dse_threshold", cfg.dse_threshold},
      {"dse_rule", "p(a->b) > t and p(b->a) > t, transitive closure"},
      {"graph_distance", "1 - similarity"},
      {"change_ratio_epsilon", cfg.epsilon},
      {"delta_mode", cfg.delta_mode == DeltaMode::kRelative ? "relative" : "absolute"},
      {"spearman", "across items, consecutive prefixes, average ranks"},
      {"prediction", cfg.prediction == PredictionRule::kMajority ? "majority" : "first_sample"},
      {"majority_ties", "lowest label"},
      {"auroc_ties", "half credit"},
      {"rejection_grid", "j/m for j = 0..m-1, normalized trapezoid"},
      {"tie_break", cfg.tie.mode == TieBreak::Mode::kItemId ? "item_id" : "random"},
      {"seed", cfg.tie.seed},
      {"rank_ties", "average"},
  };
}

void write_metadata(const RunConfig& cfg, const std::string& command, json extra,
                    CommandResult& res) {
  json meta = {{"command", command},
               {"timestamp", timestamp()},
               {"schema_version", std::string(kSchemaVersion)},
               {"conventions", conventions(cfg)},
               {"exit_code", res.exit_code},
               {"messages", res.messages}};
  if (cfg.provider) {
    meta["provider"] = {{"url", cfg.provider->base_url}, {"model_id", cfg.provider->model_id}};
  } else {
    meta["provider"] = nullptr;
  }
  json outputs = json::array();
  for (const auto& p : res.outputs) outputs.push_back(p.generic_string());
  meta["outputs"] = outputs;
  for (auto& [k, v] : extra.items()) meta[k] = v;
  const fs::path path = cfg.out_dir / (command + "_metadata.json");
  write_text(path, meta.dump(2) + "\n");
  res.outputs.push_back(path);
}

template <typename F>
CommandResult guarded(const char* command, F&& body) {
  CommandResult res;
  try {
    body(res);
  } catch (const csv::MissingColumn& e) {
    res.exit_code = kExitFatal;
    res.messages.push_back(fmt::format("{}: {}", command, e.what()));
  } catch (const std::exception& e) {
    res.exit_code = kExitFatal;
    res.messages.push_back(fmt::format("{}: {}", command, e.what()));
  }
  for (const auto& m : res.messages) {
    if (res.exit_code == kExitFatal) {
      spdlog::error("{}", m);
    } else {
      spdlog::warn("{}", m);
    }
  }
  return res;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.dse_threshold >= 0.0 && cfg.dse_threshold <= 1.0)) {
    throw ConfigError("--dse-threshold must lie in [0, 1]");
  }
  if (!(cfg.epsilon > 0.0)) throw ConfigError("change-ratio epsilon must be positive");
  if (cfg.provider) cfg.provider->validate();
}

ResponseCorpus load_corpus(const RunConfig& cfg, CommandResult& res) {
  if (cfg.input.empty()) throw ConfigError("--input is required");
  auto corpus = parse_response_file(cfg.input);
  for (const auto& r : corpus.rejects) {
    res.messages.push_back(fmt::format("{}:{}: rejected record {}: {}", cfg.input.string(), r.line,
                                       r.item_id.empty() ? "(no id)" : r.item_id, r.reason));
  }
  if (!corpus.rejects.empty()) res.exit_code = kExitPartial;
  return corpus;
}

json rejects_json(const ResponseCorpus& corpus) {
  json out = json::array();
  for (const auto& r : corpus.rejects) {
    out.push_back({{"line", r.line}, {"item_id", r.item_id}, {"reason", r.reason}});
  }
  return out;
}

}  // namespace

ComputeOutput compute_scores(const std::vector<ResponseSet>& sets, const RunConfig& cfg,
                             Provider* provider) {
  ComputeOutput out;
  const auto methods = cfg.resolved_methods();
  std::set<SimilarityKind> kinds;
  for (Method m : methods) {
    if (auto k = info(m).kind) kinds.insert(*k);
  }

  std::map<std::pair<std::string, SimilarityKind>, std::vector<PrecomputedMatrix>> precomputed;
  if (cfg.precomputed_dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(*cfg.precomputed_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto pm = load_precomputed(f);
      precomputed[{pm.item_id, pm.matrix.kind()}].push_back(std::move(pm));
    }
  }
  auto lookup = [&](const ResponseSet& rs, SimilarityKind k) -> const SimilarityMatrix* {
    auto it = precomputed.find({rs.item_id, k});
    if (it == precomputed.end()) return nullptr;
    for (const auto& pm : it->second) {
      if (!pm.config || *pm.config == rs.config) return &pm.matrix;
    }
    return nullptr;
  };

  std::unique_ptr<HttpProvider> owned;
  if (provider == nullptr && cfg.provider) {
    owned = std::make_unique<HttpProvider>(*cfg.provider);
    provider = owned.get();
  }
  std::unique_ptr<SimilarityCache> cache;
  std::unique_ptr<CachedProvider> cached;
  if (provider != nullptr && (kinds.count(SimilarityKind::kEmbed) || kinds.count(SimilarityKind::kNli))) {
    auto dir = cfg.cache_dir ? cfg.cache_dir : default_cache_dir();
    // from_env returns a prvalue; make_unique would need a move constructor.
    cache.reset(new SimilarityCache(SimilarityCache::from_env(dir)));
    cached = std::make_unique<CachedProvider>(*provider, *cache);
  }

  std::vector<ItemEvidence> evidence(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) evidence[i].scores = sets[i].scores();

  for (SimilarityKind kind : kinds) {
    const std::string who = methods_needing(kind, methods);
    std::vector<std::size_t> to_build;
    bool broken = false;
    for (std::size_t i = 0; i < sets.size() && !broken; ++i) {
      if (const auto* m = lookup(sets[i], kind)) {
        if (m->n() != sets[i].size()) {
          out.errors.push_back(fmt::format(
              "precomputed {} matrix for item {} is {}x{} but the item has {} samples",
              to_string(kind), sets[i].item_id, m->n(), m->n(), sets[i].size()));
          broken = true;
        } else {
          evidence[i].set_matrix(*m);
        }
      } else {
        to_build.push_back(i);
      }
    }
    if (!broken && kind != SimilarityKind::kJaccard && !to_build.empty() && !cached) {
      out.errors.push_back(fmt::format(
          "similarity kind {} (needed by {}) has no source for {} item(s), first {}: "
          "pass --provider-url or a --precomputed-dir holding their matrices",
          to_string(kind), who, to_build.size(), sets[to_build.front()].item_id));
      broken = true;
    }
    if (!broken && !to_build.empty()) {
      try {
        if (kind != SimilarityKind::kJaccard) {
          std::vector<ResponseSet> subset;
          subset.reserve(to_build.size());
          for (std::size_t i : to_build) subset.push_back(sets[i]);
          prefetch(subset, kind, *cached);
        }
        std::vector<std::optional<SimilarityMatrix>> built(to_build.size());
        parallel_for(to_build.size(), [&](std::size_t j) {
          built[j] = build_matrix(sets[to_build[j]], kind, cached.get());
        });
        for (std::size_t j = 0; j < to_build.size(); ++j) {
          evidence[to_build[j]].set_matrix(std::move(*built[j]));
        }
      } catch (const ProviderError& e) {
        out.errors.push_back(fmt::format("similarity kind {} (needed by {}) aborted: {}",
                                         to_string(kind), who, e.what()));
        broken = true;
      }
    }
    if (broken) out.failed_kinds.insert(kind);
  }

  std::vector<Method> runnable;
  for (Method m : methods) {
    auto k = info(m).kind;
    if (!k || !out.failed_kinds.count(*k)) runnable.push_back(m);
  }

  std::vector<std::vector<ScoreRow>> per_item(sets.size());
  parallel_for(sets.size(), [&](std::size_t i) {
    const auto& rs = sets[i];
    for (Method m : runnable) {
      ScoreRow row;
      row.item_id = rs.item_id;
      row.config = rs.config;
      row.method = m;
      const auto full = evaluate_method(m, evidence[i], 0, cfg.dse_threshold);
      row.uncertainty = full.value;
      row.capped = full.capped;
      row.prefix = prefix_uncertainties(evidence[i], m, rs.item_id, cfg.dse_threshold).values;
      per_item[i].push_back(std::move(row));
    }
  });
  for (auto& rows : per_item) {
    for (auto& r : rows) {
      out.capped += r.capped ? 1 : 0;
      out.rows.push_back(std::move(r));
    }
  }
  return out;
}

void write_scores(const fs::path& path, const std::vector<ScoreRow>& rows) {
  std::size_t max_n = 2;
  for (const auto& r : rows) max_n = std::max(max_n, r.prefix.size() + 1);
  std::vector<std::string> header{"item_id", "model",  "question",   "strategy",
                                  "method",  "uncertainty"};
  for (std::size_t k = 2; k <= max_n; ++k) header.push_back(fmt::format("u_{}", k));

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  csv::Writer w(path);
  w.row(header);
  for (const auto& r : rows) {
    std::vector<std::string> f{r.item_id};
    for (auto& c : config_fields(r.config)) f.push_back(std::move(c));
    f.emplace_back(to_string(r.method));
    f.push_back(csv::number(r.uncertainty));
    for (std::size_t k = 2; k <= max_n; ++k) {
      f.push_back(k - 2 < r.prefix.size() ? csv::number(r.prefix[k - 2]) : std::string());
    }
    w.row(f);
  }
  w.save();
}

std::vector<ScoreRow> read_scores(const fs::path& path) {
  const auto t = csv::Table::read(path);
  const auto c_item = t.require("item_id");
  const auto c_u = t.require("uncertainty");
  t.require("model");
  t.require("question");
  t.require("strategy");
  t.require("method");

  std::vector<std::pair<std::size_t, std::size_t>> prefix_cols;  // (k, column)
  for (std::size_t c = 0; c < t.header().size(); ++c) {
    const auto& h = t.header()[c];
    if (h.size() > 2 && h.compare(0, 2, "u_") == 0) {
      try {
        prefix_cols.emplace_back(std::stoul(h.substr(2)), c);
      } catch (const std::exception&) {
        throw ParseError(1, "bad prefix column \"" + h + "\"");
      }
    }
  }
  std::sort(prefix_cols.begin(), prefix_cols.end());

  std::vector<ScoreRow> rows;
  rows.reserve(t.rows().size());
  std::size_t line = 1;
  for (const auto& row : t.rows()) {
    ++line;
    ScoreRow r;
    r.item_id = row[c_item];
    r.config = config_from_row(t, row, line);
    r.method = method_from_row(t, row, line);
    auto u = csv::parse_number(row[c_u]);
    if (!u) throw ParseError(line, "uncertainty is not a number");
    r.uncertainty = *u;
    for (auto [k, c] : prefix_cols) {
      auto v = csv::parse_number(row[c]);
      if (!v) break;
      r.prefix.push_back(*v);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::map<std::pair<ConfigKey, Method>, std::vector<ScoredItem>> join_predictions(
    const std::vector<ScoreRow>& rows, const std::vector<ResponseSet>& sets, PredictionRule rule,
    std::vector<std::string>* unmatched) {
  std::map<std::pair<ConfigKey, std::string>, Prediction> preds;
  for (const auto& rs : sets) preds.try_emplace({rs.config, rs.item_id}, predict(rs, rule));

  std::map<std::pair<ConfigKey, Method>, std::vector<ScoredItem>> out;
  std::set<std::pair<ConfigKey, std::string>> missing;
  for (const auto& r : rows) {
    auto it = preds.find({r.config, r.item_id});
    if (it == preds.end()) {
      if (missing.insert({r.config, r.item_id}).second && unmatched) {
        unmatched->push_back(r.config.label() + " " + r.item_id);
      }
      continue;
    }
    out[{r.config, r.method}].push_back(
        {r.item_id, r.uncertainty, it->second.correct, it->second.abs_error});
  }
  return out;
}

std::vector<EvalRow> evaluate_scores(const std::vector<ScoreRow>& rows,
                                     const std::vector<ResponseSet>& sets, PredictionRule rule,
                                     TieBreak tie, std::vector<std::string>* unmatched) {
  const auto groups = join_predictions(rows, sets, rule, unmatched);
  std::vector<EvalRow> out;
  for (const auto& [key, items] : groups) {
    out.push_back({key.first, key.second, evaluate_effectiveness(items, tie)});
  }
  return out;
}

std::vector<StabilityRow> stability_of(const std::vector<ScoreRow>& rows, DeltaMode mode,
                                       double eps) {
  std::map<std::pair<ConfigKey, Method>, std::vector<PrefixSeries>> groups;
  for (const auto& r : rows) {
    groups[{r.config, r.method}].push_back(
        {r.item_id, std::string(to_string(r.method)), r.prefix});
  }
  std::vector<StabilityRow> out;
  for (const auto& [key, series] : groups) {
    out.push_back({key.first, key.second, series.size(), evaluate_stability(series, mode, eps)});
  }
  return out;
}

std::map<ConfigKey, CorrelationMatrix> correlations_of(const std::vector<ScoreRow>& rows) {
  struct Group {
    std::map<std::string, std::size_t> item_index;
    std::map<std::string, std::map<std::size_t, double>> values;  // method -> item -> u
  };
  std::map<ConfigKey, Group> groups;
  for (const auto& r : rows) {
    auto& g = groups[r.config];
    const auto idx = g.item_index.try_emplace(r.item_id, g.item_index.size()).first->second;
    g.values[std::string(to_string(r.method))][idx] = r.uncertainty;
  }
  std::map<ConfigKey, CorrelationMatrix> out;
  for (const auto& [config, g] : groups) {
    std::map<std::string, std::vector<std::optional<double>>> columns;
    for (const auto& [method, vals] : g.values) {
      std::vector<std::optional<double>> col(g.item_index.size());
      for (const auto& [i, v] : vals) col[i] = v;
      columns[method] = std::move(col);
    }
    out[config] = in_registry_order(pearson_matrix(columns));
  }
  return out;
}

CorrelationMatrix mean_correlation(const std::map<ConfigKey, CorrelationMatrix>& per_config) {
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> sums;
  std::set<std::string> names;
  for (const auto& [config, cm] : per_config) {
    for (std::size_t a = 0; a < cm.methods.size(); ++a) {
      names.insert(cm.methods[a]);
      for (std::size_t b = 0; b < cm.methods.size(); ++b) {
        if (!cm.r[a][b]) continue;
        auto& s = sums[{cm.methods[a], cm.methods[b]}];
        s.first += *cm.r[a][b];
        ++s.second;
      }
    }
  }
  CorrelationMatrix out;
  for (const auto& mi : all_methods()) {
    if (names.count(std::string(mi.name))) out.methods.emplace_back(mi.name);
  }
  for (const auto& a : out.methods) {
    std::vector<std::optional<double>> row;
    for (const auto& b : out.methods) {
      auto it = sums.find({a, b});
      if (it == sums.end()) {
        row.push_back(std::nullopt);
      } else {
        row.push_back(it->second.first / static_cast<double>(it->second.second));
      }
    }
    out.r.push_back(std::move(row));
  }
  return out;
}

CommandResult run_compute(const RunConfig& cfg, Provider* provider) {
  return guarded("compute", [&](CommandResult& res) {
    validate(cfg);
    cfg.resolved_methods();
    auto corpus = load_corpus(cfg, res);
    auto out = compute_scores(corpus.sets, cfg, provider);
    for (const auto& e : out.errors) res.messages.push_back(e);
    if (!out.errors.empty()) res.exit_code = kExitFatal;

    const auto path = cfg.scores_path();
    write_scores(path, out.rows);
    res.outputs.push_back(path);

    json failed = json::array();
    for (auto k : out.failed_kinds) failed.push_back(std::string(to_string(k)));
    json methods = json::array();
    for (Method m : cfg.resolved_methods()) methods.push_back(std::string(to_string(m)));
    write_metadata(cfg, "compute",
                   {{"input", cfg.input.generic_string()},
                    {"methods", methods},
                    {"items", corpus.sets.size()},
                    {"rows", out.rows.size()},
                    {"capped", out.capped},
                    {"failed_kinds", failed},
                    {"rejects", rejects_json(corpus)}},
                   res);
  });
}

CommandResult run_eval(const RunConfig& cfg) {
  return guarded("eval", [&](CommandResult& res) {
    validate(cfg);
    auto rows = read_scores(cfg.scores_path());
    auto corpus = load_corpus(cfg, res);
    std::vector<std::string> unmatched;
    auto results = evaluate_scores(rows, corpus.sets, cfg.prediction, cfg.tie, &unmatched);
    for (const auto& u : unmatched) res.messages.push_back("unmatched item_id: " + u);
    if (!unmatched.empty() && res.exit_code == kExitSuccess) res.exit_code = kExitPartial;

    const auto path = cfg.eval_path();
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    csv::Writer w(path);
    w.row({"model", "question", "strategy", "method", "m", "auroc", "c_index", "auarc", "auerc"});
    for (const auto& r : results) {
      auto f = config_fields(r.config);
      f.emplace_back(to_string(r.method));
      f.push_back(std::to_string(r.result.m));
      f.push_back(csv::number(r.result.auroc));
      f.push_back(csv::number(r.result.c_index));
      f.push_back(csv::number(r.result.auarc));
      f.push_back(csv::number(r.result.auerc));
      w.row(f);
    }
    w.save();
    res.outputs.push_back(path);
    write_metadata(cfg, "eval",
                   {{"input", cfg.input.generic_string()},
                    {"scores", cfg.scores_path().generic_string()},
                    {"unmatched", unmatched},
                    {"rejects", rejects_json(corpus)}},
                   res);
  });
}

CommandResult run_stability(const RunConfig& cfg) {
  return guarded("stability", [&](CommandResult& res) {
    validate(cfg);
    auto rows = read_scores(cfg.scores_path());
    const auto path = cfg.stability_path();
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    csv::Writer w(path);
    w.row({"model", "question", "strategy", "method", "items", "delta", "spearmanr"});
    for (const auto& r : stability_of(rows, cfg.delta_mode, cfg.epsilon)) {
      auto f = config_fields(r.config);
      f.emplace_back(to_string(r.method));
      f.push_back(std::to_string(r.items));
      f.push_back(csv::number(r.result.delta));
      f.push_back(csv::number(r.result.spearmanr));
      w.row(f);
    }
    w.save();
    res.outputs.push_back(path);
    write_metadata(cfg, "stability", {{"scores", cfg.scores_path().generic_string()}}, res);
  });
}

CommandResult run_correlate(const RunConfig& cfg) {
  return guarded("correlate", [&](CommandResult& res) {
    auto rows = read_scores(cfg.scores_path());
    const auto path = cfg.out_dir / "correlation.csv";
    fs::create_directories(cfg.out_dir);
    csv::Writer w(path);
    w.row({"model", "question", "strategy", "method_a", "method_b", "r"});
    for (const auto& [config, cm] : correlations_of(rows)) {
      for (std::size_t a = 0; a < cm.methods.size(); ++a) {
        for (std::size_t b = 0; b < cm.methods.size(); ++b) {
          auto f = config_fields(config);
          f.push_back(cm.methods[a]);
          f.push_back(cm.methods[b]);
          f.push_back(csv::number(cm.r[a][b]));
          w.row(f);
        }
      }
    }
    w.save();
    res.outputs.push_back(path);
    write_metadata(cfg, "correlate", {{"scores", cfg.scores_path().generic_string()}}, res);
  });
}

namespace {

const std::vector<std::string> kEffectivenessMetrics{"auroc", "c_index", "auarc", "auerc"};
const std::vector<std::string> kStabilityMetrics{"delta", "spearmanr"};

std::string display_of(const std::string& method) {
  auto m = method_from_string(method);
  return m ? std::string(info(*m).display) : method;
}

// Method names in registry order, unknown names last in name order.
std::vector<std::string> ordered_methods(const std::set<std::string>& present) {
  std::vector<std::string> out;
  for (const auto& mi : all_methods()) {
    if (present.count(std::string(mi.name))) out.emplace_back(mi.name);
  }
  for (const auto& p : present) {
    if (!method_from_string(p)) out.push_back(p);
  }
  return out;
}

struct MetricTable {
  std::vector<RankEntry> entries;
  std::map<std::string, ConfigKey> configs;  // label -> key
  std::set<std::string> methods;
};

MetricTable read_metric_table(const fs::path& path, const std::vector<std::string>& metrics) {
  const auto t = csv::Table::read(path);
  std::vector<std::size_t> cols;
  for (const auto& m : metrics) cols.push_back(t.require(m));
  t.require("method");
  MetricTable out;
  std::size_t line = 1;
  for (const auto& row : t.rows()) {
    ++line;
    const ConfigKey c = config_from_row(t, row, line);
    const std::string method = row[t.require("method")];
    out.configs[c.label()] = c;
    out.methods.insert(method);
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      out.entries.push_back({c.label(), metrics[i], method, csv::parse_number(row[cols[i]])});
    }
  }
  return out;
}

void write_rank_table(const fs::path& path, const RankTable& ranks,
                      const std::vector<std::string>& metrics,
                      const std::vector<std::string>& methods) {
  csv::Writer w(path);
  std::vector<std::string> header{"method", "display"};
  header.insert(header.end(), metrics.begin(), metrics.end());
  w.row(header);
  for (const auto& m : methods) {
    std::vector<std::string> f{m, display_of(m)};
    for (const auto& metric : metrics) {
      std::optional<double> v;
      if (auto it = ranks.aggregate.find(metric); it != ranks.aggregate.end()) {
        if (auto jt = it->second.find(m); jt != it->second.end()) v = jt->second;
      }
      f.push_back(csv::number(v));
    }
    w.row(f);
  }
  w.save();
}

std::string factor_value(const ConfigKey& c, const std::string& factor) {
  if (factor == "model") return c.model;
  if (factor == "question") return c.question;
  return std::string(to_string(c.strategy));
}

// One box per method over the factor's levels; each sample is the method's
// mean rank across the family's metrics in configurations at that level.
std::vector<svg::BoxGroup> rank_boxes(const MetricTable& table, const RankTable& ranks,
                                      const std::vector<std::string>& metrics,
                                      const std::string& factor) {
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> acc;
  for (const auto& [key, by_method] : ranks.per_config) {
    if (std::find(metrics.begin(), metrics.end(), key.second) == metrics.end()) continue;
    const auto level = factor_value(table.configs.at(key.first), factor);
    for (const auto& [method, rank] : by_method) {
      auto& s = acc[method][level];
      s.first += rank;
      ++s.second;
    }
  }
  std::vector<svg::BoxGroup> out;
  for (const auto& m : ordered_methods(table.methods)) {
    svg::BoxGroup g{display_of(m), {}};
    if (auto it = acc.find(m); it != acc.end()) {
      for (const auto& [level, s] : it->second) {
        g.values.push_back(s.first / static_cast<double>(s.second));
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

CommandResult run_report(const RunConfig& cfg) {
  return guarded("report", [&](CommandResult& res) {
    validate(cfg);
    const fs::path dir = cfg.out_dir / "report";
    fs::create_directories(dir);

    std::map<std::string, std::vector<std::string>> families{
        {"effectiveness", kEffectivenessMetrics}};
    std::map<std::string, fs::path> sources{{"effectiveness", cfg.eval_path()}};
    if (fs::exists(cfg.stability_path())) {
      families["stability"] = kStabilityMetrics;
      sources["stability"] = cfg.stability_path();
    } else {
      res.messages.push_back("no " + cfg.stability_path().string() +
                             "; skipping stability ranks");
    }

    std::vector<std::vector<std::string>> by_config_rows;
    for (const auto& [family, metrics] : families) {
      const auto table = read_metric_table(sources.at(family), metrics);
      const auto ranks = aggregate_ranks(table.entries);
      const auto methods = ordered_methods(table.methods);

      const auto rank_path = dir / ("rank_" + family + ".csv");
      write_rank_table(rank_path, ranks, metrics, methods);
      res.outputs.push_back(rank_path);

      for (const auto& [key, by_method] : ranks.per_config) {
        const auto& c = table.configs.at(key.first);
        for (const auto& m : methods) {
          auto it = by_method.find(m);
          if (it == by_method.end()) continue;
          auto f = config_fields(c);
          f.push_back(key.second);
          f.push_back(m);
          f.push_back(csv::number(it->second));
          by_config_rows.push_back(std::move(f));
        }
      }

      for (const std::string factor : {"model", "question", "strategy"}) {
        const auto path = dir / fmt::format("box_{}_{}.svg", family, factor);
        write_text(path, svg::box_plot(fmt::format("{} ranks by {}", family, factor), "mean rank",
                                       rank_boxes(table, ranks, metrics, factor)));
        res.outputs.push_back(path);
      }
    }
    {
      const auto path = dir / "ranks_by_config.csv";
      csv::Writer w(path);
      w.row({"model", "question", "strategy", "metric", "method", "rank"});
      for (const auto& r : by_config_rows) w.row(r);
      w.save();
      res.outputs.push_back(path);
    }

    if (!fs::exists(cfg.scores_path())) {
      res.messages.push_back("no " + cfg.scores_path().string() +
                             "; skipping correlation heatmap and curves");
    } else {
      const auto rows = read_scores(cfg.scores_path());
      const auto mean = mean_correlation(correlations_of(rows));

      const auto heat_csv = dir / "correlation_heatmap.csv";
      csv::Writer w(heat_csv);
      std::vector<std::string> header{"method"};
      header.insert(header.end(), mean.methods.begin(), mean.methods.end());
      w.row(header);
      for (std::size_t a = 0; a < mean.methods.size(); ++a) {
        std::vector<std::string> f{mean.methods[a]};
        for (const auto& v : mean.r[a]) f.push_back(csv::number(v));
        w.row(f);
      }
      w.save();
      res.outputs.push_back(heat_csv);

      std::vector<std::string> labels;
      for (const auto& m : mean.methods) labels.push_back(display_of(m));
      const auto heat_svg = dir / "correlation_heatmap.svg";
      write_text(heat_svg, svg::heatmap("Pearson correlation between methods", labels, mean.r));
      res.outputs.push_back(heat_svg);

      if (cfg.input.empty() || !fs::exists(cfg.input)) {
        res.messages.push_back("no --input responses; skipping ROC/ARC/ERC curves");
      } else {
        auto corpus = load_corpus(cfg, res);
        const auto groups = join_predictions(rows, corpus.sets, cfg.prediction);
        std::map<ConfigKey, std::vector<std::pair<Method, std::vector<ScoredItem>>>> by_config;
        for (const auto& [key, items] : groups) by_config[key.first].emplace_back(key.second, items);

        const fs::path curves = dir / "curves";
        fs::create_directories(curves);
        const auto curve_csv = dir / "curves.csv";
        csv::Writer cw(curve_csv);
        cw.row({"model", "question", "strategy", "method", "curve", "x", "y"});
        for (const auto& [config, methods] : by_config) {
          std::vector<svg::Series> roc;
          std::vector<svg::Series> arc;
          std::vector<svg::Series> erc;
          double err_max = 1.0;
          for (const auto& [m, items] : methods) {
            const std::string name(info(m).display);
            roc.push_back({name, roc_curve(items)});
            arc.push_back({name, accuracy_rejection_curve(items, cfg.tie)});
            erc.push_back({name, error_rejection_curve(items, cfg.tie)});
            for (const auto& p : erc.back().points) err_max = std::max(err_max, p.y);
            const std::array<std::pair<const char*, const svg::Series*>, 3> all{
                {{"roc", &roc.back()}, {"arc", &arc.back()}, {"erc", &erc.back()}}};
            for (const auto& [curve, series] : all) {
              for (const auto& p : series->points) {
                auto f = config_fields(config);
                f.emplace_back(to_string(m));
                f.emplace_back(curve);
                f.push_back(csv::number(p.x));
                f.push_back(csv::number(p.y));
                cw.row(f);
              }
            }
          }
          const auto stem = file_stem(config);
          const auto title = config.label();
          write_text(curves / (stem + "_roc.svg"),
                     svg::line_chart({"ROC " + title, "false positive rate", "true positive rate"},
                                     roc));
          write_text(curves / (stem + "_arc.svg"),
                     svg::line_chart({"Accuracy-rejection " + title, "rejection rate", "accuracy"},
                                     arc));
          write_text(curves / (stem + "_erc.svg"),
                     svg::line_chart({"Error-rejection " + title, "rejection rate",
                                      "mean absolute error", 0.0, 1.0, 0.0, err_max},
                                     erc));
          for (const char* kind : {"roc", "arc", "erc"}) {
            res.outputs.push_back(curves / (stem + "_" + kind + ".svg"));
          }
        }
        cw.save();
        res.outputs.push_back(curve_csv);
      }
    }
    write_metadata(cfg, "report",
                   {{"eval", cfg.eval_path().generic_string()},
                    {"stability", cfg.stability_path().generic_string()},
                    {"scores", cfg.scores_path().generic_string()}},
                   res);
  });
}

}  // namespace uq
