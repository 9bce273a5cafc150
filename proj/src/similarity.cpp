#include "uq/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include <spdlog/spdlog.h>

#include "uq/error.hpp"
#include "uq/text.hpp"

namespace uq {

using nlohmann::json;

std::string_view to_string(SimilarityKind k) {
  switch (k) {
    case SimilarityKind::kJaccard:
      return "jaccard";
    case SimilarityKind::kEmbed:
      return "embed";
    case SimilarityKind::kNli:
      return "nli";
  }
  return "jaccard";
}

std::optional<SimilarityKind> similarity_kind_from_string(std::string_view s) {
  if (s == "jaccard") return SimilarityKind::kJaccard;
  if (s == "embed") return SimilarityKind::kEmbed;
  if (s == "nli") return SimilarityKind::kNli;
  return std::nullopt;
}

namespace {

constexpr double kSymmetryTol = 1e-9;

std::string at(Eigen::Index i, Eigen::Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_unit_range(const Eigen::MatrixXd& m, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError(std::string(what) + " entry " + at(i, j) + " = " +
                              std::to_string(v) + " outside [0,1]");
      }
    }
  }
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(SimilarityKind kind, Eigen::MatrixXd values,
                                   std::optional<Eigen::MatrixXd> directed)
    : kind_(kind), values_(std::move(values)), directed_(std::move(directed)) {
  if (values_.rows() != values_.cols()) throw ValidationError("similarity matrix is not square");
  if (values_.rows() < 1) throw ValidationError("similarity matrix is empty");
  check_unit_range(values_, "similarity");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_(i, i) - 1.0) > kSymmetryTol) {
      throw ValidationError("similarity diagonal " + at(i, i) + " is not 1");
    }
    for (Eigen::Index j = i + 1; j < values_.cols(); ++j) {
      if (std::abs(values_(i, j) - values_(j, i)) > kSymmetryTol) {
        throw ValidationError("similarity matrix asymmetric at " + at(i, j));
      }
    }
  }
  if (kind_ == SimilarityKind::kNli) {
    if (!directed_) throw ValidationError("nli similarity matrix needs directed scores");
    if (directed_->rows() != values_.rows() || directed_->cols() != values_.cols()) {
      throw ValidationError("directed nli matrix has the wrong shape");
    }
    check_unit_range(*directed_, "directed nli");
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        const double mean = 0.5 * ((*directed_)(i, j) + (*directed_)(j, i));
        if (std::abs(mean - values_(i, j)) > kSymmetryTol) {
          throw ValidationError("nli value " + at(i, j) + " is not the mean of both directions");
        }
      }
    }
  } else if (directed_) {
    throw ValidationError("directed scores are only valid for nli matrices");
  }
}

SimilarityMatrix SimilarityMatrix::from_directed(Eigen::MatrixXd directed) {
  Eigen::MatrixXd sym = 0.5 * (directed + directed.transpose());
  return SimilarityMatrix(SimilarityKind::kNli, std::move(sym), std::move(directed));
}

SimilarityMatrix SimilarityMatrix::leading(std::size_t k) const {
  if (k < 1 || k > n()) throw ValidationError("prefix length out of range");
  const auto kk = static_cast<Eigen::Index>(k);
  std::optional<Eigen::MatrixXd> d;
  if (directed_) d = directed_->topLeftCorner(kk, kk);
  return SimilarityMatrix(kind_, values_.topLeftCorner(kk, kk), std::move(d));
}

double jaccard_similarity(std::string_view a, std::string_view b) {
  const auto ta = text::token_set(a);
  const auto tb = text::token_set(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : ta) inter += tb.count(t);
  const std::size_t uni = ta.size() + tb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::vector<double>> CachedProvider::embeddings(const std::vector<std::string>& texts) {
  const std::string model = provider_.model_id();
  std::vector<std::string> keys;
  keys.reserve(texts.size());
  std::vector<std::string> missing;
  std::set<std::string> queued;
  for (const auto& t : texts) {
    keys.push_back(SimilarityCache::embedding_key(model, t));
    if (!cache_.embedding(keys.back()) && queued.insert(t).second) missing.push_back(t);
  }
  if (!missing.empty()) {
    ++provider_calls_;
    auto fetched = provider_.embed(missing);
    if (fetched.size() != missing.size()) {
      throw ProviderError("embedding provider returned a wrong-length response");
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      cache_.put_embedding(SimilarityCache::embedding_key(model, missing[i]), std::move(fetched[i]));
    }
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& k : keys) out.push_back(*cache_.embedding(k));
  return out;
}

std::vector<double> CachedProvider::entailment(const std::vector<SentencePair>& pairs) {
  const std::string model = provider_.model_id();
  std::vector<std::string> keys;
  keys.reserve(pairs.size());
  std::vector<SentencePair> missing;
  std::set<std::string> queued;
  for (const auto& p : pairs) {
    keys.push_back(SimilarityCache::entailment_key(model, p.premise, p.hypothesis));
    if (!cache_.entailment(keys.back()) && queued.insert(keys.back()).second) {
      missing.push_back(p);
    }
  }
  if (!missing.empty()) {
    ++provider_calls_;
    auto fetched = provider_.entail(missing);
    if (fetched.size() != missing.size()) {
      throw ProviderError("nli provider returned a wrong-length response");
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      cache_.put_entailment(
          SimilarityCache::entailment_key(model, missing[i].premise, missing[i].hypothesis),
          fetched[i]);
    }
  }
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& k : keys) out.push_back(*cache_.entailment(k));
  return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ProviderError("embedding dimensions differ");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    spdlog::warn("zero-norm embedding; similarity set to 0");
    return 0.0;
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

double embedding_similarity(std::string_view a, std::string_view b, CachedProvider& provider) {
  auto e = provider.embeddings({std::string(a), std::string(b)});
  return cosine_similarity(e[0], e[1]);
}

namespace {

using Sentences = std::vector<std::string>;

// Entailment lookups for all ordered sentence pairs between texts, fetched in
// one batch.
class EntailmentTable {
 public:
  EntailmentTable(const std::vector<Sentences>& texts,
                  const std::vector<std::pair<std::size_t, std::size_t>>& ordered,
                  CachedProvider& provider) {
    std::vector<SentencePair> pairs;
    for (auto [i, j] : ordered) {
      for (const auto& p : texts[i]) {
        for (const auto& h : texts[j]) {
          if (index_.emplace(std::make_pair(p, h), pairs.size()).second) {
            pairs.push_back({p, h});
          }
        }
      }
    }
    probs_ = provider.entailment(pairs);
  }

  double operator()(const std::string& premise, const std::string& hypothesis) const {
    return probs_[index_.at({premise, hypothesis})];
  }

 private:
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
  std::vector<double> probs_;
};

double mean_max(const Sentences& from, const Sentences& into, const EntailmentTable& table) {
  if (from.empty() || into.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : from) {
    double best = 0.0;
    for (const auto& h : into) best = std::max(best, table(p, h));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

std::vector<std::pair<std::size_t, std::size_t>> off_diagonal(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<std::string> relation_texts(const ResponseSet& rs) {
  std::vector<std::string> out;
  out.reserve(rs.size());
  for (const auto& s : rs.samples) out.push_back(s.relation_text());
  return out;
}

}  // namespace

NliScore nli_similarity(std::string_view a, std::string_view b, CachedProvider& provider) {
  std::vector<Sentences> texts = {text::split_sentences(a), text::split_sentences(b)};
  EntailmentTable table(texts, {{0, 1}, {1, 0}}, provider);
  NliScore s;
  s.forward = mean_max(texts[0], texts[1], table);
  s.backward = mean_max(texts[1], texts[0], table);
  s.symmetric = 0.5 * (s.forward + s.backward);
  return s;
}

SimilarityMatrix build_matrix(const ResponseSet& rs, SimilarityKind kind, CachedProvider* provider) {
  const auto texts = relation_texts(rs);
  const auto n = static_cast<Eigen::Index>(texts.size());
  if (kind != SimilarityKind::kJaccard && provider == nullptr) {
    throw ProviderError(std::string("no provider for ") + std::string(to_string(kind)) +
                        " similarity of item " + rs.item_id);
  }

  switch (kind) {
    case SimilarityKind::kJaccard: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          m(i, j) = m(j, i) = jaccard_similarity(texts[i], texts[j]);
        }
      }
      return SimilarityMatrix(kind, std::move(m));
    }
    case SimilarityKind::kEmbed: {
      const auto emb = provider->embeddings(texts);
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          m(i, j) = m(j, i) = cosine_similarity(emb[i], emb[j]);
        }
      }
      return SimilarityMatrix(kind, std::move(m));
    }
    case SimilarityKind::kNli: {
      std::vector<Sentences> sentences;
      sentences.reserve(texts.size());
      for (const auto& t : texts) sentences.push_back(text::split_sentences(t));
      EntailmentTable table(sentences, off_diagonal(texts.size()), *provider);
      Eigen::MatrixXd directed = Eigen::MatrixXd::Identity(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          if (i != j) directed(i, j) = mean_max(sentences[i], sentences[j], table);
        }
      }
      return SimilarityMatrix::from_directed(std::move(directed));
    }
  }
  throw ValidationError("unknown similarity kind");
}

void prefetch(const std::vector<ResponseSet>& sets, SimilarityKind kind, CachedProvider& provider) {
  if (kind == SimilarityKind::kJaccard) return;
  if (kind == SimilarityKind::kEmbed) {
    std::set<std::string> seen;
    std::vector<std::string> texts;
    for (const auto& rs : sets) {
      for (const auto& s : rs.samples) {
        if (seen.insert(s.relation_text()).second) texts.push_back(s.relation_text());
      }
    }
    provider.embeddings(texts);
    return;
  }
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<SentencePair> pairs;
  for (const auto& rs : sets) {
    std::vector<Sentences> sentences;
    for (const auto& t : relation_texts(rs)) sentences.push_back(text::split_sentences(t));
    for (auto [i, j] : off_diagonal(sentences.size())) {
      for (const auto& p : sentences[i]) {
        for (const auto& h : sentences[j]) {
          if (seen.emplace(p, h).second) pairs.push_back({p, h});
        }
      }
    }
  }
  provider.entailment(pairs);
}

namespace {

Eigen::MatrixXd matrix_from_json(const json& rows, std::size_t n, const char* field) {
  if (!rows.is_array() || rows.size() != n) {
    throw ValidationError(std::string("\"") + field + "\" must have n rows");
  }
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) {
      throw ValidationError(std::string("\"") + field + "\" row " + std::to_string(i) +
                            " must have n entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!rows[i][j].is_number()) {
        throw ValidationError(std::string("\"") + field + "\" entry " +
                              at(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                              " is not a number");
      }
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

PrecomputedMatrix precomputed_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("precomputed matrix must be a JSON object");
  for (const char* f : {"item_id", "kind", "n", "values"}) {
    if (!j.contains(f)) throw ValidationError(std::string("missing field \"") + f + "\"");
  }
  const auto kind = similarity_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw ValidationError("unknown kind \"" + j["kind"].get<std::string>() + "\"");
  const auto n = j["n"].get<std::size_t>();
  Eigen::MatrixXd values = matrix_from_json(j["values"], n, "values");
  std::optional<Eigen::MatrixXd> directed;
  if (j.contains("directed") && !j["directed"].is_null()) {
    directed = matrix_from_json(j["directed"], n, "directed");
  }

  std::optional<ConfigKey> config;
  if (j.contains("model") || j.contains("question") || j.contains("strategy")) {
    ConfigKey key;
    key.model = j.value("model", "");
    key.question = j.value("question", "");
    auto s = strategy_from_string(j.value("strategy", ""));
    if (!s) throw ValidationError("precomputed matrix has an unknown strategy");
    key.strategy = *s;
    config = std::move(key);
  }
  return {j["item_id"].get<std::string>(), std::move(config),
          SimilarityMatrix(*kind, std::move(values), std::move(directed))};
}

PrecomputedMatrix load_precomputed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError(path.string() + ": malformed JSON");
  try {
    return precomputed_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

json to_json(const PrecomputedMatrix& pm) {
  json j = {{"item_id", pm.item_id},
            {"kind", std::string(to_string(pm.matrix.kind()))},
            {"n", pm.matrix.n()},
            {"values", matrix_to_json(pm.matrix.values())}};
  if (pm.matrix.directed()) j["directed"] = matrix_to_json(*pm.matrix.directed());
  if (pm.config) {
    j["model"] = pm.config->model;
    j["question"] = pm.config->question;
    j["strategy"] = std::string(to_string(pm.config->strategy));
  }
  return j;
}

}  // namespace uq
