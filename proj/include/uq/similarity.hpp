#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "uq/cache.hpp"
#include "uq/provider.hpp"
#include "uq/response.hpp"

namespace uq {

enum class SimilarityKind { kJaccard, kEmbed, kNli };

std::string_view to_string(SimilarityKind k);
std::optional<SimilarityKind> similarity_kind_from_string(std::string_view s);

// Symmetric n x n similarities in [0,1] with unit diagonal. NLI matrices also
// keep the one-directional scores, values = (directed + directed^T) / 2.
class SimilarityMatrix {
 public:
  // Throws ValidationError naming the offending (i, j) on a broken invariant.
  SimilarityMatrix(SimilarityKind kind, Eigen::MatrixXd values,
                   std::optional<Eigen::MatrixXd> directed = std::nullopt);

  static SimilarityMatrix from_directed(Eigen::MatrixXd directed);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  SimilarityKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::optional<Eigen::MatrixXd>& directed() const { return directed_; }

  // Leading k x k principal submatrix (the first k samples).
  SimilarityMatrix leading(std::size_t k) const;

 private:
  SimilarityKind kind_;
  Eigen::MatrixXd values_;
  std::optional<Eigen::MatrixXd> directed_;
};

double jaccard_similarity(std::string_view a, std::string_view b);

// Provider access that consults the cache first and stores what it fetches.
class CachedProvider {
 public:
  CachedProvider(Provider& provider, SimilarityCache& cache) : provider_(provider), cache_(cache) {}

  std::vector<std::vector<double>> embeddings(const std::vector<std::string>& texts);
  std::vector<double> entailment(const std::vector<SentencePair>& pairs);

  std::string model_id() const { return provider_.model_id(); }
  std::size_t provider_calls() const { return provider_calls_.load(); }

 private:
  Provider& provider_;
  SimilarityCache& cache_;
  std::atomic<std::size_t> provider_calls_{0};
};

// Cosine of two embeddings clamped to [0,1]; zero-norm vectors give 0.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

double embedding_similarity(std::string_view a, std::string_view b, CachedProvider& provider);

struct NliScore {
  double forward = 0.0;   // s_{a->b}
  double backward = 0.0;  // s_{b->a}
  double symmetric = 0.0;
};

// Mean over a's sentences of the best entailment into any sentence of b,
// in both directions, then averaged.
NliScore nli_similarity(std::string_view a, std::string_view b, CachedProvider& provider);

// All pairwise similarities over the samples' relation texts (rationale, or
// raw when the rationale is empty). `provider` may be null for kJaccard.
SimilarityMatrix build_matrix(const ResponseSet& rs, SimilarityKind kind,
                              CachedProvider* provider = nullptr);

// Fetches every embedding or sentence-pair score the sets will need, in as
// few batched requests as possible.
void prefetch(const std::vector<ResponseSet>& sets, SimilarityKind kind, CachedProvider& provider);

struct PrecomputedMatrix {
  std::string item_id;
  // Optional narrowing to one configuration; empty matches any.
  std::optional<ConfigKey> config;
  SimilarityMatrix matrix;
};

PrecomputedMatrix load_precomputed(const std::filesystem::path& path);
PrecomputedMatrix precomputed_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PrecomputedMatrix& pm);

}  // namespace uq
