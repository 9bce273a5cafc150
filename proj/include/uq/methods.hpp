#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uq/categorical.hpp"
#include "uq/graph.hpp"
#include "uq/similarity.hpp"
#include "uq/stability.hpp"

namespace uq {

// The fourteen uncertainty methods: four over score labels, three graph
// measures per similarity kind, and semantic entropy on the nli graph.
enum class Method {
  kNumset,
  kMar,
  kCe,
  kFsd,
  kJaccardNad,
  kJaccardGe,
  kJaccardEigen,
  kEmbedNad,
  kEmbedGe,
  kEmbedEigen,
  kNliNad,
  kNliGe,
  kNliEigen,
  kNliDse,
};

struct MethodInfo {
  Method id;
  std::string_view name;     // CLI / CSV identifier
  std::string_view display;  // report label
  std::optional<SimilarityKind> kind;
};

std::span<const MethodInfo> all_methods();
const MethodInfo& info(Method m);
std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view s);

// Everything a method may read for one response set.
struct ItemEvidence {
  std::vector<Label> scores;
  std::array<std::optional<SimilarityMatrix>, 3> matrices;  // indexed by SimilarityKind

  const std::optional<SimilarityMatrix>& matrix(SimilarityKind k) const {
    return matrices[static_cast<std::size_t>(k)];
  }
  void set_matrix(SimilarityMatrix m) {
    const auto k = static_cast<std::size_t>(m.kind());
    matrices[k] = std::move(m);
  }
  std::size_t size() const { return scores.size(); }
};

struct MethodValue {
  double value = 0.0;
  bool capped = false;  // spectral value hit the 1/eps cap
};

// Method applied to the first k samples (k = 0 means all). Throws
// ValidationError if the method's similarity matrix is missing.
MethodValue evaluate_method(Method m, const ItemEvidence& ev, std::size_t k = 0,
                            double dse_threshold = kDefaultDseThreshold);

// u_k for k = 2..N; relation methods use the leading k x k submatrix.
PrefixSeries prefix_uncertainties(const ItemEvidence& ev, Method m, std::string item_id,
                                  double dse_threshold = kDefaultDseThreshold);

}  // namespace uq
