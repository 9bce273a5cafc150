#include "uq/methods.hpp"

#include "uq/error.hpp"

namespace uq {

namespace {

constexpr std::array<MethodInfo, 14> kMethods = {{
    {Method::kNumset, "numset", "Numset", std::nullopt},
    {Method::kMar, "mar", "MAR", std::nullopt},
    {Method::kCe, "ce", "CE", std::nullopt},
    {Method::kFsd, "fsd", "FSD", std::nullopt},
    {Method::kJaccardNad, "jaccard_nad", "JS_NAD", SimilarityKind::kJaccard},
    {Method::kJaccardGe, "jaccard_ge", "JS_GE", SimilarityKind::kJaccard},
    {Method::kJaccardEigen, "jaccard_eigen", "JS_Eigen", SimilarityKind::kJaccard},
    {Method::kEmbedNad, "embed_nad", "Embed_NAD", SimilarityKind::kEmbed},
    {Method::kEmbedGe, "embed_ge", "Embed_GE", SimilarityKind::kEmbed},
    {Method::kEmbedEigen, "embed_eigen", "Embed_Eigen", SimilarityKind::kEmbed},
    {Method::kNliNad, "nli_nad", "NLI_NAD", SimilarityKind::kNli},
    {Method::kNliGe, "nli_ge", "NLI_GE", SimilarityKind::kNli},
    {Method::kNliEigen, "nli_eigen", "NLI_Eigen", SimilarityKind::kNli},
    {Method::kNliDse, "nli_dse", "NLI_DSE", SimilarityKind::kNli},
}};

}  // namespace

std::span<const MethodInfo> all_methods() { return kMethods; }

const MethodInfo& info(Method m) { return kMethods[static_cast<std::size_t>(m)]; }

std::string_view to_string(Method m) { return info(m).name; }

std::optional<Method> method_from_string(std::string_view s) {
  for (const auto& mi : kMethods) {
    if (mi.name == s) return mi.id;
  }
  return std::nullopt;
}

MethodValue evaluate_method(Method m, const ItemEvidence& ev, std::size_t k,
                            double dse_threshold) {
  const std::size_t n = ev.size();
  if (k == 0) k = n;
  if (k < 2 || k > n) throw ValidationError("prefix length " + std::to_string(k) + " out of range");

  const auto& mi = info(m);
  if (!mi.kind) {
    const auto h = LabelHistogram::from_labels(std::span(ev.scores).first(k));
    switch (m) {
      case Method::kNumset:
        return {numset(h)};
      case Method::kMar:
        return {mar(h)};
      case Method::kCe:
        return {categorical_entropy(h)};
      case Method::kFsd:
        return {fsd(h)};
      default:
        break;
    }
  }

  const auto& full = ev.matrix(*mi.kind);
  if (!full) {
    throw ValidationError(std::string("method ") + std::string(mi.name) + " needs a " +
                          std::string(to_string(*mi.kind)) + " similarity matrix");
  }
  if (full->n() != n) throw ValidationError("similarity matrix size differs from sample count");
  const RelationGraph g(k == n ? *full : full->leading(k));
  switch (m) {
    case Method::kJaccardNad:
    case Method::kEmbedNad:
    case Method::kNliNad:
      return {nad(g)};
    case Method::kJaccardGe:
    case Method::kEmbedGe:
    case Method::kNliGe:
      return {eccentricity(g)};
    case Method::kJaccardEigen:
    case Method::kEmbedEigen:
    case Method::kNliEigen: {
      const auto s = algebraic_connectivity_uncertainty(g);
      return {s.value, s.capped};
    }
    case Method::kNliDse:
      return {discrete_semantic_entropy(semantic_clusters(g, dse_threshold), k)};
    default:
      break;
  }
  throw ValidationError("unhandled method");
}

PrefixSeries prefix_uncertainties(const ItemEvidence& ev, Method m, std::string item_id,
                                  double dse_threshold) {
  PrefixSeries series;
  series.item_id = std::move(item_id);
  series.method = std::string(to_string(m));
  for (std::size_t k = 2; k <= ev.size(); ++k) {
    series.values.push_back(evaluate_method(m, ev, k, dse_threshold).value);
  }
  return series;
}

}  // namespace uq
