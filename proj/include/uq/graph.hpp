#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "uq/similarity.hpp"

namespace uq {

// Complete weighted graph over one response set.
// Edge distance d_ij = 1 - s_ij; Laplacian L = D - A with A_ij = s_ij, A_ii = 0.
class RelationGraph {
 public:
  explicit RelationGraph(SimilarityMatrix matrix);

  const SimilarityMatrix& matrix() const { return matrix_; }
  std::size_t n() const { return matrix_.n(); }
  Eigen::MatrixXd distances() const;
  Eigen::MatrixXd laplacian() const;

 private:
  SimilarityMatrix matrix_;
};

inline constexpr double kSpectralEpsilon = 1e-9;
inline constexpr double kDefaultDseThreshold = 0.5;

double nad(const RelationGraph& g);

// All-pairs shortest-path distances (dense Dijkstra from every node).
Eigen::MatrixXd shortest_paths(const RelationGraph& g);

// Mean over nodes of the farthest shortest-path distance.
double eccentricity(const RelationGraph& g);

struct SpectralUncertainty {
  double value = 0.0;    // 1 / lambda2, or 1 / kSpectralEpsilon when capped
  double lambda2 = 0.0;  // second-smallest Laplacian eigenvalue
  bool capped = false;
};

// Throws NumericError if the eigensolver does not converge.
SpectralUncertainty algebraic_connectivity_uncertainty(const RelationGraph& g);

struct SemanticClustering {
  std::vector<std::vector<std::size_t>> clusters;  // sorted by smallest member
  double threshold = kDefaultDseThreshold;

  std::vector<std::size_t> sizes() const;
};

// Connected components of the bidirectional-entailment relation
// (both directed scores strictly above threshold). Requires an nli matrix.
SemanticClustering semantic_clusters(const RelationGraph& g,
                                     double threshold = kDefaultDseThreshold);

double discrete_semantic_entropy(const SemanticClustering& c, std::size_t n);

}  // namespace uq
