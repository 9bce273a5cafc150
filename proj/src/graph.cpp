#include "uq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "uq/error.hpp"

namespace uq {

RelationGraph::RelationGraph(SimilarityMatrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.n() < 2) throw ValidationError("relation graph needs at least 2 nodes");
}

Eigen::MatrixXd RelationGraph::distances() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n(), n()) - matrix_.values();
  d.diagonal().setZero();
  return d;
}

Eigen::MatrixXd RelationGraph::laplacian() const {
  Eigen::MatrixXd a = matrix_.values();
  a.diagonal().setZero();
  Eigen::MatrixXd l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

double nad(const RelationGraph& g) {
  const auto& s = g.matrix().values();
  const double n = static_cast<double>(g.n());
  const double off_diagonal_sum = s.sum() - s.trace();
  return std::clamp(1.0 - off_diagonal_sum / (n * (n - 1.0)), 0.0, 1.0);
}

Eigen::MatrixXd shortest_paths(const RelationGraph& g) {
  const Eigen::MatrixXd w = g.distances();
  const auto n = w.rows();
  Eigen::MatrixXd dist(n, n);
  std::vector<double> best(n);
  std::vector<bool> done(n);
  for (Eigen::Index src = 0; src < n; ++src) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    std::fill(done.begin(), done.end(), false);
    best[src] = 0.0;
    for (Eigen::Index step = 0; step < n; ++step) {
      Eigen::Index u = -1;
      for (Eigen::Index v = 0; v < n; ++v) {
        if (!done[v] && (u < 0 || best[v] < best[u])) u = v;
      }
      done[u] = true;
      for (Eigen::Index v = 0; v < n; ++v) {
        if (!done[v]) best[v] = std::min(best[v], best[u] + w(u, v));
      }
    }
    for (Eigen::Index v = 0; v < n; ++v) dist(src, v) = best[v];
  }
  return dist;
}

double eccentricity(const RelationGraph& g) {
  const Eigen::MatrixXd sp = shortest_paths(g);
  return sp.rowwise().maxCoeff().mean();
}

SpectralUncertainty algebraic_connectivity_uncertainty(const RelationGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.laplacian(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("Laplacian eigensolver did not converge");
  }
  SpectralUncertainty out;
  out.lambda2 = solver.eigenvalues()(1);
  if (out.lambda2 < kSpectralEpsilon) {
    out.capped = true;
    out.value = 1.0 / kSpectralEpsilon;
  } else {
    out.value = 1.0 / out.lambda2;
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

}  // namespace

std::vector<std::size_t> SemanticClustering::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.size());
  return out;
}

SemanticClustering semantic_clusters(const RelationGraph& g, double threshold) {
  const auto& directed = g.matrix().directed();
  if (g.matrix().kind() != SimilarityKind::kNli || !directed) {
    throw ValidationError("semantic clustering requires an nli similarity matrix");
  }
  const std::size_t n = g.n();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      if ((*directed)(ii, jj) > threshold && (*directed)(jj, ii) > threshold) sets.unite(i, j);
    }
  }

  SemanticClustering out;
  out.threshold = threshold;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(out.clusters.size());
      out.clusters.emplace_back();
    }
    out.clusters[slot[root]].push_back(i);
  }
  return out;
}

double discrete_semantic_entropy(const SemanticClustering& c, std::size_t n) {
  std::size_t covered = 0;
  for (const auto& cluster : c.clusters) covered += cluster.size();
  if (covered != n || n == 0) throw ValidationError("clusters do not partition the nodes");
  double entropy = 0.0;
  for (const auto& cluster : c.clusters) {
    const double p = static_cast<double>(cluster.size()) / static_cast<double>(n);
    entropy -= p * std::log(p);
  }
  return entropy;
}

}  // namespace uq
