#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fermat/fermat_distance.hpp"
#include "fermat/spatial_index.hpp"

namespace fermat {

enum class Symmetrize { None, Min, Max };

Symmetrize symmetrize_from_name(const std::string& name);

/// Directed k-nearest-neighbor graph with edge weights |q - q'|^alpha.
///
/// Matching the restricted-distance definition, edges are directional:
/// i -> j exists iff j is among the k nearest neighbors of i. Each
/// adjacency list is sorted by increasing Euclidean distance (ties:
/// lexicographic coords, then index), so the first k' entries form the
/// exact k'-NN graph for any k' <= k. An optional mutualized variant
/// adds the reverse of every edge (union), losing the prefix property.
class KnnGraph {
 public:
  struct Edge {
    std::uint32_t target;
    double weight;
  };

  static KnnGraph build(const PointCloud& cloud, const SpatialIndex& index,
                        std::size_t k, Alpha alpha, bool mutualize = false,
                        int workers = 0);

  std::size_t node_count() const { return offsets_.size() - 1; }
  std::size_t k() const { return k_; }
  double alpha() const { return alpha_; }
  bool mutualized() const { return mutualized_; }

  std::span<const Edge> neighbors(std::size_t i) const {
    return std::span<const Edge>(edges_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
  }

  /// First k_prefix neighbors of i (the exact k_prefix-NN adjacency).
  /// Only meaningful on non-mutualized graphs.
  std::span<const Edge> neighbors_prefix(std::size_t i, std::size_t k_prefix) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Edge> edges_;
  std::size_t k_ = 0;
  double alpha_ = 1.0;
  bool mutualized_ = false;
};

/// Shortest path from q(x) to q(y) using only directed kNN edges.
/// Returns an unreachable-flagged result when no such path exists
/// (possible for small k; never for the exact problem).
DistanceResult restricted_distance(const KnnGraph& graph, const PointCloud& cloud,
                                   Alpha alpha, PointView x, PointView y);

/// Particle-index variant. k_prefix = 0 uses the full graph; otherwise
/// only the first k_prefix neighbors of every node are considered.
DistanceResult restricted_distance_between(const KnnGraph& graph,
                                           const PointCloud& cloud, std::size_t i,
                                           std::size_t j, std::size_t k_prefix = 0);

/// Restricted distances from `source` to every particle (one heap
/// Dijkstra; unreachable entries are +inf).
std::vector<double> restricted_distances_from(const KnnGraph& graph, std::size_t source,
                                              std::size_t k_prefix = 0);

/// Full n x n restricted distance matrix, one single-source run per row,
/// distributed over `workers` threads with deterministic output.
/// The directed definition is not symmetric; `policy` optionally
/// symmetrizes with entrywise min or max. Unreachable entries stay +inf.
std::vector<double> all_pairs_restricted(const KnnGraph& graph, Symmetrize policy,
                                         int workers = 0);

}  // namespace fermat
