#pragma once

#include <cstddef>
#include <vector>

#include "fermat/point_cloud.hpp"

namespace fermat {

/// Exact nearest-neighbor index over an immutable cloud.
///
/// Results are identical to a brute-force scan ordered by
/// (distance, lexicographic coordinates, index). Internally a kd-tree
/// with bucket leaves; clouds with dimension > 16 fall back to linear
/// scans, where a tree offers no pruning. Read-only queries are safe
/// from any number of threads.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud);

  const PointCloud& cloud() const { return *cloud_; }

  /// Nearest particle to x (no exclusions).
  std::size_t nearest(PointView x) const;

  /// k nearest particles to point x, sorted by increasing distance
  /// (ties: lexicographic coords, then index). `exclude` removes one
  /// particle index from candidacy (npos for none).
  std::vector<std::size_t> knn_point(PointView x, std::size_t k,
                                     std::size_t exclude = npos) const;

  /// k nearest neighbors of particle q_index, excluding itself.
  /// Requires 1 <= k <= n-1.
  std::vector<std::size_t> knn(std::size_t q_index, std::size_t k) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    int axis = -1;       // -1 marks a leaf
    double split = 0.0;  // splitting coordinate value
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
  };

  struct Candidate {
    double d2;
    std::size_t idx;
  };

  int build_node(std::size_t begin, std::size_t end);
  void search(int node, PointView x, std::size_t k, std::size_t exclude,
              std::vector<Candidate>& heap) const;
  void consider(PointView x, std::size_t idx, std::size_t k,
                std::vector<Candidate>& heap) const;
  bool worse(const Candidate& a, const Candidate& b) const;

  const PointCloud* cloud_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> perm_;
  bool brute_ = false;

  static constexpr std::size_t kLeafSize = 24;
};

}  // namespace fermat
