#include "fermat/spatial_index.hpp"

#include <algorithm>

#include "fermat/errors.hpp"

namespace fermat {

SpatialIndex::SpatialIndex(const PointCloud& cloud) : cloud_(&cloud) {
  if (cloud.empty()) throw ValidationError("SpatialIndex: empty cloud");
  perm_.resize(cloud.size());
  for (std::size_t i = 0; i < perm_.size(); ++i) perm_[i] = i;
  brute_ = cloud.dim() > 16;
  if (!brute_) {
    nodes_.reserve(2 * cloud.size() / kLeafSize + 4);
    build_node(0, perm_.size());
  }
}

int SpatialIndex::build_node(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  // Split along the widest axis of this subset's bounding box.
  const int dim = cloud_->dim();
  int axis = 0;
  double best_extent = -1.0;
  for (int j = 0; j < dim; ++j) {
    double lo = cloud_->coord(perm_[begin], j), hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double c = cloud_->coord(perm_[i], j);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi - lo > best_extent) {
      best_extent = hi - lo;
      axis = j;
    }
  }
  if (best_extent <= 0.0) return id;  // all points coincide: keep as leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                   perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                   perm_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double ca = cloud_->coord(a, axis);
                     const double cb = cloud_->coord(b, axis);
                     if (ca != cb) return ca < cb;
                     return a < b;
                   });
  nodes_[id].axis = axis;
  nodes_[id].split = cloud_->coord(perm_[mid], axis);
  const int left = build_node(begin, mid);
  const int right = build_node(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

bool SpatialIndex::worse(const Candidate& a, const Candidate& b) const {
  return compare_candidates(a.d2, cloud_->point(a.idx), a.idx, b.d2,
                            cloud_->point(b.idx), b.idx) > 0;
}

void SpatialIndex::consider(PointView x, std::size_t idx, std::size_t k,
                            std::vector<Candidate>& heap) const {
  const Candidate c{squared_distance(cloud_->point(idx), x), idx};
  auto cmp = [this](const Candidate& a, const Candidate& b) { return worse(b, a); };
  if (heap.size() < k) {
    heap.push_back(c);
    std::push_heap(heap.begin(), heap.end(), cmp);  // max-heap: worst on top
  } else if (worse(heap.front(), c)) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    heap.back() = c;
    std::push_heap(heap.begin(), heap.end(), cmp);
  }
}

void SpatialIndex::search(int node, PointView x, std::size_t k,
                          std::size_t exclude, std::vector<Candidate>& heap) const {
  const Node& nd = nodes_[static_cast<std::size_t>(node)];
  if (nd.axis < 0) {
    for (std::size_t i = nd.begin; i < nd.end; ++i) {
      const std::size_t idx = perm_[i];
      if (idx == exclude) continue;
      consider(x, idx, k, heap);
    }
    return;
  }
  const double diff = x[static_cast<std::size_t>(nd.axis)] - nd.split;
  const int near = diff < 0.0 ? nd.left : nd.right;
  const int far = diff < 0.0 ? nd.right : nd.left;
  search(near, x, k, exclude, heap);
  // The splitting-plane distance is a lower bound for the far side.
  // Visit on equality: an equidistant point can still win its tie-break.
  if (heap.size() < k || diff * diff <= heap.front().d2) {
    search(far, x, k, exclude, heap);
  }
}

std::vector<std::size_t> SpatialIndex::knn_point(PointView x, std::size_t k,
                                                 std::size_t exclude) const {
  if (static_cast<int>(x.size()) != cloud_->dim()) {
    throw ValidationError("knn query: dimension mismatch");
  }
  const std::size_t available = cloud_->size() - (exclude == npos ? 0 : 1);
  if (k < 1 || k > available) {
    throw ValidationError("knn query: k out of range (k=" + std::to_string(k) +
                          ", candidates=" + std::to_string(available) + ")");
  }
  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  if (brute_) {
    for (std::size_t i = 0; i < cloud_->size(); ++i) {
      if (i == exclude) continue;
      consider(x, i, k, heap);
    }
  } else {
    search(0, x, k, exclude, heap);
  }
  std::sort(heap.begin(), heap.end(),
            [this](const Candidate& a, const Candidate& b) { return worse(b, a); });
  std::vector<std::size_t> out;
  out.reserve(heap.size());
  for (const auto& c : heap) out.push_back(c.idx);
  return out;
}

std::size_t SpatialIndex::nearest(PointView x) const { return knn_point(x, 1)[0]; }

std::vector<std::size_t> SpatialIndex::knn(std::size_t q_index, std::size_t k) const {
  if (q_index >= cloud_->size()) throw ValidationError("knn: particle index out of range");
  if (k >= cloud_->size()) {
    throw ValidationError("knn: k must be <= n-1 (k=" + std::to_string(k) +
                          ", n=" + std::to_string(cloud_->size()) + ")");
  }
  return knn_point(cloud_->point(q_index), k, q_index);
}

}  // namespace fermat
