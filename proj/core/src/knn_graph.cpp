#include "fermat/knn_graph.hpp"

#include <algorithm>
#include <queue>

#include "fermat/errors.hpp"
#include "fermat/thread_pool.hpp"

namespace fermat {

Symmetrize symmetrize_from_name(const std::string& name) {
  if (name == "none") return Symmetrize::None;
  if (name == "min") return Symmetrize::Min;
  if (name == "max") return Symmetrize::Max;
  throw ValidationError("unknown symmetrization policy '" + name + "' (none|min|max)");
}

KnnGraph KnnGraph::build(const PointCloud& cloud, const SpatialIndex& index,
                         std::size_t k, Alpha alpha, bool mutualize, int workers) {
  const std::size_t n = cloud.size();
  if (n < 2) throw ValidationError("KnnGraph: need at least 2 particles");
  const std::size_t keff = std::min(k, n - 1);
  if (keff == 0) throw ValidationError("KnnGraph: k must be >= 1");

  KnnGraph g;
  g.k_ = keff;
  g.alpha_ = alpha.value;
  g.mutualized_ = mutualize;

  std::vector<std::vector<std::size_t>> nbrs(n);
  parallel_for(n, workers, [&](std::size_t i) { nbrs[i] = index.knn(i, keff); });

  if (!mutualize) {
    g.offsets_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g.offsets_[i] = i * keff;
    g.edges_.resize(n * keff);
    parallel_for(n, workers, [&](std::size_t i) {
      for (std::size_t h = 0; h < keff; ++h) {
        const std::size_t j = nbrs[i][h];
        const double d2 = squared_distance(cloud.point(i), cloud.point(j));
        const double w = pow_alpha(d2, alpha.value);
        if (!std::isfinite(w)) {
          throw NumericalError("KnnGraph: edge weight overflow (gap^alpha not finite)");
        }
        g.edges_[i * keff + h] = Edge{static_cast<std::uint32_t>(j), w};
      }
    });
    return g;
  }

  // Union with reversed edges, deduped, re-sorted per node by
  // (distance, lex coords, index).
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : nbrs[i]) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    g.offsets_[i + 1] = g.offsets_[i] + adj[i].size();
  }
  g.edges_.resize(g.offsets_.back());
  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(adj[i].size());
    for (std::size_t j : adj[i]) {
      order.emplace_back(squared_distance(cloud.point(i), cloud.point(j)), j);
    }
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
      return compare_candidates(a.first, cloud.point(a.second), a.second, b.first,
                                cloud.point(b.second), b.second) < 0;
    });
    for (std::size_t h = 0; h < order.size(); ++h) {
      g.edges_[g.offsets_[i] + h] = Edge{static_cast<std::uint32_t>(order[h].second),
                                         pow_alpha(order[h].first, alpha.value)};
    }
  });
  return g;
}

std::span<const KnnGraph::Edge> KnnGraph::neighbors_prefix(std::size_t i,
                                                           std::size_t k_prefix) const {
  if (mutualized_) {
    throw ValidationError("neighbors_prefix: undefined on mutualized graphs");
  }
  const std::size_t len = std::min(k_prefix, offsets_[i + 1] - offsets_[i]);
  return std::span<const Edge>(edges_.data() + offsets_[i], len);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Heap Dijkstra over the kNN adjacency. Lazy deletion; (distance, node)
/// keys make pop order deterministic under ties.
void heap_dijkstra(const KnnGraph& graph, std::size_t source, std::size_t target,
                   std::size_t k_prefix, std::vector<double>& dist,
                   std::vector<std::size_t>* pred) {
  const std::size_t n = graph.node_count();
  dist.assign(n, kInf);
  if (pred) pred->assign(n, static_cast<std::size_t>(-1));
  std::vector<char> settled(n, 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    if (u == target) return;
    const auto edges = k_prefix == 0 ? graph.neighbors(u) : graph.neighbors_prefix(u, k_prefix);
    for (const auto& e : edges) {
      const double nd = d + e.weight;
      if (nd < dist[e.target]) {
        dist[e.target] = nd;
        if (pred) (*pred)[e.target] = u;
        heap.emplace(nd, e.target);
      }
    }
  }
}

}  // namespace

DistanceResult restricted_distance_between(const KnnGraph& graph,
                                           const PointCloud& cloud, std::size_t i,
                                           std::size_t j, std::size_t k_prefix) {
  if (graph.node_count() != cloud.size()) {
    throw ValidationError("restricted_distance: graph/cloud size mismatch");
  }
  if (i >= cloud.size() || j >= cloud.size()) {
    throw ValidationError("restricted_distance: particle index out of range");
  }
  if (i == j) {
    DistanceResult r;
    r.path.particle_indices = {i};
    return r;
  }
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  heap_dijkstra(graph, i, j, k_prefix, dist, &pred);
  if (!std::isfinite(dist[j])) return DistanceResult::make_unreachable();
  DistanceResult r;
  r.distance = dist[j];
  std::vector<std::size_t> rev;
  for (std::size_t v = j; v != static_cast<std::size_t>(-1); v = pred[v]) {
    rev.push_back(v);
    if (v == i) break;
  }
  std::reverse(rev.begin(), rev.end());
  r.path.cost = r.distance;
  for (std::size_t h = 1; h < rev.size(); ++h) {
    r.path.arc_length += euclidean_distance(cloud.point(rev[h - 1]), cloud.point(rev[h]));
  }
  r.path.particle_indices = std::move(rev);
  return r;
}

DistanceResult restricted_distance(const KnnGraph& graph, const PointCloud& cloud,
                                   Alpha alpha, PointView x, PointView y) {
  if (graph.alpha() != alpha.value) {
    throw ValidationError("restricted_distance: graph was built with a different alpha");
  }
  const std::size_t sx = voronoi_anchor(cloud, x);
  const std::size_t sy = voronoi_anchor(cloud, y);
  return restricted_distance_between(graph, cloud, sx, sy);
}

std::vector<double> restricted_distances_from(const KnnGraph& graph, std::size_t source,
                                              std::size_t k_prefix) {
  if (source >= graph.node_count()) {
    throw ValidationError("restricted_distances_from: source out of range");
  }
  std::vector<double> dist;
  heap_dijkstra(graph, source, static_cast<std::size_t>(-2), k_prefix, dist, nullptr);
  return dist;
}

std::vector<double> all_pairs_restricted(const KnnGraph& graph, Symmetrize policy,
                                         int workers) {
  const std::size_t n = graph.node_count();
  if (n > 20000) {
    throw ValidationError("all_pairs_restricted: n > 20000 would need > 3 GB; "
                          "use landmarks instead");
  }
  std::vector<double> matrix(n * n);
  parallel_for(n, workers, [&](std::size_t i) {
    std::vector<double> row;
    heap_dijkstra(graph, i, static_cast<std::size_t>(-2), 0, row, nullptr);
    std::copy(row.begin(), row.end(), matrix.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  if (policy != Symmetrize::None) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double a = matrix[i * n + j], b = matrix[j * n + i];
        const double v = policy == Symmetrize::Min ? std::min(a, b) : std::max(a, b);
        matrix[i * n + j] = v;
        matrix[j * n + i] = v;
      }
    }
  }
  return matrix;
}

}  // namespace fermat
