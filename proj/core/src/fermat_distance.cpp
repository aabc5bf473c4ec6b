#include "fermat/fermat_distance.hpp"

#include <algorithm>
#include <cmath>

#include "fermat/errors.hpp"

namespace fermat {

Alpha::Alpha(double v) : value(v) {
  if (!std::isfinite(v) || v < 1.0 || v > 64.0) {
    throw ValidationError("alpha must be a finite value in [1, 64]");
  }
}

double pow_alpha(double squared_gap, double alpha) {
  if (alpha == 2.0) return squared_gap;
  if (alpha == 1.0) return std::sqrt(squared_gap);
  const double rounded = std::nearbyint(alpha);
  if (rounded == alpha) {
    // |g|^a = (g^2)^(a/2), odd exponents pick up one sqrt factor.
    auto powi = [](double base, unsigned e) {
      double r = 1.0;
      while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
      }
      return r;
    };
    const unsigned a = static_cast<unsigned>(rounded);
    double r = powi(squared_gap, a / 2u);
    if (a & 1u) r *= std::sqrt(squared_gap);
    return r;
  }
  return std::pow(squared_gap, 0.5 * alpha);
}

PathStats path_statistics(const FermatPath& path, const PointCloud& cloud) {
  PathStats st;
  const auto& idx = path.particle_indices;
  if (idx.empty()) throw ValidationError("path_statistics: empty path");
  for (std::size_t h = 1; h < idx.size(); ++h) {
    const double gap = euclidean_distance(cloud.point(idx[h - 1]), cloud.point(idx[h]));
    st.arc_length += gap;
    st.max_gap = std::max(st.max_gap, gap);
  }
  st.hop_count = idx.size() - 1;
  return st;
}

FermatPath make_path(const PointCloud& cloud, std::vector<std::size_t> indices,
                     double alpha) {
  if (indices.empty()) throw ValidationError("make_path: empty index list");
  FermatPath p;
  for (std::size_t h = 0; h < indices.size(); ++h) {
    if (indices[h] >= cloud.size()) throw ValidationError("make_path: index out of range");
    if (h > 0 && indices[h] == indices[h - 1]) {
      throw ValidationError("make_path: consecutive repeated index");
    }
  }
  for (std::size_t h = 1; h < indices.size(); ++h) {
    const double d2 = squared_distance(cloud.point(indices[h - 1]), cloud.point(indices[h]));
    p.cost += pow_alpha(d2, alpha);
    p.arc_length += std::sqrt(d2);
  }
  p.particle_indices = std::move(indices);
  return p;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense Dijkstra on the implicit complete graph. Runs until `target`
/// is settled (npos: settle everything, or stop once the cheapest
/// unsettled label reaches `stop_at`). Deterministic: the minimum
/// unsettled label is chosen by strict comparison scanning indices in
/// ascending order, and predecessor updates require strict improvement.
struct DenseDijkstra {
  std::vector<double> dist;
  std::vector<std::size_t> pred;
  std::vector<char> settled;

  void run(const PointCloud& cloud, double alpha, std::size_t source,
           std::size_t target, double stop_at = kInf) {
    const std::size_t n = cloud.size();
    dist.assign(n, kInf);
    pred.assign(n, static_cast<std::size_t>(-1));
    settled.assign(n, 0);
    dist[source] = 0.0;
    for (std::size_t round = 0; round < n; ++round) {
      std::size_t u = static_cast<std::size_t>(-1);
      double best = kInf;
      for (std::size_t i = 0; i < n; ++i) {
        if (!settled[i] && dist[i] < best) {
          best = dist[i];
          u = i;
        }
      }
      if (u == static_cast<std::size_t>(-1) || best >= stop_at) break;
      settled[u] = 1;
      if (u == target) return;
      const PointView pu = cloud.point(u);
      const double du = dist[u];
      for (std::size_t v = 0; v < n; ++v) {
        if (settled[v]) continue;
        const double w = pow_alpha(squared_distance(pu, cloud.point(v)), alpha);
        const double nd = du + w;
        if (nd < dist[v]) {
          dist[v] = nd;
          pred[v] = u;
        }
      }
    }
  }

  std::vector<std::size_t> extract_path(std::size_t source, std::size_t target) const {
    std::vector<std::size_t> rev;
    for (std::size_t v = target; v != static_cast<std::size_t>(-1); v = pred[v]) {
      rev.push_back(v);
      if (v == source) break;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
  }
};

DistanceResult result_from_dense(const DenseDijkstra& dd, const PointCloud& cloud,
                                 std::size_t source, std::size_t target) {
  DistanceResult r;
  r.distance = dd.dist[target];
  FermatPath p;
  p.particle_indices = dd.extract_path(source, target);
  p.cost = r.distance;
  for (std::size_t h = 1; h < p.particle_indices.size(); ++h) {
    p.arc_length += euclidean_distance(cloud.point(p.particle_indices[h - 1]),
                                       cloud.point(p.particle_indices[h]));
  }
  r.path = std::move(p);
  return r;
}

}  // namespace

DistanceResult exact_distance_between(const PointCloud& cloud, Alpha alpha,
                                      std::size_t i, std::size_t j) {
  if (cloud.empty()) throw ValidationError("exact_distance: empty cloud");
  if (i >= cloud.size() || j >= cloud.size()) {
    throw ValidationError("exact_distance: particle index out of range");
  }
  if (i == j) {
    DistanceResult r;
    r.distance = 0.0;
    r.path.particle_indices = {i};
    return r;
  }
  // Canonical source (smaller index) makes D(i,j) == D(j,i) bit-exact on
  // the undirected complete graph.
  const std::size_t src = std::min(i, j);
  const std::size_t dst = std::max(i, j);
  DenseDijkstra dd;
  dd.run(cloud, alpha.value, src, dst);
  DistanceResult r = result_from_dense(dd, cloud, src, dst);
  if (!std::isfinite(r.distance)) {
    throw NumericalError("exact_distance: weight overflow (gap^alpha not finite)");
  }
  if (src != i) {
    std::reverse(r.path.particle_indices.begin(), r.path.particle_indices.end());
  }
  return r;
}

DistanceResult exact_distance(const PointCloud& cloud, Alpha alpha, PointView x,
                              PointView y) {
  const std::size_t sx = voronoi_anchor(cloud, x);
  const std::size_t sy = voronoi_anchor(cloud, y);
  return exact_distance_between(cloud, alpha, sx, sy);
}

std::vector<double> exact_distances_from(const PointCloud& cloud, Alpha alpha,
                                         std::size_t source) {
  if (source >= cloud.size()) {
    throw ValidationError("exact_distances_from: source out of range");
  }
  DenseDijkstra dd;
  dd.run(cloud, alpha.value, source, static_cast<std::size_t>(-2));
  return std::move(dd.dist);
}

std::vector<std::size_t> fermat_ball(const PointCloud& cloud, Alpha alpha,
                                     PointView x, double t) {
  if (!(t > 0.0)) throw ValidationError("fermat_ball: t must be positive");
  const std::size_t src = voronoi_anchor(cloud, x);
  DenseDijkstra dd;
  if (std::isfinite(t)) {
    dd.run(cloud, alpha.value, src, static_cast<std::size_t>(-2), t);
  } else {
    dd.run(cloud, alpha.value, src, static_cast<std::size_t>(-2));
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (dd.settled[i] && dd.dist[i] < t) out.push_back(i);
  }
  return out;
}

LandmarkBounds landmark_bounds(const std::vector<std::vector<double>>& dist_to_landmarks,
                               std::size_t i, std::size_t j) {
  if (dist_to_landmarks.empty()) throw ValidationError("landmark_bounds: no landmarks");
  LandmarkBounds b{0.0, kInf};
  std::size_t usable = 0;
  for (const auto& row : dist_to_landmarks) {
    if (i >= row.size() || j >= row.size()) {
      throw ValidationError("landmark_bounds: particle index out of range");
    }
    const double di = row[i], dj = row[j];
    if (!std::isfinite(di) || !std::isfinite(dj)) continue;
    ++usable;
    b.lower = std::max(b.lower, std::abs(di - dj));
    b.upper = std::min(b.upper, di + dj);
  }
  if (usable == 0) throw ValidationError("landmark_bounds: no usable landmarks (all unreachable)");
  return b;
}

}  // namespace fermat
