#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "fermat/point_cloud.hpp"

namespace fermat {

/// Path-cost exponent. Weights are |q - q'|^alpha with alpha in [1, 64].
struct Alpha {
  double value;
  explicit Alpha(double v);
};

/// |gap|^alpha computed from the squared gap. Integer exponents use
/// repeated squaring so the hot loops avoid std::pow.
double pow_alpha(double squared_gap, double alpha);

/// An ordered particle-index walk through a cloud together with its
/// alpha-cost and Euclidean arc length.
struct FermatPath {
  std::vector<std::size_t> particle_indices;
  double cost = 0.0;
  double arc_length = 0.0;
};

struct PathStats {
  double arc_length = 0.0;
  std::size_t hop_count = 0;
  double max_gap = 0.0;
};

PathStats path_statistics(const FermatPath& path, const PointCloud& cloud);

/// Recompute cost and arc length of an index walk (validates indices and
/// rejects consecutive repeats).
FermatPath make_path(const PointCloud& cloud, std::vector<std::size_t> indices,
                     double alpha);

struct DistanceResult {
  double distance = 0.0;
  FermatPath path;
  bool unreachable = false;
  std::optional<double> scaled;  // n^beta * distance when requested

  static DistanceResult make_unreachable() {
    DistanceResult r;
    r.distance = std::numeric_limits<double>::infinity();
    r.unreachable = true;
    return r;
  }
};

/// Exact sample Fermat distance between arbitrary query points:
/// anchors x and y to their nearest particles, then runs a single-source
/// shortest path over the complete graph with weights |q_i - q_j|^alpha.
/// O(n^2) per query. Coinciding anchors give distance 0.
DistanceResult exact_distance(const PointCloud& cloud, Alpha alpha, PointView x,
                              PointView y);

/// Exact distance between two particles (no anchoring step).
DistanceResult exact_distance_between(const PointCloud& cloud, Alpha alpha,
                                      std::size_t i, std::size_t j);

/// Exact distances from one source particle to every particle
/// (one full dense single-source run; used for landmark columns).
std::vector<double> exact_distances_from(const PointCloud& cloud, Alpha alpha,
                                         std::size_t source);

/// Particles whose exact Fermat distance from q(x) is < t, ascending
/// index order. Single source run with early exit above t.
std::vector<std::size_t> fermat_ball(const PointCloud& cloud, Alpha alpha,
                                     PointView x, double t);

struct LandmarkBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Triangle-inequality sandwich from precomputed landmark distances,
/// dist_to_landmarks[l][q] = D(landmark_l, q):
///   lower = max_l |D(i,l) - D(j,l)|,  upper = min_l D(i,l) + D(j,l).
/// Landmarks with non-finite entries for i or j are skipped; at least
/// one usable landmark is required. The rows must come from a symmetric
/// distance (exact graph, or min-symmetrized restricted).
LandmarkBounds landmark_bounds(const std::vector<std::vector<double>>& dist_to_landmarks,
                               std::size_t i, std::size_t j);

}  // namespace fermat
