#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fermat {

using Vec = std::vector<double>;
using PointView = std::span<const double>;

inline double squared_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double euclidean_distance(PointView a, PointView b) {
  return std::sqrt(squared_distance(a, b));
}

/// Strict lexicographic order on coordinates. Used as the deterministic
/// tie-break whenever two particles are equidistant from a query.
inline bool lex_less(PointView a, PointView b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

/// Three-way comparison of (distance², lexicographic coords, index).
/// Negative means candidate a ranks strictly before b.
inline int compare_candidates(double d2_a, PointView a, std::size_t ia,
                              double d2_b, PointView b, std::size_t ib) {
  if (d2_a < d2_b) return -1;
  if (d2_a > d2_b) return 1;
  if (lex_less(a, b)) return -1;
  if (lex_less(b, a)) return 1;
  if (ia < ib) return -1;
  if (ia > ib) return 1;
  return 0;
}

}  // namespace fermat
