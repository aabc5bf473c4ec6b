#include "fermat/curve_metric.hpp"

#include <algorithm>
#include <cmath>

#include "fermat/errors.hpp"

namespace fermat {

namespace {

void validate_curve(const Polyline& c, const char* name) {
  if (c.empty()) throw ValidationError(std::string(name) + ": empty polyline");
  const std::size_t d = c.front().size();
  if (d == 0) throw ValidationError(std::string(name) + ": zero-dimensional vertex");
  for (const auto& v : c) {
    if (v.size() != d) throw ValidationError(std::string(name) + ": mixed vertex dimensions");
  }
}

}  // namespace

Polyline resample_uniform(const Polyline& curve, int resolution) {
  validate_curve(curve, "resample_uniform");
  if (resolution < 2) throw ValidationError("resample_uniform: resolution must be >= 2");
  const std::size_t m = curve.size();
  std::vector<double> cum(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    cum[i] = cum[i - 1] + euclidean_distance(curve[i - 1], curve[i]);
  }
  const double total = cum.back();
  Polyline out(static_cast<std::size_t>(resolution));
  if (total == 0.0) {
    std::fill(out.begin(), out.end(), curve.front());
    return out;
  }
  std::size_t seg = 1;
  for (int i = 0; i < resolution; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(resolution - 1);
    while (seg < m - 1 && cum[seg] < s) ++seg;
    const double lo = cum[seg - 1], hi = cum[seg];
    const double t = hi > lo ? (s - lo) / (hi - lo) : 0.0;
    Vec p(curve[seg].size());
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] = curve[seg - 1][j] + t * (curve[seg][j] - curve[seg - 1][j]);
    }
    out[static_cast<std::size_t>(i)] = std::move(p);
  }
  return out;
}

double discrete_frechet(const Polyline& a, const Polyline& b) {
  validate_curve(a, "discrete_frechet");
  validate_curve(b, "discrete_frechet");
  if (a.front().size() != b.front().size()) {
    throw ValidationError("discrete_frechet: dimension mismatch");
  }
  const std::size_t n = a.size(), m = b.size();
  // Row-rolling DP of ca(i,j) = max(|a_i-b_j|, min(ca(i-1,j), ca(i-1,j-1), ca(i,j-1))).
  std::vector<double> prev(m), cur(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double d = euclidean_distance(a[0], b[j]);
    prev[j] = j == 0 ? d : std::max(prev[j - 1], d);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = euclidean_distance(a[i], b[j]);
      double reach = prev[j];
      if (j > 0) {
        reach = std::min(reach, std::min(prev[j - 1], cur[j - 1]));
      }
      cur[j] = std::max(reach, d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

namespace {

/// Orient so the lexicographically smaller endpoint comes first. A curve
/// and its reversal then resample to identical point lists, making
/// d(gamma, reversed gamma) exactly zero.
Polyline canonical_orientation(const Polyline& c) {
  if (c.size() >= 2 && lex_less(c.back(), c.front())) {
    return Polyline(c.rbegin(), c.rend());
  }
  return c;
}

}  // namespace

CurveMetricValue curve_distance(const Polyline& gamma1, const Polyline& gamma2,
                                int resolution) {
  const Polyline a = resample_uniform(canonical_orientation(gamma1), resolution);
  Polyline b = resample_uniform(canonical_orientation(gamma2), resolution);
  const double forward = discrete_frechet(a, b);
  std::reverse(b.begin(), b.end());
  const double backward = discrete_frechet(a, b);
  return CurveMetricValue{std::min(forward, backward)};
}

}  // namespace fermat
