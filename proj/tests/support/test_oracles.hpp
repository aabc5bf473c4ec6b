// Independent reference implementations used only by tests. These must
// stay decoupled from the library's algorithm paths: brute-force scans,
// Floyd-Warshall, quadrature, closed-form CDFs, golden-section search.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "fermat/point_cloud.hpp"

namespace oracles {

/// k nearest indices by full scan; ties by (distance, lex coords, index).
inline std::vector<std::size_t> brute_knn(const fermat::PointCloud& cloud,
                                          fermat::PointView x, std::size_t k,
                                          std::size_t exclude = static_cast<std::size_t>(-1)) {
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i != exclude) ids.push_back(i);
  }
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    const double da = fermat::squared_distance(cloud.point(a), x);
    const double db = fermat::squared_distance(cloud.point(b), x);
    if (da != db) return da < db;
    if (fermat::lex_less(cloud.point(a), cloud.point(b))) return true;
    if (fermat::lex_less(cloud.point(b), cloud.point(a))) return false;
    return a < b;
  });
  ids.resize(std::min(k, ids.size()));
  return ids;
}

/// All-pairs shortest paths on the complete graph with |q-q'|^alpha
/// weights, by Floyd-Warshall. O(n^3); keep n <= 500.
inline std::vector<double> floyd_warshall(const fermat::PointCloud& cloud, double alpha) {
  const std::size_t n = cloud.size();
  std::vector<double> d(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = i == j ? 0.0
                            : std::pow(fermat::euclidean_distance(cloud.point(i), cloud.point(j)),
                                       alpha);
    }
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dim_ = d[i * n + m];
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dim_ + d[m * n + j];
        if (via < d[i * n + j]) d[i * n + j] = via;
      }
    }
  }
  return d;
}

/// Midpoint quadrature of f over an axis-aligned box (d <= 3).
inline double quadrature(const std::function<double(fermat::PointView)>& f,
                         const fermat::Vec& lo, const fermat::Vec& hi, int cells) {
  const std::size_t d = lo.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < d; ++j) total *= static_cast<std::size_t>(cells);
  double cell_vol = 1.0;
  for (std::size_t j = 0; j < d; ++j) cell_vol *= (hi[j] - lo[j]) / cells;
  fermat::Vec x(d);
  double sum = 0.0;
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t ij = rem % static_cast<std::size_t>(cells);
      rem /= static_cast<std::size_t>(cells);
      x[j] = lo[j] + (static_cast<double>(ij) + 0.5) * (hi[j] - lo[j]) / cells;
    }
    sum += f(x);
  }
  return sum * cell_vol;
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

/// CDF of a Gaussian mixture truncated to [lo, hi].
inline double truncated_mixture_cdf(double x, const std::vector<double>& means,
                                    const std::vector<double>& sds,
                                    const std::vector<double>& weights, double lo,
                                    double hi) {
  double mass = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    mass += weights[i] * (normal_cdf(hi, means[i], sds[i]) - normal_cdf(lo, means[i], sds[i]));
    acc += weights[i] * (normal_cdf(std::min(x, hi), means[i], sds[i]) -
                         normal_cdf(lo, means[i], sds[i]));
  }
  if (x < lo) return 0.0;
  return acc / mass;
}

/// Kolmogorov-Smirnov statistic of sorted samples against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

/// Golden-section minimizer on [a, b].
inline double golden_section(const std::function<double(double)>& f, double a, double b,
                             int iters = 200) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Cheapest two-media crossing cost: media split by the horizontal line
/// y = thr, speed-like factors a^-beta below and b^-beta above; the
/// optimal polyline is straight within each medium, so minimizing over
/// the crossing abscissa t is exact.
inline double snell_cost(const fermat::Vec& x, const fermat::Vec& y, double thr, double a,
                         double b, double beta, double lo, double hi) {
  const double wa = std::pow(a, -beta), wb = std::pow(b, -beta);
  auto cost = [&](double t) {
    const double below = std::hypot(t - x[0], thr - x[1]);
    const double above = std::hypot(y[0] - t, y[1] - thr);
    return wa * below + wb * above;
  };
  const double t_star = golden_section(cost, lo, hi);
  return cost(t_star);
}

}  // namespace oracles
