#pragma once

#include <functional>
#include <vector>

#include "fermat/errors.hpp"
#include "fermat/geometry.hpp"

namespace fermat {

/// An open set S described by its axis-aligned bounding box plus a
/// membership predicate. Every point with contains(x) true must lie in
/// the box. Connectedness is the caller's contract and is not checked.
struct DomainSpec {
  Vec lo;
  Vec hi;
  std::function<bool(PointView)> contains;

  int dim() const { return static_cast<int>(lo.size()); }

  double box_volume() const {
    double v = 1.0;
    for (std::size_t j = 0; j < lo.size(); ++j) v *= hi[j] - lo[j];
    return v;
  }

  /// Box domain: membership is the box itself.
  static DomainSpec box(Vec lo_, Vec hi_) {
    if (lo_.size() != hi_.size() || lo_.empty()) {
      throw ValidationError("DomainSpec: lo/hi size mismatch");
    }
    for (std::size_t j = 0; j < lo_.size(); ++j) {
      if (!(lo_[j] < hi_[j])) throw ValidationError("DomainSpec: lo must be < hi per axis");
    }
    DomainSpec d;
    d.lo = std::move(lo_);
    d.hi = std::move(hi_);
    d.contains = [lo = d.lo, hi = d.hi](PointView x) {
      for (std::size_t j = 0; j < lo.size(); ++j) {
        if (x[j] < lo[j] || x[j] > hi[j]) return false;
      }
      return true;
    };
    return d;
  }
};

/// Intensity/density f on a domain, with certified bounds
/// 0 < lower_bound <= f <= upper_bound on the domain.
struct DensityField {
  std::function<double(PointView)> evaluate;
  double lower_bound = 1.0;  // m_f
  double upper_bound = 1.0;  // M_f
  DomainSpec domain;

  bool is_constant() const { return lower_bound == upper_bound; }

  void validate() const {
    if (!(lower_bound > 0.0)) throw ValidationError("DensityField: m_f must be > 0");
    if (!(upper_bound >= lower_bound)) {
      throw ValidationError("DensityField: M_f must be >= m_f");
    }
  }
};

/// Isometric chart phi: parameter domain in R^d -> manifold in R^D.
struct ManifoldSpec {
  int intrinsic_dim = 0;
  int ambient_dim = 0;
  std::function<Vec(PointView)> chart;
  DomainSpec parameter_domain;
};

/// Spot-check J_phi(z)^T J_phi(z) = I_d by finite differences at
/// `probes` random parameter points. Throws NumericalError when the
/// worst entry deviates by more than tol.
void check_isometry(const ManifoldSpec& manifold, int probes, std::uint64_t seed,
                    double tol = 1e-6);

}  // namespace fermat
