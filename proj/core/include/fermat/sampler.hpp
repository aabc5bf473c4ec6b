#pragma once

#include <cstdint>
#include <optional>

#include "fermat/domain.hpp"
#include "fermat/point_cloud.hpp"

namespace fermat {

enum class Provenance {
  PoissonHomogeneous,
  PoissonInhomogeneous,
  IidDensity,
  IidManifold,
};

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

/// One generated cloud plus everything needed to regenerate it
/// bit-identically: the seed, the intended size parameter, and how it
/// was produced. Manifold batches also retain the parameter-space cloud
/// for ground-truth comparisons.
struct SampleBatch {
  PointCloud cloud;
  double n_target;
  std::uint64_t seed;
  Provenance provenance;
  std::optional<PointCloud> parameter_cloud;
};

/// Poisson point process with intensity n*f on the domain, realized by
/// thinning a homogeneous process on the bounding box: N ~ Poisson(n *
/// M_f * vol(box)) uniform points, each kept with probability
/// contains(x) * f(x) / M_f. Exact, and monotone in f under a shared
/// seed. Throws NumericalError if f(x) > M_f is observed.
SampleBatch sample_poisson(const DomainSpec& domain, const DensityField& intensity,
                           double n, std::uint64_t seed);

/// Exactly n i.i.d. points with density f via rejection sampling under
/// the constant envelope M_f. The density must integrate to 1 on S;
/// this is verified by midpoint quadrature when dim <= 3 (5% slack).
SampleBatch sample_iid(const DomainSpec& domain, const DensityField& density,
                       std::size_t n, std::uint64_t seed);

/// n i.i.d. parameter points with the chart density, pushed through the
/// isometric chart into ambient space. The returned batch keeps the
/// parameter cloud. Throws NumericalError if the chart produces
/// non-finite coordinates.
SampleBatch sample_manifold(const ManifoldSpec& manifold,
                            const DensityField& density_on_chart, std::size_t n,
                            std::uint64_t seed);

}  // namespace fermat
