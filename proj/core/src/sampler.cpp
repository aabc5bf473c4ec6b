#include "fermat/sampler.hpp"

#include <cmath>
#include <string>

#include "fermat/rng.hpp"

namespace fermat {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::PoissonHomogeneous: return "poisson_homogeneous";
    case Provenance::PoissonInhomogeneous: return "poisson_inhomogeneous";
    case Provenance::IidDensity: return "iid_density";
    case Provenance::IidManifold: return "iid_manifold";
  }
  return "unknown";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "poisson_homogeneous") return Provenance::PoissonHomogeneous;
  if (name == "poisson_inhomogeneous") return Provenance::PoissonInhomogeneous;
  if (name == "iid_density") return Provenance::IidDensity;
  if (name == "iid_manifold") return Provenance::IidManifold;
  throw ValidationError("unknown provenance: " + name);
}

namespace {

void draw_uniform_in_box(Rng& rng, const DomainSpec& domain, Vec& out) {
  for (std::size_t j = 0; j < domain.lo.size(); ++j) {
    out[j] = rng.uniform(domain.lo[j], domain.hi[j]);
  }
}

/// Midpoint-rule integral of f over the domain (mass check for iid).
double quadrature_mass(const DomainSpec& domain, const DensityField& density) {
  const int d = domain.dim();
  const int cells = d == 1 ? 4096 : (d == 2 ? 256 : 64);
  Vec x(static_cast<std::size_t>(d));
  double cell_vol = 1.0;
  for (int j = 0; j < d; ++j) {
    cell_vol *= (domain.hi[static_cast<std::size_t>(j)] - domain.lo[static_cast<std::size_t>(j)]) / cells;
  }
  std::size_t total = 1;
  for (int j = 0; j < d; ++j) total *= static_cast<std::size_t>(cells);
  double sum = 0.0;
  for (std::size_t lin = 0; lin < total; ++lin) {
    std::size_t rem = lin;
    for (int j = 0; j < d; ++j) {
      const std::size_t ij = rem % static_cast<std::size_t>(cells);
      rem /= static_cast<std::size_t>(cells);
      const double w = domain.hi[static_cast<std::size_t>(j)] - domain.lo[static_cast<std::size_t>(j)];
      x[static_cast<std::size_t>(j)] =
          domain.lo[static_cast<std::size_t>(j)] + (static_cast<double>(ij) + 0.5) * w / cells;
    }
    if (domain.contains(x)) sum += density.evaluate(x);
  }
  return sum * cell_vol;
}

}  // namespace

SampleBatch sample_poisson(const DomainSpec& domain, const DensityField& intensity,
                           double n, std::uint64_t seed) {
  if (!(n > 0.0)) throw ValidationError("sample_poisson: n must be positive");
  intensity.validate();
  Rng rng(Rng::derive(seed, "sample_poisson"));
  const double envelope = n * intensity.upper_bound * domain.box_volume();
  const std::uint64_t total = rng.poisson(envelope);
  const int d = domain.dim();
  std::vector<double> kept;
  Vec x(static_cast<std::size_t>(d));
  for (std::uint64_t i = 0; i < total; ++i) {
    draw_uniform_in_box(rng, domain, x);
    const double u = rng.uniform();
    if (!domain.contains(x)) continue;
    const double f = intensity.evaluate(x);
    if (f > intensity.upper_bound) {
      throw NumericalError("sample_poisson: intensity exceeds its upper bound M_f");
    }
    if (u * intensity.upper_bound < f) {
      kept.insert(kept.end(), x.begin(), x.end());
    }
  }
  const Provenance prov = intensity.is_constant() ? Provenance::PoissonHomogeneous
                                                  : Provenance::PoissonInhomogeneous;
  return SampleBatch{PointCloud(std::move(kept), d), n, seed, prov, std::nullopt};
}

SampleBatch sample_iid(const DomainSpec& domain, const DensityField& density,
                       std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample_iid: n must be positive");
  density.validate();
  if (domain.dim() <= 3) {
    const double mass = quadrature_mass(domain, density);
    if (std::abs(mass - 1.0) > 0.05) {
      throw ValidationError("sample_iid: density mass on S is " + std::to_string(mass) +
                            ", expected 1 (did you forget to normalize?)");
    }
  }
  Rng rng(Rng::derive(seed, "sample_iid"));
  const int d = domain.dim();
  std::vector<double> kept;
  kept.reserve(n * static_cast<std::size_t>(d));
  Vec x(static_cast<std::size_t>(d));
  std::size_t accepted = 0;
  std::uint64_t window_attempts = 0;
  while (accepted < n) {
    draw_uniform_in_box(rng, domain, x);
    const double u = rng.uniform();
    ++window_attempts;
    bool ok = false;
    if (domain.contains(x)) {
      const double f = density.evaluate(x);
      if (f > density.upper_bound) {
        throw NumericalError("sample_iid: density exceeds its upper bound M_f");
      }
      ok = u * density.upper_bound < f;
    }
    if (ok) {
      kept.insert(kept.end(), x.begin(), x.end());
      ++accepted;
      window_attempts = 0;
    } else if (window_attempts >= 4'000'000) {
      // 4e6 straight rejections: acceptance rate below 1e-6.
      throw NumericalError("sample_iid: rejection acceptance rate below 1e-6");
    }
  }
  return SampleBatch{PointCloud(std::move(kept), d), static_cast<double>(n), seed,
                     Provenance::IidDensity, std::nullopt};
}

SampleBatch sample_manifold(const ManifoldSpec& manifold,
                            const DensityField& density_on_chart, std::size_t n,
                            std::uint64_t seed) {
  if (manifold.intrinsic_dim < 1 || manifold.ambient_dim < manifold.intrinsic_dim) {
    throw ValidationError("sample_manifold: need 1 <= d <= D");
  }
  SampleBatch params = sample_iid(manifold.parameter_domain, density_on_chart, n,
                                  Rng::derive(seed, "sample_manifold"));
  const std::size_t D = static_cast<std::size_t>(manifold.ambient_dim);
  std::vector<double> ambient;
  ambient.reserve(params.cloud.size() * D);
  for (std::size_t i = 0; i < params.cloud.size(); ++i) {
    const Vec p = manifold.chart(params.cloud.point(i));
    if (p.size() != D) {
      throw ValidationError("sample_manifold: chart output has wrong dimension");
    }
    for (double c : p) {
      if (!std::isfinite(c)) {
        throw NumericalError("sample_manifold: chart produced non-finite coordinates");
      }
    }
    ambient.insert(ambient.end(), p.begin(), p.end());
  }
  return SampleBatch{PointCloud(std::move(ambient), manifold.ambient_dim),
                     static_cast<double>(n), seed, Provenance::IidManifold,
                     std::move(params.cloud)};
}

void check_isometry(const ManifoldSpec& manifold, int probes, std::uint64_t seed,
                    double tol) {
  const int d = manifold.intrinsic_dim;
  const int D = manifold.ambient_dim;
  Rng rng(Rng::derive(seed, "check_isometry"));
  const DomainSpec& dom = manifold.parameter_domain;
  Vec z(static_cast<std::size_t>(d));
  const double step = 1e-5;
  std::vector<Vec> cols(static_cast<std::size_t>(d));
  for (int probe = 0; probe < probes; ++probe) {
    // Keep the central-difference stencil inside the parameter box.
    for (int tries = 0;; ++tries) {
      draw_uniform_in_box(rng, dom, z);
      bool interior = dom.contains(z);
      for (std::size_t j = 0; j < z.size() && interior; ++j) {
        interior = z[j] - step >= dom.lo[j] && z[j] + step <= dom.hi[j];
      }
      if (interior) break;
      if (tries > 100000) throw NumericalError("check_isometry: cannot place probes");
    }
    for (int j = 0; j < d; ++j) {
      Vec zp(z), zm(z);
      zp[static_cast<std::size_t>(j)] += step;
      zm[static_cast<std::size_t>(j)] -= step;
      const Vec fp = manifold.chart(zp);
      const Vec fm = manifold.chart(zm);
      Vec col(static_cast<std::size_t>(D));
      for (int i = 0; i < D; ++i) {
        col[static_cast<std::size_t>(i)] =
            (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * step);
      }
      cols[static_cast<std::size_t>(j)] = std::move(col);
    }
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        double dot = 0.0;
        for (int i = 0; i < D; ++i) {
          dot += cols[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] *
                 cols[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
        }
        const double expect = a == b ? 1.0 : 0.0;
        if (std::abs(dot - expect) > tol) {
          throw NumericalError("check_isometry: J^T J deviates from identity by " +
                               std::to_string(std::abs(dot - expect)));
        }
      }
    }
  }
}

}  // namespace fermat
