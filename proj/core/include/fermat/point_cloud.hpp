#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "fermat/geometry.hpp"

namespace fermat {

/// A finite set of particles in R^D, immutable after construction.
/// Particle i keeps its index for the lifetime of the cloud; every
/// operation in the library identifies particles by these indices.
class PointCloud {
 public:
  /// Takes flat row-major coordinates (size must be a multiple of dim).
  PointCloud(std::vector<double> coords, int dim);

  static PointCloud from_rows(const std::vector<Vec>& rows);

  int dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return coords_.empty(); }

  PointView point(std::size_t i) const {
    return PointView(coords_.data() + i * static_cast<std::size_t>(dim_),
                     static_cast<std::size_t>(dim_));
  }
  double coord(std::size_t i, int j) const {
    return coords_[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(j)];
  }
  const std::vector<double>& flat() const { return coords_; }

  /// Axis-aligned bounding box (lo, hi). Requires a non-empty cloud.
  std::pair<Vec, Vec> bounding_box() const;

  /// One row per point, dim columns, no header, '.' decimal separator.
  /// The loader infers the dimension from the first row and rejects
  /// ragged rows and non-finite values.
  static PointCloud load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

 private:
  std::vector<double> coords_;
  int dim_;
};

/// Index of the particle closest to x in Euclidean distance; ties are
/// broken by lexicographic coordinate order, then by lowest index.
std::size_t voronoi_anchor(const PointCloud& cloud, PointView x);

}  // namespace fermat
