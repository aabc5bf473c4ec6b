#include "fermat/point_cloud.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "fermat/csvio.hpp"
#include "fermat/errors.hpp"

namespace fermat {

PointCloud::PointCloud(std::vector<double> coords, int dim)
    : coords_(std::move(coords)), dim_(dim) {
  if (dim_ < 1) throw ValidationError("PointCloud: dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dim_) != 0) {
    throw ValidationError("PointCloud: coordinate count not a multiple of dim");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw ValidationError("PointCloud: non-finite coordinate");
  }
}

PointCloud PointCloud::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) throw ValidationError("PointCloud: no rows given");
  const std::size_t d = rows.front().size();
  if (d == 0) throw ValidationError("PointCloud: zero-dimensional row");
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw ValidationError("PointCloud: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return PointCloud(std::move(flat), static_cast<int>(d));
}

std::pair<Vec, Vec> PointCloud::bounding_box() const {
  if (empty()) throw ValidationError("PointCloud: bounding box of empty cloud");
  Vec lo(point(0).begin(), point(0).end());
  Vec hi = lo;
  for (std::size_t i = 1; i < size(); ++i) {
    PointView p = point(i);
    for (int j = 0; j < dim_; ++j) {
      lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)]);
      hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)]);
    }
  }
  return {lo, hi};
}

PointCloud PointCloud::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open point cloud file: " + path.string());
  std::vector<double> flat;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<double> row = parse_csv_doubles(line);
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": non-finite coordinate");
      }
    }
    if (dim == 0) {
      dim = row.size();
      if (dim == 0) throw ValidationError(path.string() + ": first row has no columns");
    } else if (row.size() != dim) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": ragged row (expected " + std::to_string(dim) +
                            " columns, got " + std::to_string(row.size()) + ")");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  if (flat.empty()) throw ValidationError(path.string() + ": no points in file");
  return PointCloud(std::move(flat), static_cast<int>(dim));
}

void PointCloud::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write point cloud file: " + path.string());
  for (std::size_t i = 0; i < size(); ++i) {
    PointView p = point(i);
    for (int j = 0; j < dim_; ++j) {
      if (j) out << ',';
      out << format_double(p[static_cast<std::size_t>(j)]);
    }
    out << '\n';
  }
}

std::size_t voronoi_anchor(const PointCloud& cloud, PointView x) {
  if (cloud.empty()) throw ValidationError("voronoi_anchor: empty cloud");
  if (static_cast<int>(x.size()) != cloud.dim()) {
    throw ValidationError("voronoi_anchor: query dimension mismatch");
  }
  std::size_t best = 0;
  double best_d2 = squared_distance(cloud.point(0), x);
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const double d2 = squared_distance(cloud.point(i), x);
    if (compare_candidates(d2, cloud.point(i), i, best_d2, cloud.point(best), best) < 0) {
      best = i;
      best_d2 = d2;
    }
  }
  return best;
}

}  // namespace fermat
