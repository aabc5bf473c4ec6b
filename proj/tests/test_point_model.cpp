#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fermat/curve_metric.hpp"
#include "fermat/errors.hpp"
#include "fermat/point_cloud.hpp"
#include "fermat/rng.hpp"
#include "fermat/spatial_index.hpp"
#include "support/test_oracles.hpp"

using namespace fermat;

namespace {

PointCloud random_cloud(std::size_t n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> coords(n * static_cast<std::size_t>(dim));
  for (double& c : coords) c = rng.uniform();
  return PointCloud(std::move(coords), dim);
}

}  // namespace

TEST_CASE("single point cloud answers every query with that point") {
  const PointCloud cloud({0.3, 0.4}, 2);
  const SpatialIndex index(cloud);
  CHECK(index.nearest(Vec{100.0, -5.0}) == 0);
  CHECK(voronoi_anchor(cloud, Vec{0.0, 0.0}) == 0);
}

TEST_CASE("nearest picks the strictly closer particle") {
  const PointCloud cloud({0.0, 0.0, 1.0, 0.0}, 2);
  const SpatialIndex index(cloud);
  CHECK(index.nearest(Vec{0.4, 0.0}) == 0);
  CHECK(voronoi_anchor(cloud, Vec{0.4, 0.0}) == 0);
}

TEST_CASE("voronoi anchor basics and tie-break") {
  const PointCloud cloud({0.0, 0.0, 2.0, 0.0}, 2);
  CHECK(voronoi_anchor(cloud, Vec{0.1, 0.0}) == 0);
  CHECK(voronoi_anchor(cloud, Vec{2.0, 0.0}) == 1);  // coincides with a particle
  // Equidistant: lexicographically smaller coordinates win.
  CHECK(voronoi_anchor(cloud, Vec{1.0, 0.0}) == 0);
  CHECK_THROWS_AS(voronoi_anchor(cloud, Vec{1.0}), ValidationError);
}

TEST_CASE("duplicated particles are allowed and tie-break by index") {
  const PointCloud cloud({0.5, 0.5, 0.5, 0.5, 0.9, 0.9}, 2);
  CHECK(voronoi_anchor(cloud, Vec{0.5, 0.5}) == 0);
  const SpatialIndex index(cloud);
  const auto nn = index.knn(1, 2);  // duplicate at distance 0 comes first
  CHECK(nn == std::vector<std::size_t>{0, 2});
}

TEST_CASE("knn on the collinear example cloud") {
  const PointCloud cloud({0.0, 1.0, 3.0}, 1);
  const SpatialIndex index(cloud);
  CHECK(index.knn(0, 2) == std::vector<std::size_t>{1, 2});
  CHECK(index.knn(1, 2) == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(index.knn(0, 3), ValidationError);  // k must be <= n-1
  const auto all = index.knn(2, 2);                   // k = n-1 exhaustive
  CHECK(all == std::vector<std::size_t>{1, 0});
}

TEST_CASE("kd-tree matches the brute-force scan oracle") {
  SUBCASE("100 uniform points in [0,1]^2, 50 queries, k=5") {
    const PointCloud cloud = random_cloud(100, 2, 11);
    const SpatialIndex index(cloud);
    Rng rng(12);
    for (int q = 0; q < 50; ++q) {
      const Vec x{rng.uniform(), rng.uniform()};
      CHECK(index.knn_point(x, 5) == oracles::brute_knn(cloud, x, 5));
      CHECK(index.nearest(x) == oracles::brute_knn(cloud, x, 1)[0]);
      CHECK(voronoi_anchor(cloud, x) == oracles::brute_knn(cloud, x, 1)[0]);
    }
  }
  SUBCASE("200 random points in [0,1]^3, every particle, k=10") {
    const PointCloud cloud = random_cloud(200, 3, 13);
    const SpatialIndex index(cloud);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK(index.knn(i, 10) == oracles::brute_knn(cloud, cloud.point(i), 10, i));
    }
  }
  SUBCASE("high dimension falls back to scans and stays exact") {
    const PointCloud cloud = random_cloud(80, 20, 14);
    const SpatialIndex index(cloud);
    Rng rng(15);
    std::vector<double> x(20);
    for (double& c : x) c = rng.uniform();
    CHECK(index.knn_point(x, 7) == oracles::brute_knn(cloud, x, 7));
  }
}

TEST_CASE("knn ordering properties") {
  const PointCloud cloud = random_cloud(150, 2, 21);
  const SpatialIndex index(cloud);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto k5 = index.knn(i, 5);
    const auto k6 = index.knn(i, 6);
    // Prefix property: knn(k) is the first k entries of knn(k+1).
    CHECK(std::equal(k5.begin(), k5.end(), k6.begin()));
    // Distances nondecreasing along the list.
    for (std::size_t h = 1; h < k6.size(); ++h) {
      CHECK(squared_distance(cloud.point(k6[h - 1]), cloud.point(i)) <=
            squared_distance(cloud.point(k6[h]), cloud.point(i)));
    }
  }
  // Anchor minimality, assertable by scan.
  Rng rng(22);
  for (int q = 0; q < 25; ++q) {
    const Vec x{rng.uniform(), rng.uniform()};
    const std::size_t a = voronoi_anchor(cloud, x);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK(squared_distance(cloud.point(a), x) <= squared_distance(cloud.point(i), x));
    }
  }
}

TEST_CASE("spatial index rejects empty clouds") {
  CHECK_THROWS_AS(PointCloud({}, 0), ValidationError);
  const PointCloud empty({}, 2);
  CHECK(empty.empty());
  CHECK_THROWS_AS(SpatialIndex{empty}, ValidationError);
  CHECK_THROWS_AS(voronoi_anchor(empty, Vec{0.0, 0.0}), ValidationError);
}

// ---------------------------------------------------------------------
// curve metric

TEST_CASE("curve distance trivial cases") {
  const Polyline seg{{0.0, 0.0}, {1.0, 0.0}};
  CHECK(curve_distance(seg, seg, 64).value == 0.0);

  const Polyline shifted{{0.0, 1.0}, {1.0, 1.0}};
  CHECK(curve_distance(seg, shifted, 64).value == doctest::Approx(1.0));

  // A segment and its reversal trace the same curve.
  const Polyline reversed{{1.0, 0.0}, {0.0, 0.0}};
  CHECK(curve_distance(seg, reversed, 64).value == 0.0);

  CHECK_THROWS_AS(curve_distance({}, seg, 64), ValidationError);
  CHECK_THROWS_AS(curve_distance(seg, seg, 1), ValidationError);
}

TEST_CASE("curve distance handles single-vertex curves") {
  const Polyline dot{{0.5, 0.5}};
  const Polyline seg{{0.0, 0.5}, {1.0, 0.5}};
  CHECK(curve_distance(dot, dot, 16).value == 0.0);
  CHECK(curve_distance(dot, seg, 16).value == doctest::Approx(0.5));
}

namespace {

Polyline random_polyline(Rng& rng, int vertices) {
  Polyline p;
  for (int i = 0; i < vertices; ++i) p.push_back({rng.uniform(), rng.uniform()});
  return p;
}

}  // namespace

TEST_CASE("curve distance is symmetric and satisfies the triangle inequality") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const Polyline a = random_polyline(rng, 2 + static_cast<int>(rng.next_u64() % 6));
    const Polyline b = random_polyline(rng, 2 + static_cast<int>(rng.next_u64() % 6));
    const Polyline c = random_polyline(rng, 2 + static_cast<int>(rng.next_u64() % 6));
    const double ab = curve_distance(a, b, 96).value;
    const double ba = curve_distance(b, a, 96).value;
    CHECK(ab == ba);  // exact by construction
    const double ac = curve_distance(a, c, 96).value;
    const double cb = curve_distance(c, b, 96).value;
    CHECK(ab <= ac + cb + 1e-12);
  }
}

TEST_CASE("resampling refinement converges for polygonal curves") {
  const Polyline zig{{0.0, 0.0}, {0.3, 0.4}, {0.6, -0.2}, {1.0, 0.1}};
  const Polyline chord{{0.0, 0.0}, {1.0, 0.1}};
  const double coarse = curve_distance(zig, chord, 16).value;
  const double fine = curve_distance(zig, chord, 512).value;
  // True sup distance is attained at a vertex; refinement must approach it.
  CHECK(std::abs(fine - coarse) < 0.05);
  const double finer = curve_distance(zig, chord, 1024).value;
  CHECK(std::abs(finer - fine) < 1e-3);
}

// ---------------------------------------------------------------------
// CSV round trip

TEST_CASE("point cloud CSV round trip is exact") {
  const auto dir = std::filesystem::temp_directory_path() / "fermat_test_pm";
  std::filesystem::create_directories(dir);
  const PointCloud cloud = random_cloud(57, 3, 41);
  const auto path = dir / "cloud.csv";
  cloud.save_csv(path);
  const PointCloud loaded = PointCloud::load_csv(path);
  REQUIRE(loaded.size() == cloud.size());
  REQUIRE(loaded.dim() == cloud.dim());
  CHECK(loaded.flat() == cloud.flat());  // shortest round-trip formatting
}

TEST_CASE("point cloud CSV loader rejects bad input") {
  const auto dir = std::filesystem::temp_directory_path() / "fermat_test_pm";
  std::filesystem::create_directories(dir);

  const auto ragged = dir / "ragged.csv";
  std::ofstream(ragged) << "0.1,0.2\n0.3\n";
  CHECK_THROWS_AS(PointCloud::load_csv(ragged), ValidationError);

  const auto empty = dir / "empty.csv";
  std::ofstream(empty) << "";
  CHECK_THROWS_AS(PointCloud::load_csv(empty), ValidationError);

  const auto junk = dir / "junk.csv";
  std::ofstream(junk) << "0.1,abc\n";
  CHECK_THROWS_AS(PointCloud::load_csv(junk), ValidationError);

  const auto nonfinite = dir / "nonfinite.csv";
  std::ofstream(nonfinite) << "0.1,inf\n";
  CHECK_THROWS_AS(PointCloud::load_csv(nonfinite), ValidationError);
}
