#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "fermat/catalog.hpp"
#include "fermat/errors.hpp"
#include "fermat/fermat_distance.hpp"
#include "fermat/knn_graph.hpp"
#include "fermat/matrix_io.hpp"
#include "fermat/rng.hpp"
#include "fermat/sampler.hpp"
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

TEST_CASE("alpha validation") {
  CHECK_THROWS_AS(Alpha{0.5}, ValidationError);
  CHECK_THROWS_AS(Alpha{65.0}, ValidationError);
  CHECK_NOTHROW(Alpha{1.0});
  CHECK_NOTHROW(Alpha{64.0});
}

TEST_CASE("pow_alpha agrees with std::pow") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double g2 = rng.uniform() * 2.0;
    for (double a : {1.0, 2.0, 3.0, 5.0, 17.0, 2.5, 63.0}) {
      const double expect = std::pow(std::sqrt(g2), a);
      CHECK(pow_alpha(g2, a) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("hand-checked three-particle line, alpha = 2") {
  const PointCloud cloud({0.0, 0.5, 1.0}, 1);
  const DistanceResult r = exact_distance(cloud, Alpha{2.0}, Vec{0.0}, Vec{1.0});
  CHECK(r.distance == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.path.particle_indices == std::vector<std::size_t>{0, 1, 2});
  CHECK(r.path.arc_length == doctest::Approx(1.0));
  CHECK(r.path.cost == r.distance);
}

TEST_CASE("alpha = 1 reduces to the anchored Euclidean distance") {
  const PointCloud cloud = random_cloud(100, 2, 17);
  Rng rng(18);
  for (int q = 0; q < 100; ++q) {
    const Vec x{rng.uniform(), rng.uniform()};
    const Vec y{rng.uniform(), rng.uniform()};
    const std::size_t ax = voronoi_anchor(cloud, x);
    const std::size_t ay = voronoi_anchor(cloud, y);
    const double expect = euclidean_distance(cloud.point(ax), cloud.point(ay));
    const DistanceResult r = exact_distance(cloud, Alpha{1.0}, x, y);
    CHECK(r.distance == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("coinciding anchors give the zero path") {
  const PointCloud cloud({0.0, 0.0, 1.0, 1.0}, 2);
  const DistanceResult r = exact_distance(cloud, Alpha{3.0}, Vec{0.1, 0.0}, Vec{0.0, 0.1});
  CHECK(r.distance == 0.0);
  CHECK(r.path.particle_indices == std::vector<std::size_t>{0});
  const PathStats st = path_statistics(r.path, cloud);
  CHECK(st.arc_length == 0.0);
  CHECK(st.hop_count == 0);
  CHECK(st.max_gap == 0.0);
}

TEST_CASE("exact distance matches Floyd-Warshall") {
  const PointCloud cloud = random_cloud(50, 2, 23);
  const std::vector<double> fw = oracles::floyd_warshall(cloud, 3.0);
  Rng rng(24);
  for (int q = 0; q < 20; ++q) {
    const std::size_t i = rng.next_u64() % cloud.size();
    const std::size_t j = rng.next_u64() % cloud.size();
    const DistanceResult r = exact_distance_between(cloud, Alpha{3.0}, i, j);
    CHECK(r.distance == doctest::Approx(fw[i * cloud.size() + j]).epsilon(1e-9));
    CHECK(r.path.cost == r.distance);
  }
}

TEST_CASE("kNN graph adjacency invariants") {
  const PointCloud cloud = random_cloud(60, 2, 29);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, 8, Alpha{2.0});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto edges = g.neighbors(i);
    REQUIRE(edges.size() == 8);
    double prev = -1.0;
    for (const auto& e : edges) {
      const double d2 = squared_distance(cloud.point(i), cloud.point(e.target));
      CHECK(e.weight == doctest::Approx(d2).epsilon(1e-12));
      CHECK(d2 >= prev);
      prev = d2;
    }
  }
  // k clamps to n-1.
  const KnnGraph full = KnnGraph::build(cloud, index, 1000, Alpha{2.0});
  CHECK(full.k() == cloud.size() - 1);
}

TEST_CASE("restricted distance on the forced k=1 line") {
  const PointCloud cloud({0.0, 0.5, 1.0}, 1);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, 1, Alpha{2.0});
  // N_1(0.5) ties between 0 and 1; lexicographic order picks 0.
  REQUIRE(g.neighbors(1).size() == 1);
  CHECK(g.neighbors(1)[0].target == 0);
  const DistanceResult r = restricted_distance(g, cloud, Alpha{2.0}, Vec{0.0}, Vec{1.0});
  CHECK(r.unreachable);
  CHECK(std::isinf(r.distance));
  // The exact problem never reports unreachable.
  CHECK_FALSE(exact_distance(cloud, Alpha{2.0}, Vec{0.0}, Vec{1.0}).unreachable);
}

TEST_CASE("restricted equals exact on the complete graph") {
  const PointCloud cloud = random_cloud(40, 2, 31);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, cloud.size() - 1, Alpha{2.0});
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      const DistanceResult e = exact_distance_between(cloud, Alpha{2.0}, i, j);
      const DistanceResult r = restricted_distance_between(g, cloud, i, j);
      if (i <= j) {
        // Same source direction: identical accumulation, identical bits.
        CHECK(r.distance == e.distance);
      } else {
        // The exact search runs from min(i,j); the directed restricted
        // search cannot, so reversed accumulation differs by ulps.
        CHECK(r.distance == doctest::Approx(e.distance).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("all-pairs on the collinear example") {
  const PointCloud cloud({0.0, 1.0, 3.0}, 1);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, 2, Alpha{2.0});
  const std::vector<double> m = all_pairs_restricted(g, Symmetrize::None);
  CHECK(m[0 * 3 + 2] == doctest::Approx(5.0));  // 1 + 4 via the middle point
  CHECK(m[2 * 3 + 0] == doctest::Approx(5.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(m[i * 3 + i] == 0.0);
}

TEST_CASE("all-pairs with k=n-1 matches Floyd-Warshall") {
  const PointCloud cloud = random_cloud(300, 2, 37);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, cloud.size() - 1, Alpha{2.0});
  const std::vector<double> m = all_pairs_restricted(g, Symmetrize::None);
  const std::vector<double> fw = oracles::floyd_warshall(cloud, 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double scale = std::max(1e-30, std::abs(fw[i]));
    worst = std::max(worst, std::abs(m[i] - fw[i]) / scale);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("symmetrization policies") {
  const PointCloud cloud = random_cloud(50, 2, 41);
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, 3, Alpha{2.0});
  const std::vector<double> raw = all_pairs_restricted(g, Symmetrize::None);
  const std::vector<double> mn = all_pairs_restricted(g, Symmetrize::Min);
  const std::vector<double> mx = all_pairs_restricted(g, Symmetrize::Max);
  const std::size_t n = cloud.size();
  bool saw_asymmetry = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (raw[i * n + j] != raw[j * n + i]) saw_asymmetry = true;
      CHECK(mn[i * n + j] == std::min(raw[i * n + j], raw[j * n + i]));
      CHECK(mx[i * n + j] == std::max(raw[i * n + j], raw[j * n + i]));
      CHECK(mn[i * n + j] == mn[j * n + i]);
    }
  }
  // The directed definition genuinely produces asymmetric matrices.
  CHECK(saw_asymmetry);
}

TEST_CASE("metric properties on particles") {
  const PointCloud cloud = random_cloud(120, 2, 43);
  const Alpha alpha{2.0};
  std::vector<std::vector<double>> rows(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    rows[i] = exact_distances_from(cloud, alpha, i);
  }
  Rng rng(44);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t a = rng.next_u64() % cloud.size();
    const std::size_t b = rng.next_u64() % cloud.size();
    const std::size_t c = rng.next_u64() % cloud.size();
    CHECK(rows[a][a] == 0.0);
    CHECK(rows[a][b] == doctest::Approx(rows[b][a]).epsilon(1e-12));
    CHECK(rows[a][c] <= (rows[a][b] + rows[b][c]) * (1.0 + 1e-12) + 1e-300);
  }
}

TEST_CASE("alpha homogeneity under coordinate scaling") {
  const PointCloud cloud = random_cloud(80, 2, 47);
  const double c = 3.7;
  std::vector<double> scaled = cloud.flat();
  for (double& v : scaled) v *= c;
  const PointCloud cloud_scaled(std::move(scaled), 2);
  Rng rng(48);
  for (double a : {1.0, 2.0, 3.5}) {
    for (int q = 0; q < 10; ++q) {
      const std::size_t i = rng.next_u64() % cloud.size();
      const std::size_t j = rng.next_u64() % cloud.size();
      const double d1 = exact_distance_between(cloud, Alpha{a}, i, j).distance;
      const double d2 = exact_distance_between(cloud_scaled, Alpha{a}, i, j).distance;
      CHECK(d2 == doctest::Approx(std::pow(c, a) * d1).epsilon(1e-12));
    }
  }
}

TEST_CASE("adding a particle never increases the distance (anchors pinned)") {
  const PointCloud base = random_cloud(60, 2, 53);
  Rng rng(54);
  const Vec x(base.point(3).begin(), base.point(3).end());
  const Vec y(base.point(40).begin(), base.point(40).end());
  for (int t = 0; t < 20; ++t) {
    std::vector<double> coords = base.flat();
    coords.push_back(rng.uniform());
    coords.push_back(rng.uniform());
    const PointCloud bigger(std::move(coords), 2);
    const double d0 = exact_distance(base, Alpha{2.0}, x, y).distance;
    const double d1 = exact_distance(bigger, Alpha{2.0}, x, y).distance;
    CHECK(d1 <= d0 * (1.0 + 1e-12));
  }
}

TEST_CASE("restriction ordering: more neighbors never cost more") {
  const PointCloud cloud = random_cloud(200, 2, 59);
  const SpatialIndex index(cloud);
  const std::size_t kmax = 24;
  const KnnGraph g = KnnGraph::build(cloud, index, kmax, Alpha{2.0});
  const double exact = exact_distance_between(cloud, Alpha{2.0}, 0, 150).distance;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 2; k <= kmax; k += 2) {
    const DistanceResult r = restricted_distance_between(g, cloud, 0, 150, k);
    CHECK(r.distance <= prev);
    CHECK(r.distance >= exact);
    prev = r.distance;
  }
  const DistanceResult full = restricted_distance_between(
      g, cloud, 0, 150, 0);
  CHECK(full.distance >= exact);
}

TEST_CASE("direct edge bound") {
  const PointCloud cloud = random_cloud(90, 3, 61);
  Rng rng(62);
  for (int q = 0; q < 30; ++q) {
    const Vec x{rng.uniform(), rng.uniform(), rng.uniform()};
    const Vec y{rng.uniform(), rng.uniform(), rng.uniform()};
    const std::size_t ax = voronoi_anchor(cloud, x);
    const std::size_t ay = voronoi_anchor(cloud, y);
    const DistanceResult r = exact_distance(cloud, Alpha{3.0}, x, y);
    const double direct = std::pow(euclidean_distance(cloud.point(ax), cloud.point(ay)), 3.0);
    CHECK(r.distance <= direct * (1.0 + 1e-12));
  }
}

TEST_CASE("fermat ball edge cases") {
  const PointCloud cloud = random_cloud(150, 2, 67);
  const Alpha alpha{2.0};
  const Vec x{0.5, 0.5};
  const std::size_t anchor = voronoi_anchor(cloud, x);

  // Threshold below the cheapest outgoing edge: only the anchor.
  const std::vector<double> row = exact_distances_from(cloud, alpha, anchor);
  double cheapest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i != anchor) cheapest = std::min(cheapest, row[i]);
  }
  CHECK(fermat_ball(cloud, alpha, x, cheapest * 0.5) == std::vector<std::size_t>{anchor});

  // Infinite threshold: everything.
  CHECK(fermat_ball(cloud, alpha, x, std::numeric_limits<double>::infinity()).size() ==
        cloud.size());

  // alpha = 1: the ball is the Euclidean ball around the anchor.
  const double t = 0.3;
  const std::vector<std::size_t> ball1 = fermat_ball(cloud, Alpha{1.0}, x, t);
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (euclidean_distance(cloud.point(anchor), cloud.point(i)) < t) expect.push_back(i);
  }
  CHECK(ball1 == expect);

  CHECK_THROWS_AS(fermat_ball(cloud, alpha, x, 0.0), ValidationError);
}

TEST_CASE("path statistics") {
  const PointCloud cloud({0.0, 0.5, 1.0}, 1);
  const FermatPath p = make_path(cloud, {0, 1, 2}, 2.0);
  const PathStats st = path_statistics(p, cloud);
  CHECK(st.arc_length == doctest::Approx(1.0));
  CHECK(st.hop_count == 2);
  CHECK(st.max_gap == doctest::Approx(0.5));
  CHECK(p.cost == doctest::Approx(0.5));
  CHECK_THROWS_AS(make_path(cloud, {0, 0, 1}, 2.0), ValidationError);
  CHECK_THROWS_AS(make_path(cloud, {}, 2.0), ValidationError);
}

TEST_CASE("landmark bounds") {
  const PointCloud cloud = random_cloud(500, 2, 71);
  const Alpha alpha{2.0};
  Rng rng(72);
  std::vector<std::size_t> landmarks;
  while (landmarks.size() < 20) {
    const std::size_t c = rng.next_u64() % cloud.size();
    if (std::find(landmarks.begin(), landmarks.end(), c) == landmarks.end()) {
      landmarks.push_back(c);
    }
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t l : landmarks) rows.push_back(exact_distances_from(cloud, alpha, l));

  SUBCASE("sandwich holds on random pairs") {
    for (int q = 0; q < 100; ++q) {
      const std::size_t i = rng.next_u64() % cloud.size();
      const std::size_t j = rng.next_u64() % cloud.size();
      const double exact = exact_distance_between(cloud, alpha, i, j).distance;
      const LandmarkBounds b = landmark_bounds(rows, i, j);
      CHECK(b.lower <= exact * (1.0 + 1e-12) + 1e-300);
      CHECK(b.upper >= exact * (1.0 - 1e-12));
      CHECK(b.lower <= b.upper * (1.0 + 1e-12));
    }
  }

  SUBCASE("a landmark that is the endpoint makes both bounds tight") {
    const std::size_t i = 17;
    const std::size_t l = landmarks[4];
    const double exact = exact_distance_between(cloud, alpha, i, l).distance;
    const LandmarkBounds b = landmark_bounds(rows, i, l);
    CHECK(b.lower == doctest::Approx(exact).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(exact).epsilon(1e-12));
  }

  SUBCASE("a landmark on the optimal path makes the upper bound tight") {
    const DistanceResult r = exact_distance_between(cloud, alpha, 3, 444);
    REQUIRE(r.path.particle_indices.size() >= 3);
    const std::size_t mid = r.path.particle_indices[r.path.particle_indices.size() / 2];
    auto rows2 = rows;
    rows2.push_back(exact_distances_from(cloud, alpha, mid));
    const LandmarkBounds b = landmark_bounds(rows2, 3, 444);
    CHECK(b.upper == doctest::Approx(r.distance).epsilon(1e-12));
  }

  SUBCASE("empty landmark set is rejected") {
    CHECK_THROWS_AS(landmark_bounds({}, 0, 1), ValidationError);
  }
}

TEST_CASE("distance matrix round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "fermat_test_core";
  std::filesystem::create_directories(dir);
  const std::size_t n = 7;
  std::vector<double> m(n * n);
  Rng rng(73);
  for (double& v : m) v = rng.uniform();
  m[5] = std::numeric_limits<double>::infinity();  // unreachable entry

  save_matrix_csv(m, n, dir / "m.csv");
  const auto [mc, nc] = load_matrix_csv(dir / "m.csv");
  REQUIRE(nc == n);
  CHECK(mc == m);

  save_matrix_binary(m, n, dir / "m.bin");
  const auto [mb, nb] = load_matrix_binary(dir / "m.bin");
  REQUIRE(nb == n);
  CHECK(mb == m);

  // Magic is enforced.
  CHECK_THROWS_AS(load_matrix_binary(dir / "m.csv"), ValidationError);
}

TEST_CASE("k = ceil(10 ln n) restricted search matches exact on >= 99/100 pairs") {
  const Scenario sc = make_scenario("{\"type\":\"uniform\"}");
  const PointCloud cloud = sample_poisson(sc.domain, sc.density, 2000.0, 8181).cloud;
  const std::size_t k =
      static_cast<std::size_t>(std::ceil(10.0 * std::log(static_cast<double>(cloud.size()))));
  const SpatialIndex index(cloud);
  const KnnGraph g = KnnGraph::build(cloud, index, k, Alpha{2.0});
  Rng rng(8182);
  int agree = 0;
  for (int q = 0; q < 100; ++q) {
    const std::size_t i = rng.next_u64() % cloud.size();
    std::size_t j = rng.next_u64() % cloud.size();
    while (j == i) j = rng.next_u64() % cloud.size();
    const double exact = exact_distance_between(cloud, Alpha{2.0}, i, j).distance;
    const DistanceResult r = restricted_distance_between(g, cloud, i, j);
    if (!r.unreachable && r.distance <= exact * (1.0 + 1e-12)) ++agree;
  }
  CHECK(agree >= 99);
}

TEST_CASE("path cost matches an independent recompute") {
  const PointCloud cloud = random_cloud(120, 2, 83);
  Rng rng(84);
  for (double a : {1.0, 2.0, 3.5}) {
    const std::size_t i = rng.next_u64() % cloud.size();
    std::size_t j = rng.next_u64() % cloud.size();
    while (j == i) j = rng.next_u64() % cloud.size();
    const DistanceResult r = exact_distance_between(cloud, Alpha{a}, i, j);
    const FermatPath rebuilt = make_path(cloud, r.path.particle_indices, a);
    CHECK(rebuilt.cost == doctest::Approx(r.distance).epsilon(1e-12));
    CHECK(rebuilt.arc_length == doctest::Approx(r.path.arc_length).epsilon(1e-12));
    CHECK(r.path.arc_length >=
          euclidean_distance(cloud.point(i), cloud.point(j)) * (1.0 - 1e-12));
  }
}

TEST_CASE("weights stay finite at large alpha") {
  const PointCloud cloud = random_cloud(30, 2, 79);
  const DistanceResult r = exact_distance_between(cloud, Alpha{64.0}, 0, 29);
  CHECK(std::isfinite(r.distance));
  CHECK(r.distance >= 0.0);
}
