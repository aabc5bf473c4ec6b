#include <benchmark/benchmark.h>

#include "fermat/fermat_distance.hpp"
#include "fermat/knn_graph.hpp"
#include "fermat/rng.hpp"
#include "fermat/spatial_index.hpp"

namespace {

fermat::PointCloud make_cloud(std::size_t n) {
  fermat::Rng rng(7);
  std::vector<double> coords(n * 2);
  for (double& c : coords) c = rng.uniform();
  return fermat::PointCloud(std::move(coords), 2);
}

}  // namespace

static void BM_ExactDistance(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
  const fermat::Vec x{0.1, 0.1}, y{0.9, 0.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fermat::exact_distance(cloud, fermat::Alpha{2.0}, x, y));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ExactDistance)->RangeMultiplier(2)->Range(1 << 10, 1 << 14)->Complexity();

static void BM_GraphBuild(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
  const fermat::SpatialIndex index(cloud);
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(10.0 * std::log(static_cast<double>(cloud.size()))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fermat::KnnGraph::build(cloud, index, k, fermat::Alpha{2.0}, false, 1));
  }
}
BENCHMARK(BM_GraphBuild)->RangeMultiplier(4)->Range(1 << 12, 1 << 16);

static void BM_RestrictedSingleSource(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)));
  const fermat::SpatialIndex index(cloud);
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(10.0 * std::log(static_cast<double>(cloud.size()))));
  const auto graph = fermat::KnnGraph::build(cloud, index, k, fermat::Alpha{2.0}, false, 1);
  std::size_t src = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fermat::restricted_distances_from(graph, src));
    src = (src + 17) % cloud.size();
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RestrictedSingleSource)
    ->RangeMultiplier(2)
    ->Range(1 << 12, 1 << 16)
    ->Complexity();

BENCHMARK_MAIN();
