#include <benchmark/benchmark.h>

#include "fermat/rng.hpp"
#include "fermat/spatial_index.hpp"

namespace {

fermat::PointCloud make_cloud(std::size_t n, int dim) {
  fermat::Rng rng(42);
  std::vector<double> coords(n * static_cast<std::size_t>(dim));
  for (double& c : coords) c = rng.uniform();
  return fermat::PointCloud(std::move(coords), dim);
}

}  // namespace

static void BM_IndexBuild(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    fermat::SpatialIndex index(cloud);
    benchmark::DoNotOptimize(index);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IndexBuild)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_KnnQuery(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)), 2);
  const fermat::SpatialIndex index(cloud);
  const std::size_t k = static_cast<std::size_t>(state.range(1));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.knn(i, k));
    i = (i + 1) % cloud.size();
  }
}
BENCHMARK(BM_KnnQuery)
    ->Args({1 << 12, 10})
    ->Args({1 << 14, 10})
    ->Args({1 << 16, 10})
    ->Args({1 << 14, 100})
    ->Args({1 << 16, 100});

static void BM_KnnQuery3D(benchmark::State& state) {
  const auto cloud = make_cloud(static_cast<std::size_t>(state.range(0)), 3);
  const fermat::SpatialIndex index(cloud);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index.knn(i, 16));
    i = (i + 1) % cloud.size();
  }
}
BENCHMARK(BM_KnnQuery3D)->Arg(1 << 14)->Arg(1 << 16);

BENCHMARK_MAIN();
