#include <benchmark/benchmark.h>

#include "fermat/catalog.hpp"
#include "fermat/grid_oracle.hpp"

namespace {

fermat::GridOracle make_oracle(double h) {
  const fermat::Scenario sc = fermat::make_scenario("{\"type\":\"gauss_bump\"}");
  fermat::GridOracleConfig cfg;
  cfg.h = h;
  cfg.workers = 1;
  return fermat::GridOracle::build(sc.domain, sc.density, fermat::Beta{0.5}, cfg,
                                   sc.params_json);
}

}  // namespace

static void BM_OracleBuild(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const fermat::Scenario sc = fermat::make_scenario("{\"type\":\"gauss_bump\"}");
  fermat::GridOracleConfig cfg;
  cfg.h = h;
  cfg.workers = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fermat::GridOracle::build(sc.domain, sc.density, fermat::Beta{0.5}, cfg));
  }
}
BENCHMARK(BM_OracleBuild)->Arg(64)->Arg(128)->Arg(256);

static void BM_OracleDistance(benchmark::State& state) {
  const auto oracle = make_oracle(1.0 / static_cast<double>(state.range(0)));
  const fermat::Vec x{0.1, 0.3}, y{0.9, 0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.distance(x, y));
  }
}
BENCHMARK(BM_OracleDistance)->Arg(128)->Arg(256)->Arg(512);

static void BM_OracleBall(benchmark::State& state) {
  const auto oracle = make_oracle(1.0 / 256.0);
  const fermat::Vec x{0.5, 0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle.ball(x, 0.35));
  }
}
BENCHMARK(BM_OracleBall);

BENCHMARK_MAIN();
