#include <benchmark/benchmark.h>

#include "circcoords/data_prep.hpp"
#include "circcoords/persistence.hpp"

using namespace circcoords;

static void BM_PersistenceH1(benchmark::State& state) {
  CircleParams params;
  params.n = static_cast<std::size_t>(state.range(0));
  const auto sample = gen_unbalanced_circle(params, 1);
  RipsOptions options;
  options.materialize_triangles = false;
  const auto filtration = build_rips(sample.cloud, 1.05 * enclosing_radius(sample.cloud), options);
  for (auto _ : state) benchmark::DoNotOptimize(persistent_cohomology_h1(filtration));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PersistenceH1)->Arg(50)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_BuildRips(benchmark::State& state) {
  CircleParams params;
  params.n = static_cast<std::size_t>(state.range(0));
  const auto sample = gen_unbalanced_circle(params, 1);
  RipsOptions options;
  options.materialize_triangles = false;
  for (auto _ : state) benchmark::DoNotOptimize(build_rips(sample.cloud, 1.0, options));
}
BENCHMARK(BM_BuildRips)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
