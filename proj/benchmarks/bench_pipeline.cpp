#include <benchmark/benchmark.h>

#include "circcoords/pipeline.hpp"

using namespace circcoords;

namespace {

PipelineConfig circle_config(std::size_t n) {
  PipelineConfig config;
  config.synthetic.circle.n = n;
  config.threads = 1;
  return config;
}

}  // namespace

static void BM_Uncorrected(benchmark::State& state) {
  const auto config = circle_config(static_cast<std::size_t>(state.range(0)));
  const auto data = load_dataset(config);
  for (auto _ : state) benchmark::DoNotOptimize(compute_uncorrected(data.cloud, config));
}
BENCHMARK(BM_Uncorrected)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Corrected(benchmark::State& state) {
  const auto config = circle_config(static_cast<std::size_t>(state.range(0)));
  const auto data = load_dataset(config);
  for (auto _ : state) benchmark::DoNotOptimize(compute_corrected(data.cloud, config));
}
BENCHMARK(BM_Corrected)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
