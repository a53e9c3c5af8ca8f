// Serial reference against the OpenMP kernels. Thread count follows
// QNG_THREADS (default: all cores).

#include <benchmark/benchmark.h>

#include "qng/criteria.hpp"
#include "qng/emitter.hpp"

namespace {

qng::OptimizerOptions with(qng::Execution exec) {
  qng::OptimizerOptions o;
  o.execution = exec;
  return o;
}

void multistart(benchmark::State& state, qng::Execution exec) {
  const int order = static_cast<int>(state.range(0));
  const qng::OptimizerOptions options = with(exec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qng::maximize_functional(-100.0, order, options).value);
  }
}

void a_grid(benchmark::State& state, qng::Execution exec) {
  const int order = static_cast<int>(state.range(0));
  const std::vector<double> grid = qng::log_a_grid(-1e7, -1e-3, 32);
  const qng::DetectorConfig config = qng::DetectorConfig::symmetric(order + 1);
  const qng::OptimizerOptions options = with(exec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qng::maximize_over_grid(order, grid, config, options).size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void source_stats(benchmark::State& state) {
  qng::EnsembleParams p;
  p.emitters = static_cast<int>(state.range(0));
  p.efficiency = 0.3;
  p.noise_mean = 0.01;
  p.storage_time = 1.0;
  p.window_length = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qng::source_click_stats(p, p.emitters, qng::SourceMode::escape).error);
  }
}

}  // namespace

BENCHMARK_CAPTURE(multistart, serial, qng::Execution::serial)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(multistart, parallel, qng::Execution::parallel)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(a_grid, serial, qng::Execution::serial)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(a_grid, parallel, qng::Execution::parallel)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(source_stats)->Arg(2)->Arg(6)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
