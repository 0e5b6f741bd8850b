#include <benchmark/benchmark.h>

#include <cstdint>

#include "qlf/oracle.hpp"
#include "qlf/pipeline.hpp"

static void BM_RunBatch(benchmark::State& state) {
  qlf::BatchRequest request;
  request.window = {state.range(0), state.range(1)};
  request.t = 0.0;
  request.epsilon = 1e-6;
  request.method = qlf::Method::fast;
  std::size_t characters = 0;
  for (auto _ : state) {
    const auto result = qlf::run_batch(request);
    characters = result.records.size();
    benchmark::DoNotOptimize(result.records.data());
  }
  state.counters["characters"] = static_cast<double>(characters);
  state.counters["seconds_per_character"] = benchmark::Counter(
      static_cast<double>(characters) * static_cast<double>(state.iterations()),
      benchmark::Counter::kIsRate | benchmark::Counter::kInvert);
}
BENCHMARK(BM_RunBatch)->Args({20000, 10000})->Args({200000, 100000})
    ->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_OracleZ(benchmark::State& state) {
  const std::int64_t q = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(qlf::direct_Z(q, 0.0, 1e-6));
}
BENCHMARK(BM_OracleZ)->Arg(20005)->Arg(200005)->Unit(benchmark::kMicrosecond);
