// OpenMP key search against the serial reference on the same blocks.
#include <benchmark/benchmark.h>

#include "satqkd/finitekey.hpp"

namespace {

satqkd::SecurityConfig config(const benchmark::State& state) {
  satqkd::SecurityConfig sec;
  sec.grid_n = static_cast<int>(state.range(1));
  return sec;
}

satqkd::BlockStats block(const benchmark::State& state) {
  return {state.range(0), 0.02, {}};
}

void BM_KeySearchParallel(benchmark::State& state) {
  const auto sec = config(state);
  const auto b = block(state);
  for (auto _ : state) benchmark::DoNotOptimize(satqkd::optimise_key_length(b, sec));
}

void BM_KeySearchSerial(benchmark::State& state) {
  const auto sec = config(state);
  const auto b = block(state);
  for (auto _ : state) benchmark::DoNotOptimize(satqkd::optimise_key_length_serial(b, sec));
}

void grid(benchmark::internal::Benchmark* b) {
  for (long m : {10'000L, 1'000'000L, 100'000'000L})
    for (long n : {32L, 64L, 128L}) b->Args({m, n});
  b->ArgNames({"m", "grid_n"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_KeySearchParallel)->Apply(grid);
BENCHMARK(BM_KeySearchSerial)->Apply(grid);

BENCHMARK_MAIN();
