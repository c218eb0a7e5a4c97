#include <benchmark/benchmark.h>

#include <vector>

#include "camp/recovery.hpp"
#include "camp/rng.hpp"

static void BM_Fwht(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    camp::Rng rng(7);
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    for (auto _ : state) {
        camp::fwht(v);
        benchmark::DoNotOptimize(v.data());
        benchmark::ClobberMemory();
    }
    state.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_Fwht)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void BM_StructuredApply(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const std::size_t m = n / 2;
    const auto A = camp::build_sensing(camp::EnsembleKind::geometric, m, n, 11, 5.0);
    camp::Rng rng(3);
    std::vector<double> v(n), y(m), scratch(n);
    for (double& x : v) x = rng.normal();
    for (auto _ : state) {
        A.apply(v, y, scratch);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_StructuredApply)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
