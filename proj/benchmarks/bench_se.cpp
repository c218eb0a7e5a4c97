#include <benchmark/benchmark.h>

#include "camp/se.hpp"

static void BM_ConvolutionKernel(benchmark::State& state) {
    const std::size_t T = static_cast<std::size_t>(state.range(0));
    const auto theta = camp::Series::identity(T);
    const auto sch = camp::taps_geometric(theta, 5.0, 0.5, T);
    for (auto _ : state) {
        benchmark::DoNotOptimize(camp::build_convolution_kernel(sch));
    }
}
BENCHMARK(BM_ConvolutionKernel)->Arg(40)->Arg(80)->Arg(160);

static void BM_CampSe(benchmark::State& state) {
    const std::size_t T = static_cast<std::size_t>(state.range(0));
    camp::BernoulliGaussianPrior prior(0.1);
    const auto theta = camp::Series::identity(T);
    const auto sch = camp::taps_geometric(theta, 5.0, 0.5, T);
    for (auto _ : state) {
        benchmark::DoNotOptimize(camp::solve_camp_se(sch, prior, 1e-3, T, 1.0));
    }
}
BENCHMARK(BM_CampSe)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
