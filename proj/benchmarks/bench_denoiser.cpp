#include <benchmark/benchmark.h>

#include "camp/denoiser.hpp"

static void BM_Mse(benchmark::State& state) {
    camp::BernoulliGaussianPrior prior(0.1);
    double a = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(prior.mse(a));
        a = a < 1.0 ? a * 1.01 : 1e-3;
    }
}
BENCHMARK(BM_Mse);

static void BM_Correlation(benchmark::State& state) {
    camp::BernoulliGaussianPrior prior(0.1);
    camp::NoisePairCov cov{0.04, 0.02, 0.015};
    for (auto _ : state) {
        benchmark::DoNotOptimize(prior.correlation(cov));
        cov.cross = cov.cross < 0.02 ? cov.cross * 1.001 : 0.015;
    }
}
BENCHMARK(BM_Correlation);
