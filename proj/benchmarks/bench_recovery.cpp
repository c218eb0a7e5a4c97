#include <benchmark/benchmark.h>

#include "camp/recovery.hpp"
#include "camp/rng.hpp"
#include "camp/se.hpp"

static void BM_CampRun(benchmark::State& state) {
    const std::size_t N = static_cast<std::size_t>(state.range(0));
    const std::size_t M = N / 2;
    const std::size_t T = 20;
    camp::BernoulliGaussianPrior prior(0.1);
    const auto theta = camp::Series::identity(T);
    const auto sch = camp::taps_geometric(theta, 5.0, 0.5, T);
    const auto se = camp::solve_camp_se(sch, prior, 1e-3, T, 1.0);
    const auto A = camp::build_sensing(camp::EnsembleKind::geometric, M, N, 5, 5.0);
    const auto inst = camp::generate_instance(prior, 1e-3, A, 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            camp::run_camp(inst.y, A, sch, se, prior, T, inst.x));
    }
    state.SetComplexityN(static_cast<long>(N));
}
BENCHMARK(BM_CampRun)->RangeMultiplier(2)->Range(1 << 10, 1 << 12)
    ->Unit(benchmark::kMillisecond)->Complexity();
