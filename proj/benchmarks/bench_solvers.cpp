#include <benchmark/benchmark.h>

#include "bbm/euler_lagrange.hpp"
#include "bbm/model.hpp"
#include "bbm/profiles.hpp"
#include "bbm/rate.hpp"

namespace {

// p is passed as hundredths so the p = 1 closed form and the general
// numeric branches can be compared.
bbm::PotentialParams params_for(const benchmark::State& state) {
    const double p = static_cast<double>(state.range(0)) / 100.0;
    return bbm::make_params(2.0 / ((2.0 - p) * (2.0 - p)), p);
}

void BM_SolveUnconstrained(benchmark::State& state) {
    const auto params = params_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(bbm::solve_unconstrained(params, 0.5));
}
BENCHMARK(BM_SolveUnconstrained)->Arg(50)->Arg(100)->Arg(150)->Unit(benchmark::kMicrosecond);

void BM_SolveConstrained(benchmark::State& state) {
    const auto params = params_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(bbm::solve_constrained(params, 0.5));
}
BENCHMARK(BM_SolveConstrained)->Arg(50)->Arg(100)->Arg(150)->Unit(benchmark::kMicrosecond);

void BM_RateFunctional(benchmark::State& state) {
    const auto params = params_for(state);
    const auto path = bbm::solve_unconstrained(params, 0.5).path;
    for (auto _ : state) benchmark::DoNotOptimize(bbm::rate_functional(params, path));
}
BENCHMARK(BM_RateFunctional)->Arg(50)->Arg(150);

void BM_TabulateProfile(benchmark::State& state) {
    const auto params = params_for(state);
    const auto grid = bbm::default_profile_grid(params, bbm::ProfileKind::almost_sure, 101);
    for (auto _ : state)
        benchmark::DoNotOptimize(bbm::tabulate_profile(params, bbm::ProfileKind::almost_sure, grid));
}
BENCHMARK(BM_TabulateProfile)->Arg(50)->Arg(100)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_OptimalEndpoint(benchmark::State& state) {
    const auto params = params_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(bbm::optimal_endpoint(params, bbm::ProfileKind::expected));
}
BENCHMARK(BM_OptimalEndpoint)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
