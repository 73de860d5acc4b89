#include <benchmark/benchmark.h>

#include <cstdint>

#include "bbm/model.hpp"
#include "bbm/sim.hpp"

namespace {

void BM_SimulateReplicate(benchmark::State& state) {
    bbm::SimConfig config;
    config.params = bbm::make_params(1.0, 1.0);
    config.horizon_T = static_cast<double>(state.range(0));
    config.dt = 1e-2;
    config.replicates = 1;
    config.record_times = {config.horizon_T};
    std::uint64_t seed = 1;
    double particles = 0.0;
    for (auto _ : state) {
        config.seed = seed++;
        const auto out = bbm::run_bbm(config);
        particles += out.replicates[0].population[0];
    }
    state.counters["particles"] = benchmark::Counter(particles, benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_SimulateReplicate)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
