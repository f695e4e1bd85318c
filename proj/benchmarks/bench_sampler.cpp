#include <benchmark/benchmark.h>

#include "hawkes/sampler.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"

using namespace hawkes;

namespace {

// One full sweep over nu, eta and every kernel.
void BM_SamplerIteration(benchmark::State& state) {
    const double horizon = static_cast<double>(state.range(0));
    SimConfig c;
    c.horizon = horizon;
    c.seed = 5;
    const auto seq = simulate(scenario1(), c);
    const PriorConfig prior;
    SamplerConfig cfg;
    cfg.n_iter = 1;
    cfg.burn_in = 0;
    cfg.seed = 6;
    Sampler s(seq, horizon, prior, cfg, default_initial_state(seq, horizon, prior));
    for (int i = 0; i < 2000; ++i) s.iterate();
    for (auto _ : state) s.iterate();
}
BENCHMARK(BM_SamplerIteration)->Arg(5)->Arg(20);

}  // namespace
