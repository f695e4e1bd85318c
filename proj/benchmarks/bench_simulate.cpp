#include <benchmark/benchmark.h>

#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"

using namespace hawkes;

namespace {

void BM_Simulate(benchmark::State& state) {
    SimConfig c;
    c.horizon = 20.0;
    c.method = state.range(0) ? SimMethod::thinning : SimMethod::cluster;
    std::uint64_t stream = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(scenario1(), c, stream++).size());
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->ArgName("thinning");

}  // namespace
