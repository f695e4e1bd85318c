#include <benchmark/benchmark.h>

#include "hawkes/likelihood.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/workspace.hpp"

using namespace hawkes;

namespace {

EventSequence data(double horizon) {
    SimConfig c;
    c.horizon = horizon;
    c.seed = 3;
    return simulate(scenario1(), c);
}

void BM_LogLikelihood(benchmark::State& state) {
    const double horizon = static_cast<double>(state.range(0));
    const auto seq = data(horizon);
    const auto m = scenario1();
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(m, seq, horizon));
    state.counters["events"] = static_cast<double>(seq.size());
}
BENCHMARK(BM_LogLikelihood)->Arg(5)->Arg(20);

void BM_WorkspaceKernelChange(benchmark::State& state) {
    const double horizon = static_cast<double>(state.range(0));
    const auto seq = data(horizon);
    LikelihoodWorkspace ws(seq, horizon, kScenarioSupport);
    const std::vector<double> nu{20.0, 20.0};
    const StepKernel base{{0.0, 0.02, 0.04}, {30.0, 0.0}};
    const std::vector<StepKernel> ks(4, base);
    ws.reset(nu, ks);
    const StepKernel next{{0.0, 0.01, 0.02, 0.04}, {25.0, 35.0, 0.0}};
    for (auto _ : state) benchmark::DoNotOptimize(ws.propose_kernel(0, 1, next).delta_log_likelihood());
}
BENCHMARK(BM_WorkspaceKernelChange)->Arg(5)->Arg(20);

void BM_WorkspaceNuGradient(benchmark::State& state) {
    const auto seq = data(20.0);
    LikelihoodWorkspace ws(seq, 20.0, kScenarioSupport);
    ws.reset(std::vector<double>{20.0, 20.0}, std::vector<StepKernel>(4, StepKernel{{0.0, 0.02, 0.04}, {30.0, 0.0}}));
    for (auto _ : state) benchmark::DoNotOptimize(ws.nu_gradient(0));
}
BENCHMARK(BM_WorkspaceNuGradient);

}  // namespace
