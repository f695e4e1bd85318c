#include "hawkes/scenarios.hpp"

#include <array>
#include <utility>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {
constexpr double kA = kScenarioSupport;
}

HawkesModel scenario1() {
    std::vector<Kernel> kernels(4);
    kernels[0 * 2 + 0] = Kernel::indicator(30.0, 0.0, 0.02, kA);
    kernels[1 * 2 + 0] = Kernel::indicator(30.0, 0.0, 0.01, kA);
    kernels[0 * 2 + 1] = Kernel::indicator(30.0, 0.01, 0.02, kA);
    return HawkesModel(kA, {kScenarioNu, kScenarioNu}, std::move(kernels));
}

HawkesModel scenario2() {
    constexpr std::size_t k = 8;
    constexpr std::array<std::pair<int, int>, 9> edges{{
        {2, 1}, {3, 1}, {2, 2}, {1, 3}, {2, 3}, {8, 5}, {5, 6}, {6, 7}, {7, 8},
    }};
    std::vector<Kernel> kernels(k * k);
    for (auto [src, dst] : edges)
        kernels[static_cast<std::size_t>(src - 1) * k + static_cast<std::size_t>(dst - 1)] =
            Kernel::indicator(30.0, 0.0, 0.02, kA);
    return HawkesModel(kA, std::vector<double>(k, kScenarioNu), std::move(kernels));
}

HawkesModel scenario3() {
    std::vector<Kernel> kernels(4);
    kernels[0 * 2 + 0] = Kernel::exponential(100.0, 100.0, kA);
    kernels[1 * 2 + 0] = Kernel::indicator(30.0, 0.0, 0.02, kA);
    kernels[0 * 2 + 1] = Kernel::trunc_gauss(0.5, 0.02, 0.004, kA);
    return HawkesModel(kA, {kScenarioNu, kScenarioNu}, std::move(kernels));
}

HawkesModel scenario(int id) {
    switch (id) {
        case 1: return scenario1();
        case 2: return scenario2();
        case 3: return scenario3();
        default: throw ConfigError("unknown scenario id " + std::to_string(id));
    }
}

}  // namespace hawkes
