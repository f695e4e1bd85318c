#pragma once

// Central finite differences of the sampler's log nu target.

#include <algorithm>
#include <cmath>
#include <vector>

#include "hawkes/sampler.hpp"

namespace hawkes::testing {

// Largest relative error between the analytic gradient in log nu and central
// differences with step h = 1e-6 |log nu_k|, over `states` random states
// (nu from its prior, kernels from the kernel prior).
inline double mala_gradient_error(const EventSequence& data, double horizon, const PriorConfig& prior,
                                  std::size_t states, std::uint64_t seed) {
    Rng rng(seed);
    const auto dim = static_cast<std::size_t>(data.dim());
    SamplerConfig cfg;
    cfg.n_iter = 1;
    cfg.burn_in = 0;
    double worst = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
        ChainState init;
        init.nu = nu_prior_sample(prior, dim, rng);
        for (std::size_t i = 0; i < dim * dim; ++i) init.kernels.push_back(prior_sample(prior, 2.0, rng));
        init.eta = 2.0;
        Sampler sampler(data, horizon, prior, cfg, init);
        const auto grad = sampler.log_nu_gradient(init.nu);
        for (std::size_t k = 0; k < dim; ++k) {
            const double theta = std::log(init.nu[k]);
            const double h = 1e-6 * std::max(std::abs(theta), 1.0);
            auto up = init.nu, down = init.nu;
            up[k] = std::exp(theta + h);
            down[k] = std::exp(theta - h);
            const double fd = (sampler.log_nu_target(up) - sampler.log_nu_target(down)) / (2.0 * h);
            worst = std::max(worst, std::abs(grad[k] - fd) / std::max(std::abs(fd), 1e-300));
        }
    }
    return worst;
}

}  // namespace hawkes::testing
