#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "hawkes/events.hpp"
#include "hawkes/model.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

enum class SimMethod { cluster, thinning };

std::string_view to_string(SimMethod m) noexcept;
SimMethod sim_method_from_string(std::string_view s);

struct SimConfig {
    double horizon = 20.0;                  // T: output window is [-A, T)
    std::optional<double> pre_window;       // A; defaults to the model support
    double burn_in = 2.0;                   // discarded warm-up before -A
    std::uint64_t seed = 0;
    SimMethod method = SimMethod::cluster;
    std::size_t max_cluster_events = 10'000'000;
};

// Cluster (branching) construction. Immigrants of mark l are Poisson(nu_l) on
// [-burn_in - 2A, T); every point of mark l at s spawns Poisson(rho_{l,k})
// children of mark k at s + X, X ~ h_{l,k} / rho_{l,k}. Points in [-A, T)
// are returned. Throws NumericError for a non-stationary model or when a
// single cluster exceeds cfg.max_cluster_events.
EventSequence simulate_cluster(const HawkesModel& model, const SimConfig& cfg, Rng& rng);

// Ogata thinning on [-burn_in - A, T) with a piecewise-constant dominating
// rate refreshed after each accepted point and at each support expiry.
EventSequence simulate_thinning(const HawkesModel& model, const SimConfig& cfg, Rng& rng);

// Dispatches on cfg.method with rng = seed_split(cfg.seed, stream_id).
EventSequence simulate(const HawkesModel& model, const SimConfig& cfg, std::uint64_t stream_id = 0);

// The cluster generated by one ancestor of mark `ancestor` at time 0: all
// descendants in generation order (ancestor first), times unrestricted.
std::vector<Event> simulate_single_cluster(const HawkesModel& model, int ancestor, Rng& rng,
                                           std::size_t max_events = 10'000'000);

// Draws an offset from the normalised kernel density h / integral(h).
// Precondition: h has positive mass.
double sample_offset(const Kernel& h, Rng& rng);

}  // namespace hawkes
