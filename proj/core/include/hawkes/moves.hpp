#pragma once

#include <cstddef>
#include <cstdint>

#include "hawkes/prior.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

// Per-kernel move schedule; must sum to 1.
struct MoveProbabilities {
    double height = 0.4;
    double birth = 0.15;
    double death = 0.15;
    double knot = 0.15;
    double delta_flip = 0.15;

    double total() const noexcept { return height + birth + death + knot + delta_flip; }
    // Under the regular grid there is no knot move; its mass goes to heights.
    MoveProbabilities for_scheme(KnotScheme scheme) const noexcept;
};

struct MoveContext {
    const PriorConfig& prior;
    double eta;
    MoveProbabilities probs;
    double split_scale;  // sd of the log-height split perturbation (random knots)
};

// Log prior density of one kernel in the coordinates the sampler moves in:
// log-heights for active bins and raw knot positions. Equals
// prior_logdensity + sum_{z_j = 1} log beta_j - [random] (J - 1) log A.
double kernel_log_target(const PriorConfig& prior, double eta, const KernelParam& param);

// Log prior of nu in log coordinates: sum_k log N(log nu_k; mu_nu, s_nu^2).
double nu_log_target(const PriorConfig& prior, const std::vector<double>& nu);

// A proposed kernel parameter with log[q(reverse) / q(forward)] + log|Jacobian|.
// The caller adds the likelihood change and the change in kernel_log_target.
struct Proposal {
    KernelParam next;
    double log_q_ratio = 0.0;
    bool valid = true;
};

/// Randomness consumed by a birth. Regular grid: a new bin (z, beta) is
/// inserted at `position` in 0..J and the heights are laid on the J+1 grid.
/// Random knots: a knot at `new_knot` splits its bin; an active parent of
/// log-height th becomes children th + split and th - split.
struct BirthChoice {
    std::size_t position = 0;
    std::uint8_t z = 0;
    double beta = 0.0;
    double new_knot = 0.0;
    double split = 0.0;
};

BirthChoice draw_birth_choice(const MoveContext& ctx, const KernelParam& current, Rng& rng);
Proposal birth_move(const MoveContext& ctx, const KernelParam& current, const BirthChoice& choice);

// Regular grid: remove bin `index` in 0..J-1. Random knots: remove interior
// knot `index` in 1..J-1, merging its two bins (invalid if their z differ).
// Requires J >= 2.
Proposal death_move(const MoveContext& ctx, const KernelParam& current, std::size_t index);

// Moves interior knot `index` (1..J-1) to a + (b - a) sigmoid(logit((t - a)/(b - a)) + step)
// where (a, b) are its neighbours.
Proposal knot_move(const MoveContext& ctx, const KernelParam& current, std::size_t index, double step);

// Probability that a delta 1 -> 0 proposal is made from a kernel with `bins`
// bins: the flip itself, plus death at J = 1, which is redirected to a flip.
double switch_off_selection(const MoveProbabilities& probs, std::size_t bins) noexcept;

}  // namespace hawkes
