#include "hawkes/moves.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// Prior density of one bin's (z, log beta) in sampler coordinates.
double bin_log_prior(const PriorConfig& prior, std::uint8_t z, double beta) {
    if (!z) return safe_log(1.0 - prior.pi_z);
    return safe_log(prior.pi_z) + log_normal_pdf(std::log(beta), prior.mu_beta, prior.s_beta);
}

Proposal invalid() {
    Proposal p;
    p.valid = false;
    return p;
}

}  // namespace

MoveProbabilities MoveProbabilities::for_scheme(KnotScheme scheme) const noexcept {
    MoveProbabilities out = *this;
    if (scheme == KnotScheme::regular) {
        out.height += out.knot;
        out.knot = 0.0;
    }
    return out;
}

double kernel_log_target(const PriorConfig& prior, double eta, const KernelParam& param) {
    double out = prior_logdensity(prior, eta, param);
    if (!param.delta) return out;
    for (std::size_t j = 0; j < param.bins(); ++j)
        if (param.z[j]) out += std::log(param.beta[j]);
    if (prior.knot_scheme == KnotScheme::random)
        out -= static_cast<double>(param.bins() - 1) * std::log(prior.support);
    return out;
}

double nu_log_target(const PriorConfig& prior, const std::vector<double>& nu) {
    double out = 0.0;
    for (double v : nu) {
        if (!(v > 0.0)) return kNegInf;
        out += log_normal_pdf(std::log(v), prior.mu_nu, prior.s_nu);
    }
    return out;
}

double switch_off_selection(const MoveProbabilities& probs, std::size_t bins) noexcept {
    return probs.delta_flip + (bins == 1 ? probs.death : 0.0);
}

BirthChoice draw_birth_choice(const MoveContext& ctx, const KernelParam& current, Rng& rng) {
    BirthChoice c;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (ctx.prior.knot_scheme == KnotScheme::regular) {
        c.position = std::uniform_int_distribution<std::size_t>(0, current.bins())(rng);
        c.z = unit(rng) < ctx.prior.pi_z ? 1 : 0;
        if (c.z) c.beta = std::lognormal_distribution<double>(ctx.prior.mu_beta, ctx.prior.s_beta)(rng);
    } else {
        c.new_knot = ctx.prior.support * unit(rng);
        c.split = std::normal_distribution<double>(0.0, ctx.split_scale)(rng);
    }
    return c;
}

Proposal birth_move(const MoveContext& ctx, const KernelParam& current, const BirthChoice& choice) {
    if (!current.delta) return invalid();
    const std::size_t bins = current.bins();
    const double log_probs = safe_log(ctx.probs.death) - safe_log(ctx.probs.birth);
    Proposal out;
    out.next = current;
    auto& next = out.next;

    if (ctx.prior.knot_scheme == KnotScheme::regular) {
        if (choice.position > bins) return invalid();
        if (choice.z && !(choice.beta > 0.0)) return invalid();
        const auto at = static_cast<std::ptrdiff_t>(choice.position);
        next.z.insert(next.z.begin() + at, choice.z);
        next.beta.insert(next.beta.begin() + at, choice.z ? choice.beta : 0.0);
        next.knots = regular_knots(bins + 1, ctx.prior.support);
        // forward: p_birth / (J+1) * prior(z, beta); reverse: p_death / (J+1)
        out.log_q_ratio = log_probs - bin_log_prior(ctx.prior, choice.z, choice.beta);
        return out;
    }

    const int bin = step_bin(current.knots, choice.new_knot);
    if (bin < 0 || choice.new_knot >= current.knots[static_cast<std::size_t>(bin) + 1]) return invalid();
    const auto j = static_cast<std::size_t>(bin);
    const auto at = static_cast<std::ptrdiff_t>(j);
    next.knots.insert(next.knots.begin() + at + 1, choice.new_knot);
    next.z.insert(next.z.begin() + at, current.z[j]);
    if (current.z[j]) {
        const double theta = std::log(current.beta[j]);
        next.beta[j] = std::exp(theta + choice.split);
        next.beta.insert(next.beta.begin() + at + 1, std::exp(theta - choice.split));
        if (!(next.beta[j] > 0.0 && next.beta[j + 1] > 0.0 && std::isfinite(next.beta[j]) &&
              std::isfinite(next.beta[j + 1])))
            return invalid();
    } else {
        next.beta.insert(next.beta.begin() + at + 1, 0.0);
    }
    // forward: p_birth * (1/A) [* phi(split)]; reverse: p_death / J (J interior
    // knots after the birth). (theta, u) -> (theta + u, theta - u) has |J| = 2.
    out.log_q_ratio = log_probs - std::log(static_cast<double>(bins)) + std::log(ctx.prior.support);
    if (current.z[j])
        out.log_q_ratio += std::numbers::ln2 - log_normal_pdf(choice.split, 0.0, ctx.split_scale);
    return out;
}

Proposal death_move(const MoveContext& ctx, const KernelParam& current, std::size_t index) {
    if (!current.delta || current.bins() < 2) return invalid();
    const std::size_t bins = current.bins();
    const double log_probs = safe_log(ctx.probs.birth) - safe_log(ctx.probs.death);
    Proposal out;
    out.next = current;
    auto& next = out.next;

    if (ctx.prior.knot_scheme == KnotScheme::regular) {
        if (index >= bins) return invalid();
        const std::uint8_t z = current.z[index];
        const double beta = current.beta[index];
        const auto at = static_cast<std::ptrdiff_t>(index);
        next.z.erase(next.z.begin() + at);
        next.beta.erase(next.beta.begin() + at);
        next.knots = regular_knots(bins - 1, ctx.prior.support);
        out.log_q_ratio = log_probs + bin_log_prior(ctx.prior, z, beta);
        return out;
    }

    if (index < 1 || index >= bins) return invalid();
    const std::size_t left = index - 1;
    const std::size_t right = index;
    if (current.z[left] != current.z[right]) return invalid();
    const auto at = static_cast<std::ptrdiff_t>(left);
    next.knots.erase(next.knots.begin() + static_cast<std::ptrdiff_t>(index));
    next.z.erase(next.z.begin() + at + 1);
    double split = 0.0;
    if (current.z[left]) {
        const double tl = std::log(current.beta[left]);
        const double tr = std::log(current.beta[right]);
        next.beta[left] = std::exp(0.5 * (tl + tr));
        split = 0.5 * (tl - tr);
    }
    next.beta.erase(next.beta.begin() + at + 1);
    // forward: p_death / (J - 1); reverse: p_birth * (1/A) [* phi(split)], |J| = 1/2.
    out.log_q_ratio = log_probs + std::log(static_cast<double>(bins - 1)) - std::log(ctx.prior.support);
    if (current.z[left])
        out.log_q_ratio += log_normal_pdf(split, 0.0, ctx.split_scale) - std::numbers::ln2;
    return out;
}

Proposal knot_move(const MoveContext& ctx, const KernelParam& current, std::size_t index, double step) {
    (void)ctx;
    if (!current.delta || index < 1 || index + 1 >= current.knots.size()) return invalid();
    const double a = current.knots[index - 1];
    const double b = current.knots[index + 1];
    const double t = current.knots[index];
    const double frac = (t - a) / (b - a);
    const double x = std::log(frac) - std::log1p(-frac) + step;
    const double frac_new = 1.0 / (1.0 + std::exp(-x));
    const double t_new = a + (b - a) * frac_new;
    if (!(t_new > a && t_new < b)) return invalid();
    Proposal out;
    out.next = current;
    out.next.knots[index] = t_new;
    // logit random walk: q(t'|t) = phi(x' - x) / ((b - a) s'(1 - s'))
    out.log_q_ratio = std::log(t_new - a) + std::log(b - t_new) - std::log(t - a) - std::log(b - t);
    return out;
}

}  // namespace hawkes
