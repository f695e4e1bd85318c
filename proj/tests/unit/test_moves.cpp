#include <gtest/gtest.h>

#include <cmath>

#include "hawkes/moves.hpp"
#include "hawkes/prior.hpp"

using namespace hawkes;

namespace {

PriorConfig prior_for(KnotScheme scheme) {
    PriorConfig p;
    p.knot_scheme = scheme;
    return p;
}

MoveContext context(const PriorConfig& prior) {
    return MoveContext{prior, 2.0, MoveProbabilities{}.for_scheme(prior.knot_scheme), 0.5};
}

void expect_same(const KernelParam& a, const KernelParam& b) {
    ASSERT_EQ(a.delta, b.delta);
    ASSERT_EQ(a.z, b.z);
    ASSERT_EQ(a.knots.size(), b.knots.size());
    for (std::size_t i = 0; i < a.knots.size(); ++i) EXPECT_NEAR(a.knots[i], b.knots[i], 1e-15);
    ASSERT_EQ(a.beta.size(), b.beta.size());
    for (std::size_t i = 0; i < a.beta.size(); ++i) EXPECT_NEAR(a.beta[i], b.beta[i], 1e-12 * std::max(1.0, a.beta[i]));
}

}  // namespace

TEST(Moves, ScheduleForScheme) {
    const MoveProbabilities p;
    EXPECT_NEAR(p.total(), 1.0, 1e-15);
    const auto r = p.for_scheme(KnotScheme::regular);
    EXPECT_EQ(r.knot, 0.0);
    EXPECT_NEAR(r.height, 0.55, 1e-15);
    EXPECT_NEAR(r.total(), 1.0, 1e-15);
    EXPECT_EQ(p.for_scheme(KnotScheme::random).knot, 0.15);
    EXPECT_NEAR(switch_off_selection(p, 1), 0.3, 1e-15);
    EXPECT_NEAR(switch_off_selection(p, 3), 0.15, 1e-15);
}

TEST(Moves, KernelLogTargetChangeOfVariables) {
    auto prior = prior_for(KnotScheme::random);
    const KernelParam p{true, {0.0, 0.01, 0.04}, {1, 1}, {12.0, 40.0}};
    EXPECT_NEAR(kernel_log_target(prior, 2.0, p),
                prior_logdensity(prior, 2.0, p) + std::log(12.0) + std::log(40.0) - std::log(0.04), 1e-12);
    prior.knot_scheme = KnotScheme::regular;
    const KernelParam q{true, {0.0, 0.02, 0.04}, {0, 1}, {0.0, 40.0}};
    EXPECT_NEAR(kernel_log_target(prior, 2.0, q), prior_logdensity(prior, 2.0, q) + std::log(40.0), 1e-12);
    EXPECT_NEAR(kernel_log_target(prior, 2.0, null_param()), std::log(0.5), 1e-15);
    EXPECT_NEAR(nu_log_target(prior, {std::exp(3.5)}), -0.5 * std::log(2 * M_PI), 1e-12);
}

TEST(Moves, BirthDeathInvolutionRandom) {
    const auto prior = prior_for(KnotScheme::random);
    const auto ctx = context(prior);
    Rng rng(1);
    int checked = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const auto cur = prior_sample_active(prior, 2.0, rng);
        const auto choice = draw_birth_choice(ctx, cur, rng);
        const auto birth = birth_move(ctx, cur, choice);
        if (!birth.valid) continue;
        ASSERT_EQ(birth.next.bins(), cur.bins() + 1);
        const auto idx = static_cast<std::size_t>(
            std::find(birth.next.knots.begin(), birth.next.knots.end(), choice.new_knot) - birth.next.knots.begin());
        const auto death = death_move(ctx, birth.next, idx);
        ASSERT_TRUE(death.valid);
        expect_same(death.next, cur);
        const double forward = kernel_log_target(prior, 2.0, birth.next) - kernel_log_target(prior, 2.0, cur) +
                               birth.log_q_ratio;
        const double backward = kernel_log_target(prior, 2.0, death.next) -
                                kernel_log_target(prior, 2.0, birth.next) + death.log_q_ratio;
        EXPECT_NEAR(forward + backward, 0.0, 1e-9);
        ++checked;
    }
    EXPECT_GT(checked, 1900);
}

TEST(Moves, BirthDeathInvolutionRegular) {
    const auto prior = prior_for(KnotScheme::regular);
    const auto ctx = context(prior);
    Rng rng(2);
    for (int rep = 0; rep < 2000; ++rep) {
        const auto cur = prior_sample_active(prior, 2.0, rng);
        const auto choice = draw_birth_choice(ctx, cur, rng);
        const auto birth = birth_move(ctx, cur, choice);
        ASSERT_TRUE(birth.valid);
        EXPECT_EQ(birth.next.knots, regular_knots(cur.bins() + 1, 0.04));
        const auto death = death_move(ctx, birth.next, choice.position);
        ASSERT_TRUE(death.valid);
        expect_same(death.next, cur);
        EXPECT_NEAR(birth.log_q_ratio + death.log_q_ratio, 0.0, 1e-12);
    }
}

TEST(Moves, RandomSplitPreservesGeometricMean) {
    const auto prior = prior_for(KnotScheme::random);
    const auto ctx = context(prior);
    const KernelParam cur{true, {0.0, 0.04}, {1}, {30.0}};
    BirthChoice c;
    c.new_knot = 0.015;
    c.split = 0.2;
    const auto b = birth_move(ctx, cur, c);
    ASSERT_TRUE(b.valid);
    EXPECT_EQ(b.next.knots, (std::vector<double>{0.0, 0.015, 0.04}));
    EXPECT_NEAR(b.next.beta[0] * b.next.beta[1], 900.0, 1e-9);
    EXPECT_NEAR(b.next.beta[0] / b.next.beta[1], std::exp(0.4), 1e-12);
}

TEST(Moves, DeathRejectsMixedIndicatorsAndSingleBin) {
    const auto prior = prior_for(KnotScheme::random);
    const auto ctx = context(prior);
    const KernelParam mixed{true, {0.0, 0.02, 0.04}, {1, 0}, {30.0, 0.0}};
    EXPECT_FALSE(death_move(ctx, mixed, 1).valid);
    const KernelParam one{true, {0.0, 0.04}, {1}, {30.0}};
    EXPECT_FALSE(death_move(ctx, one, 1).valid);
    EXPECT_FALSE(death_move(ctx, one, 0).valid);
    EXPECT_FALSE(birth_move(ctx, null_param(), BirthChoice{}).valid);
}

TEST(Moves, KnotMoveReversible) {
    const auto prior = prior_for(KnotScheme::random);
    const auto ctx = context(prior);
    Rng rng(3);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int rep = 0; rep < 1000; ++rep) {
        auto cur = prior_sample_active(prior, 3.0, rng);
        if (cur.bins() < 2) continue;
        const std::size_t idx = 1 + rep % (cur.bins() - 1);
        const double step = g(rng);
        const auto fwd = knot_move(ctx, cur, idx, step);
        if (!fwd.valid) continue;
        EXPECT_GT(fwd.next.knots[idx], cur.knots[idx - 1]);
        EXPECT_LT(fwd.next.knots[idx], cur.knots[idx + 1]);
        const auto back = knot_move(ctx, fwd.next, idx, -step);
        ASSERT_TRUE(back.valid);
        EXPECT_NEAR(back.next.knots[idx], cur.knots[idx], 1e-14);
        EXPECT_NEAR(fwd.log_q_ratio + back.log_q_ratio, 0.0, 1e-8);
    }
}

TEST(Moves, KnotMoveAtDirichletMode) {
    const auto prior = prior_for(KnotScheme::random);
    const auto ctx = context(prior);
    const KernelParam mode{true, {0.0, 0.02, 0.04}, {1, 1}, {20.0, 20.0}};
    const auto zero = knot_move(ctx, mode, 1, 0.0);
    ASSERT_TRUE(zero.valid);
    EXPECT_EQ(zero.log_q_ratio, 0.0);
    // a move into the mode from either side is accepted with certainty
    for (double step : {-0.8, -0.1, 0.1, 0.8}) {
        const auto away = knot_move(ctx, mode, 1, step);
        const auto into = knot_move(ctx, away.next, 1, -step);
        const double log_ratio = kernel_log_target(prior, 2.0, into.next) -
                                 kernel_log_target(prior, 2.0, away.next) + into.log_q_ratio;
        EXPECT_GE(log_ratio, 0.0) << step;
    }
    EXPECT_FALSE(knot_move(ctx, KernelParam{true, {0.0, 0.04}, {1}, {2.0}}, 1, 0.1).valid);
}
