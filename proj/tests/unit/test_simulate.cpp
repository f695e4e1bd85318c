#include <gtest/gtest.h>

#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "hawkes/errors.hpp"
#include "hawkes/events.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"
#include "oracles.hpp"

using namespace hawkes;
using hawkes::testing::chi2_critical;
using hawkes::testing::mean;
using hawkes::testing::pearson;
using hawkes::testing::sample_sd;

namespace {

// Scenario 3 with the exponential self-excitation scaled down to 50 exp(-100 t),
// which makes it stationary (radius ~0.85) while keeping every kernel family.
HawkesModel scenario3_stationary() {
    return scenario3().with_kernel(0, 0, Kernel::exponential(50.0, 100.0, kScenarioSupport));
}

SimConfig config(double horizon, SimMethod method, std::uint64_t seed = 42) {
    SimConfig c;
    c.horizon = horizon;
    c.method = method;
    c.seed = seed;
    return c;
}

std::vector<std::vector<double>> rates(const HawkesModel& m, SimMethod method, int reps, double horizon) {
    std::vector<std::vector<double>> out(m.dim());
    for (int r = 0; r < reps; ++r) {
        const auto seq = simulate(m, config(horizon, method, 2024), static_cast<std::uint64_t>(r));
        for (std::size_t k = 0; k < m.dim(); ++k)
            out[k].push_back(static_cast<double>(seq.count(static_cast<int>(k), 0.0, horizon)) / horizon);
    }
    return out;
}

// Asymptotic two-sample KS statistic and its 1% critical value.
std::pair<double, double> ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double n = static_cast<double>(a.size()), m = static_cast<double>(b.size());
    return {d, 1.628 * std::sqrt((n + m) / (n * m))};
}

}  // namespace

TEST(Events, InvariantsAndSorting) {
    const EventSequence s({{0.3, 1}, {0.1, 0}, {0.1, 1}, {-0.02, 0}}, -0.04, 1.0, 2);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.events()[0], (Event{-0.02, 0}));
    EXPECT_EQ(s.events()[1], (Event{0.1, 0}));
    EXPECT_EQ(s.events()[2], (Event{0.1, 1}));
    EXPECT_EQ(s.count(1, 0.0, 1.0), 2u);
    EXPECT_EQ(s.times(0), (std::vector<double>{-0.02, 0.1}));
    EXPECT_THROW(EventSequence({{0.1, 0}, {0.1, 0}}, 0.0, 1.0, 1), ConfigError);
    EXPECT_THROW(EventSequence({{1.0, 0}}, 0.0, 1.0, 1), ConfigError);
    EXPECT_THROW(EventSequence({{0.5, 2}}, 0.0, 1.0, 2), ConfigError);
}

TEST(Events, CsvRoundTrip) {
    const auto seq = simulate(scenario1(), config(2.0, SimMethod::cluster), 3);
    const auto path = std::filesystem::temp_directory_path() / "hawkes_test_events.csv";
    write_events(seq, path);
    EXPECT_EQ(read_events(path), seq);
    std::filesystem::remove(path);
    std::filesystem::remove(sidecar_path(path));
}

TEST(Simulate, WindowInvariants) {
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        const auto seq = simulate(scenario1(), config(3.0, method), 0);
        EXPECT_DOUBLE_EQ(seq.t_start(), -0.04);
        EXPECT_DOUBLE_EQ(seq.t_end(), 3.0);
        EXPECT_EQ(seq.dim(), 2);
        const auto ev = seq.events();
        for (std::size_t i = 0; i < ev.size(); ++i) {
            EXPECT_GE(ev[i].time, -0.04);
            EXPECT_LT(ev[i].time, 3.0);
            if (i > 0) EXPECT_TRUE(event_before(ev[i - 1], ev[i]));
        }
        EXPECT_GT(seq.count(0, -0.04, 0.0), 0u);
    }
}

TEST(Simulate, Determinism) {
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        const auto a = simulate(scenario1(), config(5.0, method), 0);
        const auto b = simulate(scenario1(), config(5.0, method), 0);
        const auto c = simulate(scenario1(), config(5.0, method), 1);
        EXPECT_EQ(events_to_csv(a), events_to_csv(b));
        EXPECT_NE(events_to_csv(a), events_to_csv(c));
    }
}

TEST(Simulate, DistinctStreams) {
    std::vector<std::string> seen;
    for (std::uint64_t r = 0; r < 25; ++r)
        seen.push_back(events_to_csv(simulate(scenario1(), config(1.0, SimMethod::cluster), r)));
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(std::unique(seen.begin(), seen.end()), seen.end());
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 0; s < 100; ++s)
        for (std::uint64_t r = 0; r < 100; ++r) seeds.push_back(derive_seed(s, r));
    std::sort(seeds.begin(), seeds.end());
    EXPECT_EQ(std::unique(seeds.begin(), seeds.end()), seeds.end());
}

TEST(Simulate, PoissonCountLaw) {
    const auto m = HawkesModel::poisson(0.04, {20.0, 20.0});
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        std::vector<double> counts;
        std::vector<double> observed(80, 0.0);
        for (int r = 0; r < 1000; ++r) {
            const auto seq = simulate(m, config(1.0, method, 9), static_cast<std::uint64_t>(r));
            for (int k = 0; k < 2; ++k) {
                const auto n = seq.count(k, 0.0, 1.0);
                counts.push_back(static_cast<double>(n));
                observed[std::min<std::size_t>(n, 79)] += 1.0;
            }
        }
        const double mu = mean(counts), sd = sample_sd(counts);
        EXPECT_GE(sd * sd / mu, 0.9) << to_string(method);
        EXPECT_LE(sd * sd / mu, 1.1) << to_string(method);
        std::vector<double> expected(80);
        const boost::math::poisson_distribution<> pois(20.0);
        for (int n = 0; n < 79; ++n) expected[n] = 2000.0 * boost::math::pdf(pois, n);
        expected[79] = 2000.0 * boost::math::cdf(boost::math::complement(pois, 78));
        const auto [stat, dof] = pearson(observed, expected);
        EXPECT_LT(stat, chi2_critical(dof, 0.01)) << to_string(method);
    }
}

TEST(Simulate, PoissonDisjointIntervalsUncorrelated) {
    const auto m = HawkesModel::poisson(0.04, {20.0});
    std::vector<double> a, b;
    for (int r = 0; r < 1000; ++r) {
        const auto seq = simulate(m, config(2.0, SimMethod::thinning, 17), static_cast<std::uint64_t>(r));
        a.push_back(static_cast<double>(seq.count(0, 0.0, 1.0)));
        b.push_back(static_cast<double>(seq.count(0, 1.0, 2.0)));
    }
    const double ma = mean(a), mb = mean(b);
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma) * (b[i] - mb);
    const double corr = cov / (a.size() - 1) / (sample_sd(a) * sample_sd(b));
    EXPECT_LT(std::abs(corr), 3.0 / std::sqrt(1000.0));
}

TEST(Simulate, RatesMatchMeanIntensityScenario1) {
    const auto m = scenario1();
    const auto mu = mean_intensity(m);
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        const auto r = rates(m, method, 25, 20.0);
        for (std::size_t k = 0; k < 2; ++k) {
            const double se = sample_sd(r[k]) / std::sqrt(25.0);
            EXPECT_LE(std::abs(mean(r[k]) - mu(static_cast<int>(k))), 3.0 * se)
                << to_string(method) << " mark " << k;
        }
    }
}

TEST(Simulate, RatesMatchMeanIntensitySmoothKernels) {
    const auto m = scenario3_stationary();
    ASSERT_TRUE(spectral_check(m).stationary);
    const auto mu = mean_intensity(m);
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        const auto r = rates(m, method, 25, 20.0);
        for (std::size_t k = 0; k < 2; ++k) {
            const double se = sample_sd(r[k]) / std::sqrt(25.0);
            EXPECT_LE(std::abs(mean(r[k]) - mu(static_cast<int>(k))), 3.0 * se)
                << to_string(method) << " mark " << k;
        }
    }
}

TEST(Simulate, CrossSimulatorInterEventLaw) {
    // Every 40th gap is kept so the retained gaps are far apart in time and
    // close to independent; the KS critical value assumes independence.
    std::vector<double> gaps[2];
    int which = 0;
    for (auto method : {SimMethod::cluster, SimMethod::thinning}) {
        for (std::uint64_t r = 0; r < 25; ++r) {
            const auto seq = simulate(scenario1(), config(20.0, method, 77), r);
            const auto ev = seq.events();
            for (std::size_t i = 40; i < ev.size(); i += 40) gaps[which].push_back(ev[i].time - ev[i - 1].time);
        }
        ++which;
    }
    const auto [d, crit] = ks_two_sample(gaps[0], gaps[1]);
    EXPECT_LT(d, crit);
}

TEST(Simulate, NonStationaryRefused) {
    for (auto method : {SimMethod::cluster, SimMethod::thinning})
        EXPECT_THROW(simulate(scenario3(), config(1.0, method), 0), NumericError);
    auto bad = config(1.0, SimMethod::cluster);
    bad.horizon = 0.0;
    EXPECT_THROW(simulate(scenario1(), bad, 0), ConfigError);
    EXPECT_THROW(sim_method_from_string("gibbs"), ConfigError);
}

TEST(Simulate, RunawayGuard) {
    // near-critical model with a tiny guard
    const HawkesModel m(0.04, {1.0}, {Kernel::indicator(24.9, 0.0, 0.04, 0.04)});
    Rng rng(3);
    bool thrown = false;
    for (int i = 0; i < 200 && !thrown; ++i) {
        try {
            simulate_single_cluster(m, 0, rng, 20);
        } catch (const NumericError&) {
            thrown = true;
        }
    }
    EXPECT_TRUE(thrown);
}

TEST(Simulate, ClusterSizeMatchesOracle) {
    const auto m = scenario1();
    Rng rng(99);
    for (int l = 0; l < 2; ++l) {
        std::vector<double> sizes;
        for (int i = 0; i < 20000; ++i)
            sizes.push_back(static_cast<double>(simulate_single_cluster(m, l, rng).size()));
        const double se = sample_sd(sizes) / std::sqrt(static_cast<double>(sizes.size()));
        EXPECT_NEAR(mean(sizes), expected_cluster_size(m, static_cast<std::size_t>(l)), 3.0 * se) << l;
    }
}

TEST(Simulate, ClusterAncestorFirstAndOffspringInSupport) {
    Rng rng(4);
    const auto c = simulate_single_cluster(scenario1(), 1, rng);
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c.front(), (Event{0.0, 1}));
    for (const auto& e : c) EXPECT_GE(e.time, 0.0);
}

TEST(Simulate, OffsetBinFrequencies) {
    const auto h = Kernel::step({0.0, 0.005, 0.02, 0.03, 0.04}, {40.0, 10.0, 0.0, 25.0});
    const double rho = h.mass();
    const std::vector<double> knots{0.0, 0.005, 0.02, 0.03, 0.04};
    const std::vector<double> heights{40.0, 10.0, 0.0, 25.0};
    Rng rng(12);
    const int n = 100000;
    std::vector<double> hits(4, 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = sample_offset(h, rng);
        ASSERT_GT(x, 0.0);
        ASSERT_LE(x, 0.04);
        hits[static_cast<std::size_t>(step_bin(knots, x))] += 1.0;
    }
    for (std::size_t j = 0; j < 4; ++j) {
        const double p = heights[j] * (knots[j + 1] - knots[j]) / rho;
        const double se = std::sqrt(p * (1.0 - p) / n);
        EXPECT_NEAR(hits[j] / n, p, 3.0 * se + 1e-12) << "bin " << j;
    }
}

TEST(Simulate, OffsetLawSmoothKernels) {
    // Fraction of draws below the kernel's mass-median.
    for (const auto& h : {Kernel::exponential(100.0, 100.0, 0.04), Kernel::trunc_gauss(0.5, 0.02, 0.004, 0.04)}) {
        double lo = 0.0, hi = 0.04;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (h.integral(0.0, mid) < 0.5 * h.mass() ? lo : hi) = mid;
        }
        Rng rng(8);
        const int n = 40000;
        int below = 0;
        for (int i = 0; i < n; ++i) below += sample_offset(h, rng) <= lo;
        EXPECT_NEAR(static_cast<double>(below) / n, 0.5, 3.0 * 0.5 / std::sqrt(n));
    }
}
