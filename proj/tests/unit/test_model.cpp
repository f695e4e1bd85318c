#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "hawkes/errors.hpp"
#include "hawkes/model.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/scenarios.hpp"

using namespace hawkes;

namespace {

Kernel s1_h11() { return Kernel::step({0.0, 0.02, 0.04}, {30.0, 0.0}); }

// sum_{n >= 0} (rho^T)^n applied to v, truncated once the terms vanish.
Eigen::VectorXd neumann(const Eigen::MatrixXd& rho, const Eigen::VectorXd& v) {
    Eigen::VectorXd term = v, total = v;
    for (int n = 0; n < 5000 && term.cwiseAbs().maxCoeff() > 1e-15; ++n) {
        term = rho.transpose() * term;
        total += term;
    }
    return total;
}

}  // namespace

TEST(Kernel, StepEvaluation) {
    EXPECT_DOUBLE_EQ(s1_h11()(0.01), 30.0);
    EXPECT_DOUBLE_EQ(s1_h11()(0.02), 30.0);   // right-closed bins
    EXPECT_DOUBLE_EQ(s1_h11()(0.0), 0.0);
    EXPECT_DOUBLE_EQ(s1_h11()(0.03), 0.0);
    EXPECT_DOUBLE_EQ(s1_h11()(0.05), 0.0);
    EXPECT_DOUBLE_EQ(s1_h11()(-0.01), 0.0);
}

TEST(Kernel, NullEvaluation) {
    EXPECT_EQ(Kernel::null()(0.01), 0.0);
    EXPECT_EQ(Kernel::null().mass(), 0.0);
    EXPECT_EQ(Kernel::null().integral(0.0, 1.0), 0.0);
}

TEST(Kernel, ExponentialEvaluation) {
    const auto h = Kernel::exponential(100.0, 100.0, 0.04);
    EXPECT_NEAR(h(0.01), 36.788, 5e-4);
    EXPECT_NEAR(h(0.01), 100.0 * std::exp(-1.0), 1e-12);
    EXPECT_EQ(h(0.041), 0.0);
}

TEST(Kernel, Integrals) {
    EXPECT_NEAR(s1_h11().integral(0.0, 0.04), 0.6, 1e-15);
    EXPECT_NEAR(Kernel::exponential(100.0, 100.0, 0.04).integral(0.0, 0.04), 0.98168, 5e-6);
    EXPECT_NEAR(Kernel::exponential(100.0, 100.0, 0.04).integral(0.0, 0.04), 1.0 - std::exp(-4.0), 1e-14);
    for (const auto& h : {s1_h11(), Kernel::exponential(100.0, 100.0, 0.04),
                          Kernel::trunc_gauss(0.5, 0.02, 0.004, 0.04), Kernel::null()})
        EXPECT_EQ(h.integral(0.05, 0.10), 0.0);
    EXPECT_THROW(s1_h11().integral(0.02, 0.01), ConfigError);
}

TEST(Kernel, StepIntegralIsBinSum) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int bins = 1 + static_cast<int>(u(rng) * 6);
        std::vector<double> knots{0.0};
        std::vector<double> heights;
        for (int j = 1; j < bins; ++j) knots.push_back(knots.back() + 0.04 / bins);
        knots.push_back(0.04);
        double sum = 0.0;
        for (int j = 0; j < bins; ++j) {
            heights.push_back(u(rng) < 0.3 ? 0.0 : 50.0 * u(rng));
            sum += heights.back() * (knots[j + 1] - knots[j]);
        }
        const auto h = Kernel::step(knots, heights);
        EXPECT_NEAR(h.mass(), sum, 1e-13);
        // partial window split at an arbitrary point is additive
        const double c = 0.04 * u(rng);
        EXPECT_NEAR(h.integral(0.0, c) + h.integral(c, 0.04), sum, 1e-13);
    }
}

TEST(Kernel, SmoothIntegralsMatchQuadrature) {
    for (const auto& h : {Kernel::exponential(100.0, 100.0, 0.04), Kernel::trunc_gauss(0.5, 0.02, 0.004, 0.04)}) {
        const int n = 200000;
        const double lo = 0.003, hi = 0.031, w = (hi - lo) / n;
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += h(lo + (i + 0.5) * w) * w;
        EXPECT_NEAR(h.integral(lo, hi), s, 1e-9);
    }
}

TEST(Kernel, SupremaClosedForm) {
    EXPECT_DOUBLE_EQ(s1_h11().sup(), 30.0);
    EXPECT_DOUBLE_EQ(Kernel::exponential(100.0, 100.0, 0.04).sup(), 100.0);
    EXPECT_NEAR(Kernel::trunc_gauss(0.5, 0.02, 0.004, 0.04).sup(), 0.5 / (0.004 * std::sqrt(2.0 * M_PI)), 1e-9);
}

TEST(Kernel, FactoriesRejectInvalid) {
    EXPECT_THROW(Kernel::step({0.0, 0.02}, {1.0, 2.0}), ConfigError);
    EXPECT_THROW(Kernel::step({0.0, 0.03, 0.02}, {1.0, 2.0}), ConfigError);
    EXPECT_THROW(Kernel::step({0.0, 0.04}, {-1.0}), ConfigError);
    EXPECT_THROW(Kernel::exponential(1.0, -1.0, 0.04), ConfigError);
}

TEST(Model, BranchingMatrixScenario1) {
    const auto rho = branching_matrix(scenario1());
    EXPECT_NEAR(rho(0, 0), 0.6, 1e-15);
    EXPECT_NEAR(rho(0, 1), 0.3, 1e-15);
    EXPECT_NEAR(rho(1, 0), 0.3, 1e-15);
    EXPECT_EQ(rho(1, 1), 0.0);
    EXPECT_TRUE(branching_matrix(HawkesModel::poisson(0.04, {1.0, 2.0, 3.0})).isZero());
}

TEST(Model, SpectralScenario1) {
    const auto r = spectral_check(scenario1());
    EXPECT_NEAR(r.spectral_radius, (0.6 + std::sqrt(0.72)) / 2.0, 1e-10);
    EXPECT_NEAR(r.spectral_radius, 0.7243, 1e-4);
    EXPECT_TRUE(r.stationary);
    // symmetric rho: radius equals norm
    EXPECT_NEAR(r.spectral_norm, r.spectral_radius, 1e-9);
}

TEST(Model, SpectralTrivia) {
    const auto z = spectral_check(Eigen::MatrixXd::Zero(3, 3));
    EXPECT_EQ(z.spectral_radius, 0.0);
    EXPECT_TRUE(z.stationary);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 1.2;
    const auto r = spectral_check(d);
    EXPECT_NEAR(r.spectral_radius, 1.2, 1e-12);
    EXPECT_FALSE(r.stationary);
}

TEST(Model, SpectralAgainstEigenOnRandomMatrices) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        const int k = 1 + rep % 6;
        Eigen::MatrixXd m(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) m(i, j) = u(rng) < 0.3 ? 0.0 : u(rng);
        m(0, 0) += 0.05;  // keeps the matrix away from the periodic / nilpotent cases
        const auto r = spectral_check(m);
        const double radius = m.eigenvalues().cwiseAbs().maxCoeff();
        const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
        EXPECT_NEAR(r.spectral_radius, radius, 1e-8 * std::max(1.0, radius));
        EXPECT_NEAR(r.spectral_norm, norm, 1e-8 * std::max(1.0, norm));
        EXPECT_LE(r.spectral_radius, r.spectral_norm + 1e-9);
        EXPECT_EQ(r.stationary, r.spectral_radius < 1.0);
        if (m.isApprox(m.transpose())) EXPECT_NEAR(r.spectral_radius, r.spectral_norm, 1e-8);
    }
}

TEST(Model, MeanIntensityScenario1) {
    const auto mu = mean_intensity(scenario1());
    EXPECT_NEAR(mu(0), 83.871, 1e-3);
    EXPECT_NEAR(mu(1), 45.161, 1e-3);
    const auto oracle = neumann(branching_matrix(scenario1()), Eigen::Vector2d(20.0, 20.0));
    EXPECT_NEAR(mu(0), oracle(0), 1e-9);
    EXPECT_NEAR(mu(1), oracle(1), 1e-9);
}

TEST(Model, MeanIntensityPoisson) {
    const auto mu = mean_intensity(HawkesModel::poisson(0.04, {20.0, 20.0}));
    EXPECT_EQ(mu(0), 20.0);
    EXPECT_EQ(mu(1), 20.0);
}

TEST(Model, MeanIntensityResidualScenario2) {
    const auto m = scenario2();
    const auto mu = mean_intensity(m);
    const auto rho = branching_matrix(m);
    const Eigen::VectorXd nu = Eigen::Map<const Eigen::VectorXd>(m.nu().data(), 8);
    EXPECT_LT((mu - rho.transpose() * mu - nu).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GT(mu.minCoeff(), 0.0);
}

TEST(Model, ClusterSizeScenario1) {
    const auto m = scenario1();
    EXPECT_NEAR(expected_cluster_size(m, 0), 1.3 / 0.31, 1e-12);
    EXPECT_NEAR(expected_cluster_size(m, 1), 0.7 / 0.31, 1e-12);
    EXPECT_LT(expected_cluster_size(m, 1), expected_cluster_size(m, 0));
    for (std::size_t l = 0; l < 2; ++l) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e(static_cast<int>(l)) = 1.0;
        EXPECT_NEAR(expected_cluster_size(m, l), neumann(branching_matrix(m), e).sum(), 1e-9);
    }
    const auto p = HawkesModel::poisson(0.04, {5.0, 5.0, 5.0});
    for (std::size_t l = 0; l < 3; ++l) EXPECT_EQ(expected_cluster_size(p, l), 1.0);
}

TEST(Model, StationaryResidualOnRandomModels) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t k = 1 + rep % 5;
        std::vector<Kernel> ks;
        std::vector<double> nu;
        for (std::size_t i = 0; i < k; ++i) nu.push_back(1.0 + 30.0 * u(rng));
        for (std::size_t i = 0; i < k * k; ++i)
            ks.push_back(Kernel::indicator(u(rng) * 20.0 / static_cast<double>(k), 0.0, 0.02, 0.04));
        const HawkesModel m(0.04, nu, ks);
        if (!spectral_check(m).stationary) {
            EXPECT_THROW(mean_intensity(m), NumericError);
            continue;
        }
        const auto mu = mean_intensity(m);
        const auto rho = branching_matrix(m);
        const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(nu.data(), static_cast<int>(k));
        EXPECT_LT((mu - rho.transpose() * mu - v).cwiseAbs().maxCoeff(), 1e-10 * mu.maxCoeff());
        for (std::size_t l = 0; l < k; ++l) EXPECT_GE(expected_cluster_size(m, l), 1.0);
    }
}

TEST(Scenarios, Golden) {
    const auto s1 = scenario1();
    EXPECT_EQ(s1.dim(), 2u);
    EXPECT_EQ(s1.support(), 0.04);
    EXPECT_EQ(s1.nu(), (std::vector<double>{20.0, 20.0}));
    EXPECT_EQ(s1.kernel(0, 0)(0.015), 30.0);
    EXPECT_EQ(s1.kernel(0, 0)(0.025), 0.0);
    EXPECT_EQ(s1.kernel(1, 0)(0.005), 30.0);
    EXPECT_EQ(s1.kernel(1, 0)(0.015), 0.0);
    EXPECT_EQ(s1.kernel(0, 1)(0.005), 0.0);
    EXPECT_EQ(s1.kernel(0, 1)(0.015), 30.0);
    EXPECT_TRUE(s1.kernel(1, 1).is_null() || s1.kernel(1, 1).mass() == 0.0);

    const auto s2 = scenario2();
    EXPECT_EQ(s2.dim(), 8u);
    const std::vector<std::pair<int, int>> edges{{2, 1}, {3, 1}, {2, 2}, {1, 3}, {2, 3},
                                                 {8, 5}, {5, 6}, {6, 7}, {7, 8}};
    int active = 0;
    for (std::size_t l = 0; l < 8; ++l)
        for (std::size_t k = 0; k < 8; ++k) {
            const double mass = s2.kernel(l, k).mass();
            const bool edge = std::find(edges.begin(), edges.end(),
                                        std::pair<int, int>(static_cast<int>(l) + 1, static_cast<int>(k) + 1)) != edges.end();
            EXPECT_NEAR(mass, edge ? 0.6 : 0.0, 1e-15);
            active += mass > 0.0;
            if (edge) {
                EXPECT_EQ(s2.kernel(l, k)(0.02), 30.0);
                EXPECT_EQ(s2.kernel(l, k)(0.021), 0.0);
            }
        }
    EXPECT_EQ(active, 9);
    EXPECT_TRUE(spectral_check(s2).stationary);

    const auto s3 = scenario3();
    const auto rho = branching_matrix(s3);
    EXPECT_NEAR(rho(0, 0), 1.0 - std::exp(-4.0), 1e-12);
    EXPECT_NEAR(rho(1, 0), 0.6, 1e-15);
    EXPECT_NEAR(rho(0, 1), 0.5 * std::erf(0.02 / (0.004 * std::sqrt(2.0))), 1e-12);
    EXPECT_EQ(rho(1, 1), 0.0);
    const auto r3 = spectral_check(s3);
    EXPECT_NEAR(r3.spectral_radius, 1.226, 1e-3);
    EXPECT_FALSE(r3.stationary);
    EXPECT_THROW(mean_intensity(s3), NumericError);
    EXPECT_THROW(expected_cluster_size(s3, 0), NumericError);
    EXPECT_THROW(scenario(4), ConfigError);
}

TEST(Model, RejectsInvalid) {
    EXPECT_THROW(HawkesModel(0.04, {1.0}, {}), ConfigError);
    EXPECT_THROW(HawkesModel(0.04, {0.0}, {Kernel::null()}), ConfigError);
    EXPECT_THROW(HawkesModel(0.02, {1.0}, {s1_h11()}), ConfigError);
}

TEST(ModelIo, JsonRoundTrip) {
    for (const auto& m : {scenario1(), scenario2(), scenario3(), HawkesModel::poisson(0.04, {1.5, 2.5})}) {
        const auto text = model_to_json(m);
        EXPECT_EQ(model_from_json(text), m);
        EXPECT_EQ(model_to_json(model_from_json(text)), text);
    }
}

TEST(ModelIo, RejectsMalformed) {
    EXPECT_THROW(model_from_json("{"), ConfigError);
    EXPECT_THROW(model_from_json(R"({"K": 1, "A": 0.04, "nu": [1.0], "kernels": [[{"type": "spline", "params": {}}]]})"),
                 ConfigError);
    EXPECT_THROW(model_from_json(R"({"K": 2, "A": 0.04, "nu": [1.0], "kernels": [[{"type": "null", "params": {}}]]})"),
                 ConfigError);
}
