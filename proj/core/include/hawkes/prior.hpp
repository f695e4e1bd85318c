#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hawkes/kernel.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

enum class KnotScheme { regular, random };

std::string_view to_string(KnotScheme s) noexcept;
KnotScheme knot_scheme_from_string(std::string_view s);

/// Hyperparameters of the hierarchical histogram prior on (nu, h).
struct PriorConfig {
    double p_delta = 0.5;        // P(delta = 1)
    double eta_shape = 3.0;      // eta ~ Gamma(shape, rate)
    double eta_rate = 1.0;
    double pi_z = 0.5;           // P(Z_j = 1)
    double mu_beta = 3.5;        // log beta_j ~ N(mu_beta, s_beta^2) when Z_j = 1
    double s_beta = 1.0;
    double mu_nu = 3.5;          // log nu_k ~ N(mu_nu, s_nu^2)
    double s_nu = 1.0;
    double dirichlet_alpha = 2.0;  // bin widths / A ~ Dirichlet(alpha, ..., alpha)
    KnotScheme knot_scheme = KnotScheme::random;
    double support = 0.04;       // A
    // delta = 1 means h is not identically zero: given delta = 1 and J, the
    // indicators z are iid Bern(pi_z) conditioned on at least one z_j = 1.
    // false gives plain iid indicators.
    bool nonempty_active = true;

    // Throws ConfigError: probabilities must lie in [0, 1], scales and
    // shapes must be positive.
    void validate() const;
};

/// Prior-side parameterisation of one interaction function:
/// h(t) = delta * sum_j beta_j 1{t in (t_{j-1}, t_j]}, beta_j > 0 iff z_j = 1.
struct KernelParam {
    bool delta = false;
    std::vector<double> knots;   // J + 1 values, 0 = t_0 < ... < t_J = A; empty when delta = 0
    std::vector<std::uint8_t> z;
    std::vector<double> beta;

    std::size_t bins() const noexcept { return beta.size(); }
    friend bool operator==(const KernelParam&, const KernelParam&) = default;
};

KernelParam null_param();

// Regular grid t_j = j A / J.
std::vector<double> regular_knots(std::size_t bins, double support);

// Draws (delta, J, z, beta, knots) from the hierarchy given eta.
KernelParam prior_sample(const PriorConfig& cfg, double eta, Rng& rng);

// Same hierarchy conditional on delta = 1.
KernelParam prior_sample_active(const PriorConfig& cfg, double eta, Rng& rng);

// log p(delta) + [delta] ( log p(J | eta) + log p(z | J)
//   + sum_{z_j = 1} log LN(beta_j; mu_beta, s_beta^2) + [random] log Dir(widths / A; alpha) ).
// Zero heights enter through the atom P(Z = 0). With nonempty_active, p(z | J)
// is the conditioned law and an all-zero z has density -infinity. Throws ConfigError for a
// structurally invalid parameter.
double prior_logdensity(const PriorConfig& cfg, double eta, const KernelParam& param);

// Checks knots/z/beta consistency for the configured scheme.
void validate_param(const PriorConfig& cfg, const KernelParam& param);

std::vector<double> nu_prior_sample(const PriorConfig& cfg, std::size_t dim, Rng& rng);
// Sum of log-normal log densities; -infinity if any coordinate is <= 0.
double nu_prior_logdensity(const PriorConfig& cfg, const std::vector<double>& nu);

struct GammaParams {
    double shape = 0.0;
    double rate = 0.0;
};

// Conjugate update for eta given the bin counts J of the active kernels:
// shape + sum (J - 1), rate + #active.
GammaParams eta_posterior_update(double shape, double rate, const std::vector<std::size_t>& active_bins);

StepKernel to_step(const KernelParam& param, double support);
Kernel to_kernel(const KernelParam& param);

// Scalar log densities used throughout the sampler.
double log_normal_pdf(double x, double mean, double sd) noexcept;       // Gaussian
double log_lognormal_pdf(double x, double mu, double sd) noexcept;      // -inf for x <= 0
double log_poisson_pmf(std::size_t n, double mean) noexcept;
double log_gamma_pdf(double x, double shape, double rate) noexcept;
// Symmetric Dirichlet density of a point on the simplex, w.r.t. Lebesgue
// measure on its first J - 1 coordinates. Zero for J = 1.
double log_dirichlet_pdf(const std::vector<double>& u, double alpha) noexcept;

}  // namespace hawkes
