#include "hawkes/prior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_or_neg_inf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }
}  // namespace

std::string_view to_string(KnotScheme s) noexcept {
    return s == KnotScheme::regular ? "regular" : "random";
}

KnotScheme knot_scheme_from_string(std::string_view s) {
    if (s == "regular") return KnotScheme::regular;
    if (s == "random") return KnotScheme::random;
    throw ConfigError("unknown knot scheme '" + std::string(s) + "'");
}

void PriorConfig::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    };
    auto positive = [](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(std::string(name) + " must be > 0");
    };
    prob(p_delta, "p_delta");
    prob(pi_z, "pi_z");
    positive(eta_shape, "eta_shape");
    positive(eta_rate, "eta_rate");
    positive(s_beta, "s_beta");
    positive(s_nu, "s_nu");
    positive(dirichlet_alpha, "dirichlet_alpha");
    positive(support, "support");
    if (nonempty_active && p_delta > 0.0 && !(pi_z > 0.0))
        throw ConfigError("pi_z must be > 0 when active kernels need a non-zero bin");
    if (!std::isfinite(mu_beta) || !std::isfinite(mu_nu)) throw ConfigError("prior means must be finite");
}

double log_normal_pdf(double x, double mean, double sd) noexcept {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

double log_lognormal_pdf(double x, double mu, double sd) noexcept {
    if (!(x > 0.0)) return kNegInf;
    const double lx = std::log(x);
    return log_normal_pdf(lx, mu, sd) - lx;
}

double log_poisson_pmf(std::size_t n, double mean) noexcept {
    if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
    const double k = static_cast<double>(n);
    return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double log_gamma_pdf(double x, double shape, double rate) noexcept {
    if (!(x > 0.0)) return kNegInf;
    return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_dirichlet_pdf(const std::vector<double>& u, double alpha) noexcept {
    const double n = static_cast<double>(u.size());
    if (u.size() <= 1) return 0.0;
    double out = std::lgamma(alpha * n) - n * std::lgamma(alpha);
    for (double v : u) {
        if (!(v > 0.0)) return kNegInf;
        out += (alpha - 1.0) * std::log(v);
    }
    return out;
}

KernelParam null_param() { return KernelParam{}; }

std::vector<double> regular_knots(std::size_t bins, double support) {
    std::vector<double> knots(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j)
        knots[j] = support * static_cast<double>(j) / static_cast<double>(bins);
    knots.back() = support;
    return knots;
}

namespace {

std::vector<double> dirichlet_knots(std::size_t bins, double alpha, double support, Rng& rng) {
    std::gamma_distribution<double> gamma(alpha, 1.0);
    while (true) {
        std::vector<double> g(bins);
        for (auto& v : g) v = gamma(rng);
        const double total = std::accumulate(g.begin(), g.end(), 0.0);
        if (!(total > 0.0)) continue;
        double check = 0.0;
        for (auto& v : g) {
            v /= total;
            check += v;
        }
        if (std::abs(check - 1.0) > 1e-12) continue;
        std::vector<double> knots(bins + 1, 0.0);
        double acc = 0.0;
        bool increasing = true;
        for (std::size_t j = 0; j < bins; ++j) {
            acc += g[j];
            knots[j + 1] = j + 1 == bins ? support : support * acc;
            if (!(knots[j + 1] > knots[j])) increasing = false;
        }
        if (increasing) return knots;
    }
}

}  // namespace

KernelParam prior_sample_active(const PriorConfig& cfg, double eta, Rng& rng) {
    if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
    KernelParam p;
    p.delta = true;
    std::size_t bins = 1;
    if (eta > 0.0) bins += static_cast<std::size_t>(std::poisson_distribution<long long>(eta)(rng));
    std::bernoulli_distribution coin(cfg.pi_z);
    std::lognormal_distribution<double> height(cfg.mu_beta, cfg.s_beta);
    p.z.resize(bins);
    p.beta.resize(bins);
    bool any = false;
    while (!any) {
        for (std::size_t j = 0; j < bins; ++j) {
            p.z[j] = coin(rng) ? 1 : 0;
            any = any || p.z[j];
        }
        if (!cfg.nonempty_active || !(cfg.pi_z > 0.0)) break;
    }
    for (std::size_t j = 0; j < bins; ++j) p.beta[j] = p.z[j] ? height(rng) : 0.0;
    p.knots = cfg.knot_scheme == KnotScheme::regular
                  ? regular_knots(bins, cfg.support)
                  : dirichlet_knots(bins, cfg.dirichlet_alpha, cfg.support, rng);
    return p;
}

KernelParam prior_sample(const PriorConfig& cfg, double eta, Rng& rng) {
    if (!std::bernoulli_distribution(cfg.p_delta)(rng)) return null_param();
    return prior_sample_active(cfg, eta, rng);
}

void validate_param(const PriorConfig& cfg, const KernelParam& param) {
    if (!param.delta) {
        if (!param.knots.empty() || !param.z.empty() || !param.beta.empty())
            throw ConfigError("null kernel parameter must not carry bins");
        return;
    }
    const std::size_t bins = param.beta.size();
    if (bins == 0 || param.z.size() != bins || param.knots.size() != bins + 1)
        throw ConfigError("kernel parameter: inconsistent bin counts");
    if (param.knots.front() != 0.0 || std::abs(param.knots.back() - cfg.support) > 1e-12 * cfg.support)
        throw ConfigError("kernel parameter: knots must span [0, A]");
    for (std::size_t j = 0; j < bins; ++j) {
        if (!(param.knots[j + 1] > param.knots[j]))
            throw ConfigError("kernel parameter: knots must be strictly increasing");
        if (param.z[j] > 1) throw ConfigError("kernel parameter: z must be 0 or 1");
        if (param.z[j] ? !(param.beta[j] > 0.0 && std::isfinite(param.beta[j])) : param.beta[j] != 0.0)
            throw ConfigError("kernel parameter: heights must be positive exactly where z = 1");
    }
    if (cfg.knot_scheme == KnotScheme::regular) {
        const auto grid = regular_knots(bins, cfg.support);
        for (std::size_t j = 0; j <= bins; ++j)
            if (std::abs(grid[j] - param.knots[j]) > 1e-12 * cfg.support)
                throw ConfigError("kernel parameter: knots are not the regular grid");
    }
}

double prior_logdensity(const PriorConfig& cfg, double eta, const KernelParam& param) {
    validate_param(cfg, param);
    if (!param.delta) return log_or_neg_inf(1.0 - cfg.p_delta);
    const std::size_t bins = param.bins();
    double out = log_or_neg_inf(cfg.p_delta) + log_poisson_pmf(bins - 1, eta);
    if (cfg.nonempty_active) {
        bool any = false;
        for (auto z : param.z) any = any || z;
        if (!any) return kNegInf;
        // P(at least one z_j = 1 | J) = 1 - (1 - pi_z)^J
        const double none = static_cast<double>(bins) * std::log1p(-cfg.pi_z);
        out -= std::log(-std::expm1(none));
    }
    for (std::size_t j = 0; j < bins; ++j) {
        if (param.z[j])
            out += log_or_neg_inf(cfg.pi_z) + log_lognormal_pdf(param.beta[j], cfg.mu_beta, cfg.s_beta);
        else
            out += log_or_neg_inf(1.0 - cfg.pi_z);
    }
    if (cfg.knot_scheme == KnotScheme::random) {
        std::vector<double> u(bins);
        for (std::size_t j = 0; j < bins; ++j) u[j] = (param.knots[j + 1] - param.knots[j]) / cfg.support;
        out += log_dirichlet_pdf(u, cfg.dirichlet_alpha);
    }
    return out;
}

std::vector<double> nu_prior_sample(const PriorConfig& cfg, std::size_t dim, Rng& rng) {
    std::lognormal_distribution<double> draw(cfg.mu_nu, cfg.s_nu);
    std::vector<double> nu(dim);
    for (auto& v : nu) v = draw(rng);
    return nu;
}

double nu_prior_logdensity(const PriorConfig& cfg, const std::vector<double>& nu) {
    double out = 0.0;
    for (double v : nu) {
        if (!(v > 0.0)) return kNegInf;
        out += log_lognormal_pdf(v, cfg.mu_nu, cfg.s_nu);
    }
    return out;
}

GammaParams eta_posterior_update(double shape, double rate, const std::vector<std::size_t>& active_bins) {
    GammaParams out{shape, rate};
    for (std::size_t j : active_bins) {
        if (j < 1) throw ConfigError("eta update: bin counts must be >= 1");
        out.shape += static_cast<double>(j - 1);
        out.rate += 1.0;
    }
    return out;
}

StepKernel to_step(const KernelParam& param, double support) {
    if (!param.delta) return StepKernel{{0.0, support}, {0.0}};
    return StepKernel{param.knots, param.beta};
}

Kernel to_kernel(const KernelParam& param) {
    if (!param.delta) return Kernel::null();
    return Kernel::step(param.knots, param.beta);
}

}  // namespace hawkes
