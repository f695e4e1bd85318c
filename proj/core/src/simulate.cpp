#include "hawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

#include "hawkes/errors.hpp"

namespace hawkes {

std::string_view to_string(SimMethod m) noexcept {
    return m == SimMethod::cluster ? "cluster" : "thinning";
}

SimMethod sim_method_from_string(std::string_view s) {
    if (s == "cluster") return SimMethod::cluster;
    if (s == "thinning") return SimMethod::thinning;
    throw ConfigError("unknown simulation method '" + std::string(s) + "'");
}

namespace {

double uniform_open_closed(Rng& rng) {
    // (0, 1]
    return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void require_stationary(const HawkesModel& model) {
    const auto report = spectral_check(model);
    if (!report.stationary)
        throw NumericError("cannot simulate a non-stationary model (spectral radius " +
                               std::to_string(report.spectral_radius) + ")",
                           {report.spectral_radius, report.spectral_norm});
}

// Offspring law of one (l, k) pair: Poisson(mass) children at offsets ~ h / mass.
struct OffspringLaw {
    double mass = 0.0;
    const Kernel* kernel = nullptr;
    std::vector<double> cumulative;  // step kernels: cumulative bin masses
};

std::vector<OffspringLaw> offspring_laws(const HawkesModel& model) {
    const auto k = model.dim();
    std::vector<OffspringLaw> laws(k * k);
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t m = 0; m < k; ++m) {
            auto& law = laws[l * k + m];
            law.kernel = &model.kernel(l, m);
            law.mass = law.kernel->mass();
            if (const auto* s = law.kernel->as_step()) {
                double acc = 0.0;
                for (std::size_t j = 0; j < s->heights.size(); ++j) {
                    acc += s->heights[j] * (s->knots[j + 1] - s->knots[j]);
                    law.cumulative.push_back(acc);
                }
            }
        }
    }
    return laws;
}

double draw_offset(const OffspringLaw& law, Rng& rng) {
    if (const auto* s = law.kernel->as_step()) {
        const double target = std::uniform_real_distribution<double>(0.0, law.cumulative.back())(rng);
        auto it = std::upper_bound(law.cumulative.begin(), law.cumulative.end(), target);
        auto j = static_cast<std::size_t>(it - law.cumulative.begin());
        j = std::min(j, s->heights.size() - 1);  // upper_bound skips empty bins
        const double lo = s->knots[j];
        const double hi = s->knots[j + 1];
        return lo + (hi - lo) * uniform_open_closed(rng);
    }
    return sample_offset(*law.kernel, rng);
}

}  // namespace

double sample_offset(const Kernel& h, Rng& rng) {
    const auto& v = h.variant();
    if (const auto* s = std::get_if<StepKernel>(&v)) {
        OffspringLaw law;
        law.kernel = &h;
        double acc = 0.0;
        for (std::size_t j = 0; j < s->heights.size(); ++j) {
            acc += s->heights[j] * (s->knots[j + 1] - s->knots[j]);
            law.cumulative.push_back(acc);
        }
        if (!(acc > 0.0)) throw ConfigError("sample_offset needs a kernel with positive mass");
        return draw_offset(law, rng);
    }
    if (const auto* e = std::get_if<ExponentialKernel>(&v)) {
        const double u = uniform_open_closed(rng);
        if (e->rate == 0.0) return e->support * u;
        // inverse CDF of the exponential truncated to (0, A]
        const double tail = -std::expm1(-e->rate * e->support);
        return std::min(e->support, -std::log1p(-u * tail) / e->rate);
    }
    if (const auto* g = std::get_if<TruncGaussKernel>(&v)) {
        std::normal_distribution<double> normal(g->center, g->width);
        for (int attempt = 0; attempt < 1'000'000; ++attempt) {
            const double t = normal(rng);
            if (t > 0.0 && t <= g->support) return t;
        }
        throw NumericError("truncated gaussian kernel has negligible mass on its support");
    }
    throw ConfigError("sample_offset needs a kernel with positive mass");
}

std::vector<Event> simulate_single_cluster(const HawkesModel& model, int ancestor, Rng& rng,
                                           std::size_t max_events) {
    const auto laws = offspring_laws(model);
    const auto k = model.dim();
    std::vector<Event> cluster{{0.0, ancestor}};
    for (std::size_t next = 0; next < cluster.size(); ++next) {
        const Event parent = cluster[next];
        for (std::size_t m = 0; m < k; ++m) {
            const auto& law = laws[static_cast<std::size_t>(parent.mark) * k + m];
            if (!(law.mass > 0.0)) continue;
            const auto n = std::poisson_distribution<long long>(law.mass)(rng);
            for (long long c = 0; c < n; ++c)
                cluster.push_back({parent.time + draw_offset(law, rng), static_cast<int>(m)});
        }
        if (cluster.size() > max_events)
            throw NumericError("runaway cluster: more than " + std::to_string(max_events) + " events");
    }
    return cluster;
}

EventSequence simulate_cluster(const HawkesModel& model, const SimConfig& cfg, Rng& rng) {
    require_stationary(model);
    if (!(cfg.horizon > 0.0)) throw ConfigError("simulation horizon T must be > 0");
    if (cfg.burn_in < 0.0) throw ConfigError("burn-in must be >= 0");
    const double a = cfg.pre_window.value_or(model.support());
    const double keep_from = -a;
    const double immigrant_from = -cfg.burn_in - 2.0 * a;
    const double t_end = cfg.horizon;
    const auto laws = offspring_laws(model);
    const auto k = model.dim();

    std::vector<Event> kept;
    std::vector<Event> cluster;
    for (std::size_t l = 0; l < k; ++l) {
        const double span = t_end - immigrant_from;
        const auto n = std::poisson_distribution<long long>(model.nu(l) * span)(rng);
        std::uniform_real_distribution<double> where(immigrant_from, t_end);
        for (long long i = 0; i < n; ++i) {
            cluster.clear();
            cluster.push_back({where(rng), static_cast<int>(l)});
            for (std::size_t next = 0; next < cluster.size(); ++next) {
                const Event parent = cluster[next];
                for (std::size_t m = 0; m < k; ++m) {
                    const auto& law = laws[static_cast<std::size_t>(parent.mark) * k + m];
                    if (!(law.mass > 0.0)) continue;
                    const auto children = std::poisson_distribution<long long>(law.mass)(rng);
                    for (long long c = 0; c < children; ++c) {
                        const double t = parent.time + draw_offset(law, rng);
                        // later generations only move forward in time
                        if (t < t_end) cluster.push_back({t, static_cast<int>(m)});
                    }
                }
                if (cluster.size() > cfg.max_cluster_events)
                    throw NumericError("runaway cluster: more than " +
                                       std::to_string(cfg.max_cluster_events) + " events");
            }
            for (const auto& e : cluster)
                if (e.time >= keep_from && e.time < t_end) kept.push_back(e);
        }
    }
    return EventSequence(std::move(kept), keep_from, t_end, static_cast<int>(k));
}

EventSequence simulate_thinning(const HawkesModel& model, const SimConfig& cfg, Rng& rng) {
    require_stationary(model);
    if (!(cfg.horizon > 0.0)) throw ConfigError("simulation horizon T must be > 0");
    if (cfg.burn_in < 0.0) throw ConfigError("burn-in must be >= 0");
    const double a = cfg.pre_window.value_or(model.support());
    const double support = model.support();
    const double keep_from = -a;
    const double t_end = cfg.horizon;
    const auto k = model.dim();

    // Bound contribution of one active point of mark l: sum_k sup h_{l,k}.
    std::vector<double> sup_row(k, 0.0);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t m = 0; m < k; ++m) sup_row[l] += model.kernel(l, m).sup();
    double nu_total = 0.0;
    for (double v : model.nu()) nu_total += v;

    std::deque<Event> active;
    auto bound_of = [&] {
        double b = nu_total;
        for (const auto& e : active) b += sup_row[static_cast<std::size_t>(e.mark)];
        return b;
    };

    std::vector<Event> kept;
    std::vector<double> lambda(k);
    std::exponential_distribution<double> unit_exp(1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = -cfg.burn_in - a;
    double bound = bound_of();
    std::size_t accepted = 0;
    while (true) {
        const double expiry = active.empty() ? std::numeric_limits<double>::infinity()
                                             : active.front().time + support;
        const double candidate = t + unit_exp(rng) / bound;
        if (candidate >= expiry && expiry < t_end) {
            t = expiry;
            active.pop_front();
            bound = bound_of();
            continue;
        }
        if (candidate >= t_end) break;
        t = candidate;
        double total = 0.0;
        for (std::size_t m = 0; m < k; ++m) {
            double v = model.nu(m);
            for (const auto& e : active) v += model.kernel(static_cast<std::size_t>(e.mark), m)(t - e.time);
            lambda[m] = v;
            total += v;
        }
        if (unit(rng) * bound >= total) continue;
        double pick = unit(rng) * total;
        std::size_t mark = 0;
        while (mark + 1 < k && pick >= lambda[mark]) pick -= lambda[mark++];
        active.push_back({t, static_cast<int>(mark)});
        bound = bound_of();
        if (t >= keep_from) kept.push_back(active.back());
        if (++accepted > cfg.max_cluster_events)
            throw NumericError("runaway simulation: more than " +
                               std::to_string(cfg.max_cluster_events) + " events");
    }
    return EventSequence(std::move(kept), keep_from, t_end, static_cast<int>(k));
}

EventSequence simulate(const HawkesModel& model, const SimConfig& cfg, std::uint64_t stream_id) {
    Rng rng = seed_split(cfg.seed, stream_id);
    return cfg.method == SimMethod::cluster ? simulate_cluster(model, cfg, rng)
                                            : simulate_thinning(model, cfg, rng);
}

}  // namespace hawkes
