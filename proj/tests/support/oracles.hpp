#pragma once

// Independent reference computations used as test oracles.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/model.hpp"

namespace hawkes::testing {

// lambda^k at t from a plain scan over all events (left limit).
inline double brute_intensity(const HawkesModel& m, const EventSequence& seq, std::size_t k, double t) {
    double v = m.nu(k);
    for (const auto& e : seq.events())
        if (e.time < t) v += m.kernel(static_cast<std::size_t>(e.mark), k)(t - e.time);
    return v;
}

// Midpoint Riemann sum of lambda^k over [0, T] with cells no wider than `dt`.
// Cell edges include every jump of the integrand (event times shifted by the
// kernel knots), so the only error left is the smooth-part O(dt^2) term.
inline double riemann_compensator(const HawkesModel& m, const EventSequence& seq, std::size_t k, double horizon,
                                  double dt) {
    const auto events = seq.events();
    const double a = m.support();
    std::vector<double> edges{0.0, horizon};
    for (const auto& e : events) {
        const auto& h = m.kernel(static_cast<std::size_t>(e.mark), k);
        if (h.is_null()) continue;
        std::vector<double> jumps{0.0, h.support()};
        if (const auto* s = h.as_step()) jumps = s->knots;
        for (double j : jumps)
            if (e.time + j > 0.0 && e.time + j < horizon) edges.push_back(e.time + j);
    }
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    std::size_t first = 0;
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
        const double len = edges[s + 1] - edges[s];
        if (len <= 0.0) continue;
        const auto cells = static_cast<std::size_t>(std::ceil(len / dt));
        const double w = len / static_cast<double>(cells);
        for (std::size_t c = 0; c < cells; ++c) {
            const double t = edges[s] + (static_cast<double>(c) + 0.5) * w;
            while (first < events.size() && events[first].time < t - a) ++first;
            double v = m.nu(k);
            for (std::size_t i = first; i < events.size() && events[i].time < t; ++i)
                v += m.kernel(static_cast<std::size_t>(events[i].mark), k)(t - events[i].time);
            total += v * w;
        }
    }
    return total;
}

inline double chi2_critical(double dof, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

// Pearson statistic over cells with expected count >= 5 (smaller cells pooled
// into the last retained one). Returns {statistic, degrees of freedom}.
inline std::pair<double, double> pearson(const std::vector<double>& observed, const std::vector<double>& expected) {
    std::vector<double> o, e;
    double po = 0.0, pe = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        po += observed[i];
        pe += expected[i];
        if (pe >= 5.0) {
            o.push_back(po);
            e.push_back(pe);
            po = pe = 0.0;
        }
    }
    if (pe > 0.0 || po > 0.0) {
        if (e.empty()) {
            o.push_back(po);
            e.push_back(pe);
        } else {
            o.back() += po;
            e.back() += pe;
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < o.size(); ++i) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    return {stat, static_cast<double>(o.size()) - 1.0};
}

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Autocorrelation-aware standard error of the mean: batch means over `batches` blocks.
inline double batch_se(const std::vector<double>& v, std::size_t batches = 50) {
    const std::size_t len = v.size() / batches;
    std::vector<double> bm;
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += v[i];
        bm.push_back(s / static_cast<double>(len));
    }
    return sample_sd(bm) / std::sqrt(static_cast<double>(batches));
}

}  // namespace hawkes::testing
