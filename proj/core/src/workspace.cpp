#include "hawkes/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hawkes/errors.hpp"

namespace hawkes {

StepKernel zero_step(double support) { return StepKernel{{0.0, support}, {0.0}}; }

namespace {

bool all_zero(const StepKernel& h) {
    return std::all_of(h.heights.begin(), h.heights.end(), [](double v) { return v == 0.0; });
}

double step_value(const StepKernel& h, double t) {
    const int j = step_bin(h.knots, t);
    return j < 0 ? 0.0 : h.heights[static_cast<std::size_t>(j)];
}

double step_mass(const StepKernel& h) {
    double m = 0.0;
    for (std::size_t j = 0; j < h.heights.size(); ++j) m += h.heights[j] * (h.knots[j + 1] - h.knots[j]);
    return m;
}

// Calls fn(a, b, old_value, new_value) for every maximal piece (a, b] of
// [0, max support] on which both step functions are constant.
template <class Fn>
void for_each_common_piece(const StepKernel& old_h, const StepKernel& new_h, Fn&& fn) {
    std::vector<double> cuts;
    cuts.reserve(old_h.knots.size() + new_h.knots.size());
    std::merge(old_h.knots.begin(), old_h.knots.end(), new_h.knots.begin(), new_h.knots.end(),
               std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = cuts[i + 1];
        const double mid = 0.5 * (a + b);
        fn(a, b, step_value(old_h, mid), step_value(new_h, mid));
    }
}

}  // namespace

LikelihoodWorkspace::LikelihoodWorkspace(const EventSequence& seq, double horizon, double support)
    : dim_(static_cast<std::size_t>(seq.dim())), horizon_(horizon), support_(support) {
    if (!(support_ > 0.0)) throw ConfigError("workspace: support A must be > 0");
    if (!(horizon_ > 0.0)) throw ConfigError("workspace: horizon T must be > 0");
    if (seq.t_start() > -support_ + 1e-12)
        throw ConfigError("workspace: event sequence must cover [-A, 0)");
    if (horizon_ > seq.t_end() + 1e-12) throw ConfigError("workspace: horizon T exceeds the event window");

    targets_.assign(dim_, {});
    coverage_.assign(dim_, {});
    pairs_.assign(dim_ * dim_, {});

    std::vector<std::vector<std::uint32_t>> target_index(dim_);
    const auto events = seq.events();
    std::vector<std::uint32_t> point_of(events.size(), 0);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        const auto k = static_cast<std::size_t>(e.mark);
        if (e.time >= 0.0 && e.time < horizon_) {
            point_of[i] = static_cast<std::uint32_t>(targets_[k].size());
            targets_[k].push_back(e.time);
        }
        if (e.time >= -support_ && e.time < horizon_) {
            const double lo = std::max(0.0, -e.time);
            const double hi = std::min(support_, horizon_ - e.time);
            if (lo == 0.0 && hi == support_)
                ++coverage_[k].full;
            else if (hi > lo)
                coverage_[k].edge.emplace_back(lo, hi);
        }
    }

    // Offsets grouped per (l, k), then sorted.
    std::vector<std::vector<std::pair<double, std::uint32_t>>> raw(dim_ * dim_);
    std::size_t window_begin = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& t = events[i];
        if (t.time < 0.0 || t.time >= horizon_) continue;
        while (window_begin < i && events[window_begin].time < t.time - support_) ++window_begin;
        const auto k = static_cast<std::size_t>(t.mark);
        for (std::size_t j = window_begin; j < i; ++j) {
            const auto& s = events[j];
            const double offset = t.time - s.time;
            if (!(offset > 0.0) || offset > support_ || s.time < -support_) continue;
            raw[static_cast<std::size_t>(s.mark) * dim_ + k].emplace_back(offset, point_of[i]);
        }
    }
    for (std::size_t p = 0; p < raw.size(); ++p) {
        auto& r = raw[p];
        std::sort(r.begin(), r.end());
        pairs_[p].offset.reserve(r.size());
        pairs_[p].point.reserve(r.size());
        for (const auto& [off, pt] : r) {
            pairs_[p].offset.push_back(off);
            pairs_[p].point.push_back(pt);
        }
    }

    nu_.assign(dim_, 1.0);
    kernels_.assign(dim_ * dim_, zero_step(support_));
    scratch_delta_.resize(dim_);
    scratch_stamp_.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        scratch_delta_[k].assign(targets_[k].size(), 0.0);
        scratch_stamp_[k].assign(targets_[k].size(), 0);
    }
    rebuild();
}

void LikelihoodWorkspace::reset(std::span<const double> nu, std::span<const StepKernel> kernels) {
    if (nu.size() != dim_ || kernels.size() != dim_ * dim_)
        throw ConfigError("workspace reset: parameter sizes do not match K");
    nu_.assign(nu.begin(), nu.end());
    for (std::size_t p = 0; p < kernels.size(); ++p)
        kernels_[p] = kernels[p].heights.empty() ? zero_step(support_) : kernels[p];
    rebuild();
}

double LikelihoodWorkspace::kernel_compensator(std::size_t l, const StepKernel& h) const {
    const auto& cov = coverage_[l];
    double total = static_cast<double>(cov.full) * step_mass(h);
    for (const auto& [lo, hi] : cov.edge) total += step_integral(h.knots, h.heights, lo, hi);
    return total;
}

void LikelihoodWorkspace::rebuild() {
    excitation_.assign(dim_, {});
    log_sum_.assign(dim_, 0.0);
    compensator_.assign(dim_ * dim_, 0.0);
    for (std::size_t k = 0; k < dim_; ++k) excitation_[k].assign(targets_[k].size(), 0.0);
    for (std::size_t l = 0; l < dim_; ++l) {
        for (std::size_t k = 0; k < dim_; ++k) {
            const auto& h = kernels_[l * dim_ + k];
            const auto& pl = pairs_[l * dim_ + k];
            compensator_[l * dim_ + k] = kernel_compensator(l, h);
            if (all_zero(h)) continue;
            // Offsets are sorted, so walk the bins alongside them.
            std::size_t bin = 0;
            for (std::size_t p = 0; p < pl.offset.size(); ++p) {
                const double off = pl.offset[p];
                while (bin + 1 < h.knots.size() && off > h.knots[bin + 1]) ++bin;
                if (bin < h.heights.size() && off > h.knots[bin] && off <= h.knots[bin + 1])
                    excitation_[k][pl.point[p]] += h.heights[bin];
            }
        }
    }
    for (std::size_t k = 0; k < dim_; ++k) {
        double s = 0.0;
        for (double e : excitation_[k]) s += std::log(nu_[k] + e);
        log_sum_[k] = s;
    }
}

double LikelihoodWorkspace::log_likelihood() const noexcept {
    double total = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) {
        double comp = nu_[k] * horizon_;
        for (std::size_t l = 0; l < dim_; ++l) comp += compensator_[l * dim_ + k];
        total += log_sum_[k] - comp;
    }
    return total;
}

HawkesModel LikelihoodWorkspace::model() const {
    std::vector<Kernel> kernels;
    kernels.reserve(kernels_.size());
    for (const auto& h : kernels_)
        kernels.push_back(all_zero(h) ? Kernel::null() : Kernel::step(h.knots, h.heights));
    return HawkesModel(support_, nu_, std::move(kernels));
}

LikelihoodWorkspace::KernelChange LikelihoodWorkspace::propose_kernel(std::size_t l, std::size_t k,
                                                                      StepKernel next) {
    if (next.heights.empty()) next = zero_step(support_);
    KernelChange change;
    change.source = l;
    change.target = k;
    const auto& current = kernels_[l * dim_ + k];
    const auto& pl = pairs_[l * dim_ + k];
    auto& delta = scratch_delta_[k];
    auto& stamp = scratch_stamp_[k];
    if (++stamp_ == 0) {  // wrapped: clear stamps
        for (auto& s : scratch_stamp_) std::fill(s.begin(), s.end(), 0u);
        stamp_ = 1;
    }

    for_each_common_piece(current, next, [&](double a, double b, double old_v, double new_v) {
        const double d = new_v - old_v;
        if (d == 0.0) return;
        auto first = std::upper_bound(pl.offset.begin(), pl.offset.end(), a);
        auto last = std::upper_bound(first, pl.offset.end(), b);
        for (auto it = first; it != last; ++it) {
            const std::uint32_t pt = pl.point[static_cast<std::size_t>(it - pl.offset.begin())];
            if (stamp[pt] != stamp_) {
                stamp[pt] = stamp_;
                delta[pt] = 0.0;
                change.touched.push_back(pt);
            }
            delta[pt] += d;
        }
    });

    const double nu = nu_[k];
    const auto& exc = excitation_[k];
    change.delta.reserve(change.touched.size());
    double dlog = 0.0;
    for (std::size_t idx : change.touched) {
        const double d = delta[idx];
        change.delta.push_back(d);
        const double before = nu + exc[idx];
        const double after = before + d;
        if (!(after > 0.0)) {
            change.impossible = true;
            continue;
        }
        dlog += std::log1p(d / before);
    }
    change.delta_log_sum = dlog;
    change.delta_compensator = kernel_compensator(l, next) - compensator_[l * dim_ + k];
    change.next = std::move(next);
    return change;
}

void LikelihoodWorkspace::commit(KernelChange&& change) {
    const std::size_t l = change.source;
    const std::size_t k = change.target;
    auto& exc = excitation_[k];
    for (std::size_t i = 0; i < change.touched.size(); ++i) exc[change.touched[i]] += change.delta[i];
    log_sum_[k] += change.delta_log_sum;
    compensator_[l * dim_ + k] += change.delta_compensator;
    kernels_[l * dim_ + k] = std::move(change.next);
}

LikelihoodWorkspace::NuTerms LikelihoodWorkspace::nu_terms(std::size_t k, double value) const {
    NuTerms out;
    for (double e : excitation_[k]) {
        const double lambda = value + e;
        if (!(lambda > 0.0)) {
            out.impossible = true;
            return out;
        }
        out.log_sum += std::log(lambda);
        out.inverse_sum += 1.0 / lambda;
    }
    return out;
}

double LikelihoodWorkspace::delta_nu(std::size_t k, double value) const {
    const double d = value - nu_[k];
    if (d == 0.0) return 0.0;
    double dlog = 0.0;
    for (double e : excitation_[k]) {
        const double before = nu_[k] + e;
        if (!(before + d > 0.0)) return KernelChange::kImpossibleDelta;
        dlog += std::log1p(d / before);
    }
    return dlog - d * horizon_;
}

void LikelihoodWorkspace::set_nu(std::size_t k, double value) {
    if (!(value > 0.0)) throw ConfigError("workspace: nu must be > 0");
    nu_[k] = value;
    double s = 0.0;
    for (double e : excitation_[k]) s += std::log(value + e);
    log_sum_[k] = s;
}

double LikelihoodWorkspace::nu_gradient(std::size_t k) const {
    return nu_terms(k, nu_[k]).inverse_sum - horizon_;
}

LikelihoodWorkspace::NuEvaluation LikelihoodWorkspace::evaluate_nu(std::span<const double> nu) const {
    NuEvaluation out;
    out.gradient.assign(dim_, 0.0);
    for (std::size_t k = 0; k < dim_; ++k) {
        const auto terms = nu_terms(k, nu[k]);
        if (terms.impossible || !(nu[k] > 0.0)) {
            out.impossible = true;
            out.log_likelihood = kImpossibleLogLik;
            return out;
        }
        double comp = nu[k] * horizon_;
        for (std::size_t l = 0; l < dim_; ++l) comp += compensator_[l * dim_ + k];
        out.log_likelihood += terms.log_sum - comp;
        out.gradient[k] = terms.inverse_sum - horizon_;
    }
    return out;
}

double LikelihoodWorkspace::resync() {
    const double before = log_likelihood();
    rebuild();
    return std::abs(log_likelihood() - before);
}

}  // namespace hawkes
