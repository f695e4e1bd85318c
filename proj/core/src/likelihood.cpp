#include "hawkes/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "hawkes/errors.hpp"

namespace hawkes {
namespace {

constexpr double kWindowSlack = 1e-12;

void require_coverage(const HawkesModel& model, const EventSequence& seq, double horizon) {
    if (model.dim() != static_cast<std::size_t>(seq.dim()))
        throw ConfigError("model and event sequence disagree on K");
    if (!(horizon > 0.0)) throw ConfigError("observation horizon T must be > 0");
    if (seq.t_start() > -model.support() + kWindowSlack)
        throw ConfigError("event sequence must cover the history window [-A, 0)");
    if (horizon > seq.t_end() + kWindowSlack)
        throw ConfigError("observation horizon T exceeds the event window");
}

// Index of the first event with time >= t.
std::size_t first_at_or_after(std::span<const Event> events, double t) {
    auto it = std::lower_bound(events.begin(), events.end(), t,
                               [](const Event& e, double v) { return e.time < v; });
    return static_cast<std::size_t>(it - events.begin());
}

double excitation(const HawkesModel& model, std::span<const Event> events, std::size_t k, double t) {
    const double a = model.support();
    double total = 0.0;
    const std::size_t begin = first_at_or_after(events, t - a);
    for (std::size_t i = begin; i < events.size() && events[i].time < t; ++i)
        total += model.kernel(static_cast<std::size_t>(events[i].mark), k)(t - events[i].time);
    return total;
}

}  // namespace

double intensity_at(const HawkesModel& model, const EventSequence& seq, int k, double t) {
    if (k < 0 || static_cast<std::size_t>(k) >= model.dim()) throw ConfigError("mark out of range");
    if (t < seq.t_start() + model.support() - kWindowSlack || t > seq.t_end() + kWindowSlack)
        throw ConfigError("intensity_at: t outside the covered window");
    const auto kk = static_cast<std::size_t>(k);
    return model.nu(kk) + excitation(model, seq.events(), kk, t);
}

double compensator(const HawkesModel& model, const EventSequence& seq, int k, double horizon) {
    require_coverage(model, seq, horizon);
    const auto kk = static_cast<std::size_t>(k);
    const double a = model.support();
    double total = model.nu(kk) * horizon;
    for (const auto& e : seq.events()) {
        if (e.time < -a || e.time >= horizon) continue;
        const auto& h = model.kernel(static_cast<std::size_t>(e.mark), kk);
        if (h.is_null()) continue;
        total += h.integral(std::max(0.0, -e.time), std::min(a, horizon - e.time));
    }
    return total;
}

double log_likelihood(const HawkesModel& model, const EventSequence& seq, double horizon) {
    require_coverage(model, seq, horizon);
    const auto events = seq.events();
    double total = 0.0;
    for (const auto& e : events) {
        if (e.time < 0.0 || e.time >= horizon) continue;
        const auto k = static_cast<std::size_t>(e.mark);
        const double lambda = model.nu(k) + excitation(model, events, k, e.time);
        if (!(lambda > 0.0)) return kImpossibleLogLik;
        total += std::log(lambda);
    }
    for (std::size_t k = 0; k < model.dim(); ++k)
        total -= compensator(model, seq, static_cast<int>(k), horizon);
    return total;
}

}  // namespace hawkes
