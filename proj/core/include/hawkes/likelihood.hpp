#pragma once

#include <limits>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/model.hpp"

namespace hawkes {

// Returned by log_likelihood when some observed point has zero intensity.
// Finite so that differences stay well defined; any proposal reaching it is
// rejected by the sampler.
inline constexpr double kImpossibleLogLik = -1e300;

// lambda^k_t = nu_k + sum over points s of mark l in [t - A, t) of h_{l,k}(t - s).
// Left limit: a point exactly at t does not contribute. Requires
// seq.t_start() + A <= t <= seq.t_end(); throws ConfigError otherwise.
double intensity_at(const HawkesModel& model, const EventSequence& seq, int k, double t);

// Lambda^k(0, T) = nu_k T + sum_l sum_{s in [-A, T)} int_{max(0,-s)}^{min(A,T-s)} h_{l,k}.
double compensator(const HawkesModel& model, const EventSequence& seq, int k, double horizon);

// L_T = sum_k [ sum_{t_i of mark k in [0, T)} log lambda^k_{t_i} - Lambda^k(0, T) ].
// Points in [-A, 0) act only as history; points at or after T are ignored.
// Requires seq.t_start() <= -A and T <= seq.t_end().
double log_likelihood(const HawkesModel& model, const EventSequence& seq, double horizon);

}  // namespace hawkes
