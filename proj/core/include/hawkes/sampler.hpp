#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/model.hpp"
#include "hawkes/moves.hpp"
#include "hawkes/prior.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/workspace.hpp"

namespace hawkes {

struct SamplerConfig {
    std::size_t n_iter = 30000;
    std::size_t burn_in = 10000;
    std::size_t thin = 1;
    double mala_step = 0.02;        // tau_nu
    double height_rw_scale = 0.3;   // sigma_beta, on log heights
    double knot_rw_scale = 0.2;     // sigma_t, on the logit scale
    double split_scale = 0.5;       // birth split perturbation, log heights
    MoveProbabilities moves;
    bool adapt = true;              // Robbins-Monro scale tuning during burn-in
    bool use_likelihood = true;     // false: sample the prior (validation)
    std::uint64_t seed = 0;
    std::size_t audit_every = 1000;
    double audit_tolerance = 1e-6;
    std::size_t checkpoint_every = 0;  // 0: never; otherwise a multiple of audit_every

    void validate() const;
};

struct ChainState {
    std::vector<double> nu;
    std::vector<KernelParam> kernels;  // K * K, row-major (source, target)
    double eta = 1.0;
    double log_likelihood = 0.0;
    double log_prior = 0.0;  // in sampler coordinates, see kernel_log_target
    std::size_t iteration = 0;
};

struct TraceRecord {
    std::size_t iteration = 0;
    std::vector<double> nu;
    double eta = 0.0;
    double log_likelihood = 0.0;
    std::vector<KernelParam> kernels;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

enum class Move : int { mala, height_rw, height_toggle, birth, death, knot, flip_on, flip_off, count };
std::string_view to_string(Move m) noexcept;

struct MoveStats {
    std::array<std::uint64_t, static_cast<std::size_t>(Move::count)> proposed{};
    std::array<std::uint64_t, static_cast<std::size_t>(Move::count)> accepted{};

    double rate(Move m) const noexcept;
    void add(Move m, bool ok) noexcept;
};

/// Post-burn-in output of one chain.
struct ChainTrace {
    std::size_t dim = 0;
    double support = 0.0;
    double horizon = 0.0;
    KnotScheme scheme = KnotScheme::random;
    std::vector<TraceRecord> records;   // empty if records were not kept
    // Running summaries over every kept draw, available even without records.
    std::size_t kept = 0;
    std::vector<double> delta_count;    // per kernel, number of draws with delta = 1
    std::vector<double> nu_sum;
    MoveStats stats;
    double final_mala_step = 0.0;
    double final_height_scale = 0.0;
    double final_knot_scale = 0.0;

    std::vector<double> delta_probability() const;
};

/// Everything needed to continue a chain bit-for-bit.
struct Checkpoint {
    ChainState state;
    std::string rng_state;
    double mala_step = 0.0;
    double height_scale = 0.0;
    double knot_scale = 0.0;
    std::array<std::uint64_t, 3> adapt_count{};
    MoveStats stats;
};

using RecordSink = std::function<void(const TraceRecord&)>;
using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Reversible-jump MCMC over (nu, eta, h) for step-function kernels.
///
/// Each iteration: one joint MALA update of log nu, one Gibbs update of eta,
/// then for every (l, k) one move drawn from {height, birth, death, knot,
/// delta flip}. Moves are Metropolis-Hastings corrected against the exact
/// pseudo-posterior; with use_likelihood = false the chain targets the prior.
class Sampler {
public:
    Sampler(const EventSequence& data, double horizon, PriorConfig prior, SamplerConfig cfg,
            ChainState init);
    Sampler(const EventSequence& data, double horizon, PriorConfig prior, SamplerConfig cfg,
            const Checkpoint& resume);

    const ChainState& state() const noexcept { return state_; }
    const MoveStats& stats() const noexcept { return stats_; }
    const PriorConfig& prior() const noexcept { return prior_; }
    const SamplerConfig& config() const noexcept { return cfg_; }
    std::size_t dim() const noexcept { return dim_; }
    Rng& rng() noexcept { return rng_; }
    double mala_step() const noexcept { return mala_step_; }

    // Single moves. Each returns whether the proposal was accepted.
    bool step_nu();
    bool step_heights(std::size_t l, std::size_t k);
    bool step_birth_death(std::size_t l, std::size_t k, bool birth);
    bool step_knots(std::size_t l, std::size_t k);
    bool step_delta(std::size_t l, std::size_t k);
    void step_eta();

    // One full sweep of the schedule; advances the iteration counter.
    void iterate();

    // Runs until state().iteration == cfg.n_iter, emitting kept draws.
    ChainTrace run(const RecordSink& sink = {}, bool keep_records = true,
                   const CheckpointSink& checkpoints = {});

    // Gradient of the log target w.r.t. log nu at `nu` (other parameters fixed).
    std::vector<double> log_nu_gradient(const std::vector<double>& nu) const;
    // Log target (log-likelihood + nu log prior) as a function of nu only.
    double log_nu_target(const std::vector<double>& nu) const;

    // Compares cached log-likelihood / log-prior with fresh recomputations and
    // re-synchronises the caches. Returns the largest discrepancy; throws
    // NumericError when it exceeds cfg.audit_tolerance.
    double audit();

    Checkpoint checkpoint() const;
    TraceRecord record() const;
    HawkesModel current_model() const;

private:
    void init_caches();
    double full_log_prior() const;
    bool accept(double log_ratio);
    void adapt(int which, bool accepted);
    bool flip_off(std::size_t l, std::size_t k, double selection);
    bool apply_kernel(std::size_t l, std::size_t k, Proposal&& proposal, double extra_log_ratio, Move move);

    const EventSequence* data_ = nullptr;
    double horizon_ = 0.0;
    PriorConfig prior_;
    SamplerConfig cfg_;
    std::size_t dim_ = 0;
    ChainState state_;
    std::optional<LikelihoodWorkspace> workspace_;
    Rng rng_;
    MoveStats stats_;
    double mala_step_;
    double height_scale_;
    double knot_scale_;
    std::array<std::uint64_t, 3> adapt_count_{};
    MoveProbabilities probs_;
};

// Default starting point: nu_k = max(N_k, 1) / T, every kernel active with a
// single bin of height 1, eta at its prior mean.
ChainState default_initial_state(const EventSequence& data, double horizon, const PriorConfig& prior);

ChainTrace run_chain(const ChainState& init, const EventSequence& data, double horizon,
                     const PriorConfig& prior, const SamplerConfig& cfg,
                     const RecordSink& sink = {}, bool keep_records = true);

}  // namespace hawkes
