#include "hawkes/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkes/errors.hpp"
#include "hawkes/likelihood.hpp"

namespace hawkes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 10.0;
constexpr double kAdaptExponent = 0.6;

enum AdaptSlot : int { kAdaptMala = 0, kAdaptHeight = 1, kAdaptKnot = 2 };
constexpr std::array<double, 3> kAdaptTarget{0.5, 0.35, 0.35};

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

std::size_t index_of(Move m) { return static_cast<std::size_t>(m); }

}  // namespace

std::string_view to_string(Move m) noexcept {
    switch (m) {
        case Move::mala: return "mala";
        case Move::height_rw: return "height_rw";
        case Move::height_toggle: return "height_toggle";
        case Move::birth: return "birth";
        case Move::death: return "death";
        case Move::knot: return "knot";
        case Move::flip_on: return "flip_on";
        case Move::flip_off: return "flip_off";
        case Move::count: break;
    }
    return "unknown";
}

double MoveStats::rate(Move m) const noexcept {
    const auto i = index_of(m);
    return proposed[i] ? static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]) : 0.0;
}

void MoveStats::add(Move m, bool ok) noexcept {
    const auto i = index_of(m);
    ++proposed[i];
    if (ok) ++accepted[i];
}

std::vector<double> ChainTrace::delta_probability() const {
    std::vector<double> out(delta_count.size(), 0.0);
    if (kept == 0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = delta_count[i] / static_cast<double>(kept);
    return out;
}

void SamplerConfig::validate() const {
    if (burn_in > n_iter) throw ConfigError("sampler: burn_in must not exceed n_iter");
    if (thin == 0) throw ConfigError("sampler: thin must be >= 1");
    for (double s : {mala_step, height_rw_scale, knot_rw_scale, split_scale})
        if (!(std::isfinite(s) && s > 0.0)) throw ConfigError("sampler: proposal scales must be > 0");
    for (double p : {moves.height, moves.birth, moves.death, moves.knot, moves.delta_flip})
        if (!(p >= 0.0)) throw ConfigError("sampler: move probabilities must be >= 0");
    if (std::abs(moves.total() - 1.0) > 1e-9) throw ConfigError("sampler: move probabilities must sum to 1");
    if (!(audit_tolerance > 0.0)) throw ConfigError("sampler: audit_tolerance must be > 0");
    if (checkpoint_every > 0 && (audit_every == 0 || checkpoint_every % audit_every != 0))
        throw ConfigError("sampler: checkpoint_every must be a multiple of audit_every");
}

ChainState default_initial_state(const EventSequence& data, double horizon, const PriorConfig& prior) {
    const auto dim = static_cast<std::size_t>(data.dim());
    ChainState s;
    s.nu.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const auto n = data.count(static_cast<int>(k), 0.0, horizon);
        s.nu[k] = static_cast<double>(std::max<std::size_t>(n, 1)) / horizon;
    }
    KernelParam one;
    if (prior.p_delta > 0.0) {
        one.delta = true;
        one.knots = {0.0, prior.support};
        one.z = {1};
        one.beta = {1.0};
    }
    s.kernels.assign(dim * dim, one);
    s.eta = prior.eta_shape / prior.eta_rate;
    return s;
}

Sampler::Sampler(const EventSequence& data, double horizon, PriorConfig prior, SamplerConfig cfg,
                 ChainState init)
    : data_(&data),
      horizon_(horizon),
      prior_(prior),
      cfg_(cfg),
      dim_(static_cast<std::size_t>(data.dim())),
      state_(std::move(init)),
      rng_(seed_split(cfg.seed, 0)),
      mala_step_(cfg.mala_step),
      height_scale_(cfg.height_rw_scale),
      knot_scale_(cfg.knot_rw_scale),
      probs_(cfg.moves.for_scheme(prior.knot_scheme)) {
    init_caches();
}

Sampler::Sampler(const EventSequence& data, double horizon, PriorConfig prior, SamplerConfig cfg,
                 const Checkpoint& resume)
    : data_(&data),
      horizon_(horizon),
      prior_(prior),
      cfg_(cfg),
      dim_(static_cast<std::size_t>(data.dim())),
      state_(resume.state),
      stats_(resume.stats),
      mala_step_(resume.mala_step),
      height_scale_(resume.height_scale),
      knot_scale_(resume.knot_scale),
      adapt_count_(resume.adapt_count),
      probs_(cfg.moves.for_scheme(prior.knot_scheme)) {
    std::istringstream in(resume.rng_state);
    in >> rng_;
    if (!in) throw ConfigError("checkpoint: malformed rng state");
    init_caches();
}

void Sampler::init_caches() {
    prior_.validate();
    cfg_.validate();
    if (!(horizon_ > 0.0)) throw ConfigError("sampler: horizon must be > 0");
    if (state_.nu.size() != dim_ || state_.kernels.size() != dim_ * dim_)
        throw ConfigError("sampler: initial state does not match the data dimension");
    if (!(state_.eta > 0.0)) throw ConfigError("sampler: eta must be > 0");
    for (double v : state_.nu)
        if (!(v > 0.0 && std::isfinite(v))) throw ConfigError("sampler: nu must be positive");
    for (const auto& p : state_.kernels) validate_param(prior_, p);

    if (cfg_.use_likelihood) {
        if (!workspace_) workspace_.emplace(*data_, horizon_, prior_.support);
        std::vector<StepKernel> steps;
        steps.reserve(state_.kernels.size());
        for (const auto& p : state_.kernels) steps.push_back(to_step(p, prior_.support));
        workspace_->reset(state_.nu, steps);
        state_.log_likelihood = workspace_->log_likelihood();
    } else {
        state_.log_likelihood = 0.0;
    }
    state_.log_prior = full_log_prior();
}

double Sampler::full_log_prior() const {
    double out = nu_log_target(prior_, state_.nu) + log_gamma_pdf(state_.eta, prior_.eta_shape, prior_.eta_rate);
    for (const auto& p : state_.kernels) out += kernel_log_target(prior_, state_.eta, p);
    return out;
}

bool Sampler::accept(double log_ratio) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    if (std::isnan(log_ratio)) return false;
    return std::log(u) < log_ratio;
}

void Sampler::adapt(int which, bool accepted) {
    if (!cfg_.adapt || state_.iteration >= cfg_.burn_in) return;
    const auto slot = static_cast<std::size_t>(which);
    const double gamma = std::pow(static_cast<double>(++adapt_count_[slot]), -kAdaptExponent);
    double* scale = which == kAdaptMala ? &mala_step_ : which == kAdaptHeight ? &height_scale_ : &knot_scale_;
    const double next = std::log(*scale) + gamma * ((accepted ? 1.0 : 0.0) - kAdaptTarget[slot]);
    *scale = std::clamp(std::exp(next), kMinScale, kMaxScale);
}

std::vector<double> Sampler::log_nu_gradient(const std::vector<double>& nu) const {
    std::vector<double> grad(dim_, 0.0);
    if (cfg_.use_likelihood) {
        const auto ev = workspace_->evaluate_nu(nu);
        if (ev.impossible) throw NumericError("log_nu_gradient: zero intensity at an observed point");
        for (std::size_t k = 0; k < dim_; ++k) grad[k] = nu[k] * ev.gradient[k];
    }
    for (std::size_t k = 0; k < dim_; ++k)
        grad[k] -= (std::log(nu[k]) - prior_.mu_nu) / (prior_.s_nu * prior_.s_nu);
    return grad;
}

double Sampler::log_nu_target(const std::vector<double>& nu) const {
    double out = nu_log_target(prior_, nu);
    if (cfg_.use_likelihood) {
        const auto ev = workspace_->evaluate_nu(nu);
        if (ev.impossible) return kNegInf;
        out += ev.log_likelihood;
    }
    return out;
}

bool Sampler::step_nu() {
    const double tau = mala_step_;
    const double half = 0.5 * tau * tau;
    auto evaluate = [&](const std::vector<double>& nu, double& target, std::vector<double>& grad) {
        target = nu_log_target(prior_, nu);
        grad.assign(dim_, 0.0);
        double ll = 0.0;
        if (cfg_.use_likelihood) {
            const auto ev = workspace_->evaluate_nu(nu);
            if (ev.impossible) return std::pair{false, 0.0};
            ll = ev.log_likelihood;
            for (std::size_t k = 0; k < dim_; ++k) grad[k] = nu[k] * ev.gradient[k];
        }
        for (std::size_t k = 0; k < dim_; ++k)
            grad[k] -= (std::log(nu[k]) - prior_.mu_nu) / (prior_.s_nu * prior_.s_nu);
        return std::pair{true, ll};
    };

    double cur_prior = 0.0;
    std::vector<double> cur_grad;
    const auto [cur_ok, cur_ll] = evaluate(state_.nu, cur_prior, cur_grad);
    (void)cur_ok;

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> theta(dim_), theta_new(dim_), nu_new(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
        theta[k] = std::log(state_.nu[k]);
        theta_new[k] = theta[k] + half * cur_grad[k] + tau * gauss(rng_);
        nu_new[k] = std::exp(theta_new[k]);
    }
    bool finite = true;
    for (double v : nu_new) finite = finite && v > 0.0 && std::isfinite(v);

    double new_prior = 0.0;
    std::vector<double> new_grad;
    bool ok = false;
    double new_ll = 0.0;
    if (finite) std::tie(ok, new_ll) = evaluate(nu_new, new_prior, new_grad);

    double log_ratio = kNegInf;
    if (ok) {
        // log q(theta | theta') - log q(theta' | theta)
        double fwd = 0.0;
        double rev = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            const double a = theta_new[k] - theta[k] - half * cur_grad[k];
            const double b = theta[k] - theta_new[k] - half * new_grad[k];
            fwd += a * a;
            rev += b * b;
        }
        const double log_q = -(rev - fwd) / (2.0 * tau * tau);
        log_ratio = (new_ll - cur_ll) + (new_prior - cur_prior) + log_q;
    }
    const bool accepted = accept(log_ratio) && ok;
    stats_.add(Move::mala, accepted);
    adapt(kAdaptMala, accepted);
    if (!accepted) return false;

    if (cfg_.use_likelihood) {
        for (std::size_t k = 0; k < dim_; ++k) workspace_->set_nu(k, nu_new[k]);
        state_.log_likelihood = workspace_->log_likelihood();
    }
    state_.log_prior += new_prior - cur_prior;
    state_.nu = std::move(nu_new);
    return true;
}

bool Sampler::apply_kernel(std::size_t l, std::size_t k, Proposal&& proposal, double extra_log_ratio,
                           Move move) {
    if (!proposal.valid) {
        stats_.add(move, false);
        return false;
    }
    auto& cur = state_.kernels[l * dim_ + k];
    const double target_cur = kernel_log_target(prior_, state_.eta, cur);
    const double target_new = kernel_log_target(prior_, state_.eta, proposal.next);

    std::optional<LikelihoodWorkspace::KernelChange> change;
    double delta_ll = 0.0;
    bool possible = std::isfinite(target_new);
    if (cfg_.use_likelihood && possible) {
        change = workspace_->propose_kernel(l, k, to_step(proposal.next, prior_.support));
        possible = !change->impossible;
        delta_ll = change->delta_log_likelihood();
    }
    const double log_ratio =
        possible ? delta_ll + (target_new - target_cur) + proposal.log_q_ratio + extra_log_ratio : kNegInf;
    const bool accepted = accept(log_ratio) && possible;
    stats_.add(move, accepted);
    if (!accepted) return false;

    if (change) {
        workspace_->commit(std::move(*change));
        state_.log_likelihood += delta_ll;
    }
    state_.log_prior += target_new - target_cur;
    cur = std::move(proposal.next);
    return true;
}

bool Sampler::step_heights(std::size_t l, std::size_t k) {
    if (!state_.kernels[l * dim_ + k].delta) return false;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::lognormal_distribution<double> height(prior_.mu_beta, prior_.s_beta);
    bool any = false;
    const std::size_t bins = state_.kernels[l * dim_ + k].bins();
    for (std::size_t j = 0; j < bins; ++j) {
        const auto& cur = state_.kernels[l * dim_ + k];
        Proposal prop;
        prop.next = cur;
        if (unit(rng_) < 0.5) {
            if (cur.z[j]) {
                prop.next.z[j] = 0;
                prop.next.beta[j] = 0.0;
                prop.log_q_ratio = log_normal_pdf(std::log(cur.beta[j]), prior_.mu_beta, prior_.s_beta);
            } else {
                const double beta = height(rng_);
                prop.next.z[j] = 1;
                prop.next.beta[j] = beta;
                prop.log_q_ratio = -log_normal_pdf(std::log(beta), prior_.mu_beta, prior_.s_beta);
                prop.valid = beta > 0.0 && std::isfinite(beta);
            }
            any = apply_kernel(l, k, std::move(prop), 0.0, Move::height_toggle) || any;
        } else if (cur.z[j]) {
            const double beta = std::exp(std::log(cur.beta[j]) + height_scale_ * gauss(rng_));
            prop.next.beta[j] = beta;
            prop.valid = beta > 0.0 && std::isfinite(beta);
            const bool ok = apply_kernel(l, k, std::move(prop), 0.0, Move::height_rw);
            adapt(kAdaptHeight, ok);
            any = ok || any;
        }
    }
    return any;
}

bool Sampler::flip_off(std::size_t l, std::size_t k, double selection) {
    const auto& cur = state_.kernels[l * dim_ + k];
    Proposal prop;
    prop.next = null_param();
    if (prior_.p_delta >= 1.0 || !(selection > 0.0)) {
        prop.valid = false;
    } else {
        // reverse: flip selected with p_flip, block drawn from the prior given delta = 1
        prop.log_q_ratio = safe_log(probs_.delta_flip) + kernel_log_target(prior_, state_.eta, cur) -
                           std::log(prior_.p_delta) - std::log(selection);
    }
    return apply_kernel(l, k, std::move(prop), 0.0, Move::flip_off);
}

bool Sampler::step_birth_death(std::size_t l, std::size_t k, bool birth) {
    const auto& cur = state_.kernels[l * dim_ + k];
    if (!cur.delta) return false;
    MoveContext ctx{prior_, state_.eta, probs_, cfg_.split_scale};
    if (birth) {
        const auto choice = draw_birth_choice(ctx, cur, rng_);
        return apply_kernel(l, k, birth_move(ctx, cur, choice), 0.0, Move::birth);
    }
    const std::size_t bins = cur.bins();
    if (bins == 1) return flip_off(l, k, switch_off_selection(probs_, 1));
    std::size_t index = 0;
    if (prior_.knot_scheme == KnotScheme::regular)
        index = std::uniform_int_distribution<std::size_t>(0, bins - 1)(rng_);
    else
        index = std::uniform_int_distribution<std::size_t>(1, bins - 1)(rng_);
    return apply_kernel(l, k, death_move(ctx, cur, index), 0.0, Move::death);
}

bool Sampler::step_knots(std::size_t l, std::size_t k) {
    const auto& cur = state_.kernels[l * dim_ + k];
    if (!cur.delta || cur.bins() < 2 || prior_.knot_scheme == KnotScheme::regular) return false;
    MoveContext ctx{prior_, state_.eta, probs_, cfg_.split_scale};
    const auto index = std::uniform_int_distribution<std::size_t>(1, cur.bins() - 1)(rng_);
    const double step = knot_scale_ * std::normal_distribution<double>(0.0, 1.0)(rng_);
    const bool ok = apply_kernel(l, k, knot_move(ctx, cur, index, step), 0.0, Move::knot);
    adapt(kAdaptKnot, ok);
    return ok;
}

bool Sampler::step_delta(std::size_t l, std::size_t k) {
    const auto& cur = state_.kernels[l * dim_ + k];
    if (cur.delta) return flip_off(l, k, switch_off_selection(probs_, cur.bins()));

    Proposal prop;
    if (prior_.p_delta <= 0.0 || !(probs_.delta_flip > 0.0)) {
        prop.valid = false;
        return apply_kernel(l, k, std::move(prop), 0.0, Move::flip_on);
    }
    prop.next = prior_sample_active(prior_, state_.eta, rng_);
    prop.log_q_ratio = std::log(switch_off_selection(probs_, prop.next.bins())) - std::log(probs_.delta_flip) -
                       (kernel_log_target(prior_, state_.eta, prop.next) - std::log(prior_.p_delta));
    return apply_kernel(l, k, std::move(prop), 0.0, Move::flip_on);
}

void Sampler::step_eta() {
    std::vector<std::size_t> bins;
    for (const auto& p : state_.kernels)
        if (p.delta) bins.push_back(p.bins());
    const auto post = eta_posterior_update(prior_.eta_shape, prior_.eta_rate, bins);
    state_.eta = std::gamma_distribution<double>(post.shape, 1.0 / post.rate)(rng_);
    if (!(state_.eta > 0.0)) state_.eta = std::numeric_limits<double>::min();
    state_.log_prior = full_log_prior();
}

void Sampler::iterate() {
    step_nu();
    step_eta();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t l = 0; l < dim_; ++l) {
        for (std::size_t k = 0; k < dim_; ++k) {
            const double u = unit(rng_) * probs_.total();
            const bool active = state_.kernels[l * dim_ + k].delta;
            double edge = probs_.height;
            if (u < edge) {
                if (active) step_heights(l, k);
                continue;
            }
            edge += probs_.birth;
            if (u < edge) {
                if (active) step_birth_death(l, k, true);
                continue;
            }
            edge += probs_.death;
            if (u < edge) {
                if (active) step_birth_death(l, k, false);
                continue;
            }
            edge += probs_.knot;
            if (u < edge) {
                if (active) step_knots(l, k);
                continue;
            }
            step_delta(l, k);
        }
    }
    ++state_.iteration;
}

double Sampler::audit() {
    double worst = 0.0;
    if (cfg_.use_likelihood) {
        const double fresh = log_likelihood(current_model(), *data_, horizon_);
        worst = std::max(worst, std::abs(fresh - state_.log_likelihood));
    }
    const double prior_fresh = full_log_prior();
    worst = std::max(worst, std::abs(prior_fresh - state_.log_prior));
    if (!(worst <= cfg_.audit_tolerance))
        throw NumericError("sampler audit: cached log-densities drifted", {worst, static_cast<double>(state_.iteration)});
    if (cfg_.use_likelihood) {
        workspace_->resync();
        state_.log_likelihood = workspace_->log_likelihood();
    }
    state_.log_prior = prior_fresh;
    return worst;
}

Checkpoint Sampler::checkpoint() const {
    Checkpoint c;
    c.state = state_;
    std::ostringstream out;
    out << rng_;
    c.rng_state = out.str();
    c.mala_step = mala_step_;
    c.height_scale = height_scale_;
    c.knot_scale = knot_scale_;
    c.adapt_count = adapt_count_;
    c.stats = stats_;
    return c;
}

TraceRecord Sampler::record() const {
    return TraceRecord{state_.iteration, state_.nu, state_.eta, state_.log_likelihood, state_.kernels};
}

HawkesModel Sampler::current_model() const {
    std::vector<Kernel> kernels;
    kernels.reserve(state_.kernels.size());
    for (const auto& p : state_.kernels) kernels.push_back(to_kernel(p));
    return HawkesModel(prior_.support, state_.nu, std::move(kernels));
}

ChainTrace Sampler::run(const RecordSink& sink, bool keep_records, const CheckpointSink& checkpoints) {
    ChainTrace trace;
    trace.dim = dim_;
    trace.support = prior_.support;
    trace.horizon = horizon_;
    trace.scheme = prior_.knot_scheme;
    trace.delta_count.assign(dim_ * dim_, 0.0);
    trace.nu_sum.assign(dim_, 0.0);

    while (state_.iteration < cfg_.n_iter) {
        iterate();
        const std::size_t it = state_.iteration;
        if (cfg_.audit_every && it % cfg_.audit_every == 0) audit();
        if (checkpoints && cfg_.checkpoint_every && it % cfg_.checkpoint_every == 0) checkpoints(checkpoint());
        if (it <= cfg_.burn_in || (it - cfg_.burn_in) % cfg_.thin != 0) continue;
        ++trace.kept;
        for (std::size_t p = 0; p < state_.kernels.size(); ++p)
            if (state_.kernels[p].delta) trace.delta_count[p] += 1.0;
        for (std::size_t k = 0; k < dim_; ++k) trace.nu_sum[k] += state_.nu[k];
        if (sink || keep_records) {
            auto rec = record();
            if (sink) sink(rec);
            if (keep_records) trace.records.push_back(std::move(rec));
        }
    }
    trace.stats = stats_;
    trace.final_mala_step = mala_step_;
    trace.final_height_scale = height_scale_;
    trace.final_knot_scale = knot_scale_;
    return trace;
}

ChainTrace run_chain(const ChainState& init, const EventSequence& data, double horizon, const PriorConfig& prior,
                     const SamplerConfig& cfg, const RecordSink& sink, bool keep_records) {
    Sampler sampler(data, horizon, prior, cfg, init);
    return sampler.run(sink, keep_records);
}

}  // namespace hawkes
