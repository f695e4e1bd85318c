#pragma once

#include <cstddef>
#include <span>
#include <cstdint>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/likelihood.hpp"
#include "hawkes/model.hpp"

namespace hawkes {

/// Incremental log-likelihood for models whose kernels are all step functions.
///
/// Built once per data set. For every source/target mark pair (l, k) the
/// workspace stores the offsets t_i - s (s of mark l in [-A, T), t_i of mark k
/// in [0, T), 0 < t_i - s <= A) sorted ascending, so the points affected by a
/// change of one bin form a contiguous range. The compensator is linear in the
/// heights: every source whose support window lies inside [0, T] contributes
/// the full kernel mass, the few edge sources their clipped integral.
///
/// Single writer. Cached quantities drift only by rounding; resync() rebuilds
/// them exactly.
class LikelihoodWorkspace {
public:
    LikelihoodWorkspace(const EventSequence& seq, double horizon, double support);

    // Installs parameters and recomputes every cache from scratch. Null kernels
    // may be passed as an empty StepKernel.
    void reset(std::span<const double> nu, std::span<const StepKernel> kernels);

    std::size_t dim() const noexcept { return dim_; }
    double horizon() const noexcept { return horizon_; }
    double support() const noexcept { return support_; }
    std::size_t event_count(std::size_t k) const { return targets_[k].size(); }
    std::size_t pair_count(std::size_t l, std::size_t k) const { return pairs_[l * dim_ + k].offset.size(); }

    double log_likelihood() const noexcept;
    double nu(std::size_t k) const { return nu_[k]; }
    const StepKernel& kernel(std::size_t l, std::size_t k) const { return kernels_[l * dim_ + k]; }
    HawkesModel model() const;

    struct KernelChange {
        std::size_t source = 0;
        std::size_t target = 0;
        StepKernel next;
        std::vector<std::size_t> touched;    // indices into targets of mark `target`
        std::vector<double> delta;           // excitation change per touched point
        double delta_log_sum = 0.0;
        double delta_compensator = 0.0;
        bool impossible = false;

        double delta_log_likelihood() const noexcept {
            return impossible ? kImpossibleDelta : delta_log_sum - delta_compensator;
        }
        static constexpr double kImpossibleDelta = -1e300;
    };

    // Evaluates replacing h_{l,k} by `next` without modifying the workspace.
    // Cost is proportional to the number of stored offsets falling where the
    // old and new step functions differ.
    KernelChange propose_kernel(std::size_t l, std::size_t k, StepKernel next);
    void commit(KernelChange&& change);

    // log-likelihood change when nu_k becomes `value`, other coordinates fixed.
    double delta_nu(std::size_t k, double value) const;
    void set_nu(std::size_t k, double value);

    struct NuTerms {
        double log_sum = 0.0;       // sum_i log(nu_k + e_i)
        double inverse_sum = 0.0;   // sum_i 1 / (nu_k + e_i)
        bool impossible = false;
    };
    // Terms of mark k's contribution at a trial value of nu_k.
    NuTerms nu_terms(std::size_t k, double value) const;

    // d L / d nu_k at the current state: sum_i 1/lambda^k_{t_i} - T.
    double nu_gradient(std::size_t k) const;

    struct NuEvaluation {
        double log_likelihood = 0.0;
        std::vector<double> gradient;  // d L / d nu_k
        bool impossible = false;
    };
    // Log-likelihood and its nu-gradient at trial rates, kernels unchanged.
    NuEvaluation evaluate_nu(std::span<const double> nu) const;

    // Recomputes all caches exactly; returns the largest absolute change seen
    // in the log-likelihood.
    double resync();

private:
    struct PairList {
        std::vector<double> offset;
        std::vector<std::uint32_t> point;
    };
    struct Coverage {
        std::size_t full = 0;                       // sources with [s, s + A] inside [0, T]
        std::vector<std::pair<double, double>> edge;  // clipped (lo, hi) offsets
    };

    double kernel_compensator(std::size_t l, const StepKernel& h) const;
    void rebuild();

    std::size_t dim_ = 0;
    double horizon_ = 0.0;
    double support_ = 0.0;
    std::vector<std::vector<double>> targets_;  // per mark, times in [0, T)
    std::vector<PairList> pairs_;               // per (l, k)
    std::vector<Coverage> coverage_;            // per source mark l

    std::vector<double> nu_;
    std::vector<StepKernel> kernels_;
    std::vector<std::vector<double>> excitation_;  // per mark, per target point
    std::vector<double> log_sum_;                  // per mark
    std::vector<double> compensator_;              // per (l, k), kernel part only

    // proposal scratch, per target mark
    std::vector<std::vector<double>> scratch_delta_;
    std::vector<std::vector<std::uint32_t>> scratch_stamp_;
    std::uint32_t stamp_ = 0;
};

// A step kernel equal to zero on [0, A].
StepKernel zero_step(double support);

}  // namespace hawkes
