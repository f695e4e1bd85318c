#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hawkes/events.hpp"
#include "hawkes/model.hpp"
#include "hawkes/sampler.hpp"

namespace hawkes {

// ||a - b||_1 on [0, A]. Exact for step and null kernels. Otherwise the sign
// changes of a - b are located on a grid of step <= 1e-4 (refined by
// bisection) and each constant-sign piece is integrated in closed form.
double l1_kernel_distance(const Kernel& a, const Kernel& b);

// sum_k |nu_k - nu'_k| + sum_{l,k} ||h_{l,k} - h'_{l,k}||_1. Throws ConfigError on mismatched K.
double l1_param_distance(const HawkesModel& f, const HawkesModel& g);

// (1/T) sum_k int_0^T |lambda^k_t(f) - lambda^k_t(g)| dt on the history in `seq`.
// Step/null models: exact sweep over the jump points s + t_j. Otherwise
// adaptive Simpson (tolerance 1e-7) between consecutive breakpoints.
double d1T_distance(const HawkesModel& f, const HawkesModel& g, const EventSequence& seq, double horizon);

HawkesModel record_model(const TraceRecord& rec, double support);

struct ReplicateDraws {
    const ChainTrace* trace = nullptr;
    const EventSequence* data = nullptr;  // needed for D2 only
};

struct DMetrics {
    double d1 = 0.0;  // mean over replicates of E[(1/K^2) sum ||h - h0||_1]
    double d2 = 0.0;  // mean over replicates of E[d_{1,T}(f, f0)] on the replicate's data
    std::vector<double> d1_per_replicate;
    std::vector<double> d2_per_replicate;
};

// Posterior expectations use every `stride`-th record. D2 is skipped (left
// at 0, per-replicate vector empty) when with_d2 is false.
DMetrics estimate_D1_D2(std::span<const ReplicateDraws> replicates, const HawkesModel& truth,
                        bool with_d2 = true, std::size_t stride = 1);

struct KernelBand {
    std::vector<double> mean;
    std::vector<double> median;
    std::vector<double> low;   // 5% quantile
    std::vector<double> high;  // 95% quantile
};

struct ScalarSummary {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double low = 0.0;
    double high = 0.0;
};

struct PosteriorSummary {
    std::size_t dim = 0;
    double support = 0.0;
    std::size_t draws = 0;
    std::vector<double> grid;             // evaluation points in (0, A]
    std::vector<KernelBand> kernels;      // K * K, row-major (source, target)
    std::vector<double> edge_probability; // P(delta_{l,k} = 1)
    std::vector<ScalarSummary> nu;
    ScalarSummary eta;
};

// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

// Bands on grid points t_i = (i + 1) A / grid_points.
PosteriorSummary summarize(const ChainTrace& trace, std::size_t grid_points = 400);

struct GraphEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    double probability = 0.0;
};

struct Graph {
    std::size_t dim = 0;
    std::vector<GraphEdge> edges;
    std::string dot;
};

// Edge l -> k iff P(delta_{l,k} = 1) >= threshold. Nodes are 1-based.
Graph extract_graph(std::size_t dim, std::span<const double> edge_probability, double threshold);
Graph extract_graph(const PosteriorSummary& summary, double threshold);

std::string summary_to_json(const PosteriorSummary& summary);
// t,mean,median,q05,q95 for kernel (l, k).
std::string band_csv(const PosteriorSummary& summary, std::size_t l, std::size_t k);
void write_summary(const PosteriorSummary& summary, const std::filesystem::path& dir);

}  // namespace hawkes
