#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hawkes::cli {

// Layout of an experiment directory:
//   config.toml, truth.json, manifest.json
//   data/rep_NNN.csv (+ .json sidecar)
//   traces/T<h>/rep_NNN.{ndjson,csv,summary.json,ckpt.json}, infer_manifest.json, acceptance.json
//   report/d_metrics.csv, report/delta_table.csv, report/T<h>/...

struct SimulateOptions {
    std::filesystem::path out;
    std::optional<std::filesystem::path> config;
    std::optional<std::string> scenario;             // 1, 2, 3
    std::optional<std::filesystem::path> model;      // custom model JSON
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    bool quick = false;
    unsigned jobs = 1;
};

struct InferOptions {
    std::filesystem::path dir;
    std::optional<std::filesystem::path> config;     // overrides [prior] and [sampler]
    bool quick = false;
    bool dry_run = false;
    bool resume = false;
    unsigned jobs = 1;
};

struct ReportOptions {
    std::filesystem::path dir;
    std::size_t max_draws = 500;   // posterior expectations in D metrics use at most this many draws
    double threshold = 0.5;        // edge threshold for the DOT graphs
    unsigned jobs = 1;
};

struct DistanceOptions {
    std::filesystem::path model_a;
    std::filesystem::path model_b;
    std::optional<std::filesystem::path> events;
    std::optional<double> horizon;
};

struct CheckModelOptions {
    std::optional<std::filesystem::path> model;
    std::optional<std::string> scenario;
    bool strict = false;           // exit with a numeric failure when not stationary
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& log);
int cmd_infer(const InferOptions& opts, std::ostream& out, std::ostream& log);
int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& log);
int cmd_distance(const DistanceOptions& opts, std::ostream& out);
int cmd_check_model(const CheckModelOptions& opts, std::ostream& out);

// Horizon directory label: 5 -> "T5", 2.5 -> "T2.5".
std::string horizon_label(double horizon);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn);

}  // namespace hawkes::cli

#include "parallel.hpp"
