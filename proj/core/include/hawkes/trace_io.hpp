#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "hawkes/sampler.hpp"

namespace hawkes {

// One kept draw per line:
// {"iteration", "nu": [...], "eta", "log_likelihood",
//  "kernels": [{"delta", "knots", "z", "beta"}, ...]}  (row-major, source then target)
std::string record_to_json(const TraceRecord& rec);
TraceRecord record_from_json(std::string_view line);

std::string kernel_param_to_json(const KernelParam& p);
KernelParam kernel_param_from_json(std::string_view text);

// Streams records as NDJSON plus a scalar CSV
// (iteration, eta, log_likelihood, nu_k..., delta_l_k...; marks 1-based).
class TraceWriter {
public:
    TraceWriter(const std::filesystem::path& ndjson, const std::filesystem::path& csv, std::size_t dim,
                bool append = false);

    void write(const TraceRecord& rec);
    void flush();

private:
    std::ofstream ndjson_;
    std::ofstream csv_;
    std::size_t dim_;
};

std::string scalar_csv_header(std::size_t dim);

// Chain metadata, running summaries and per-move acceptance rates.
std::string trace_summary_json(const ChainTrace& trace);
void write_trace_summary(const ChainTrace& trace, const std::filesystem::path& path);

// Reads an NDJSON trace back; summaries are recomputed from the records.
ChainTrace read_trace(const std::filesystem::path& ndjson, const std::filesystem::path& summary);

std::string checkpoint_to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(std::string_view text);
void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace hawkes
