#include "hawkes/trace_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

#include "hawkes/errors.hpp"

namespace hawkes {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json param_value(const KernelParam& p) {
    ordered_json j;
    j["delta"] = p.delta ? 1 : 0;
    if (p.delta) {
        j["knots"] = p.knots;
        j["z"] = p.z;
        j["beta"] = p.beta;
    }
    return j;
}

KernelParam param_from_value(const json& j) {
    KernelParam p;
    p.delta = j.at("delta").get<int>() != 0;
    if (p.delta) {
        p.knots = j.at("knots").get<std::vector<double>>();
        p.z = j.at("z").get<std::vector<std::uint8_t>>();
        p.beta = j.at("beta").get<std::vector<double>>();
    }
    return p;
}

ordered_json record_value(const TraceRecord& rec) {
    ordered_json j;
    j["iteration"] = rec.iteration;
    j["nu"] = rec.nu;
    j["eta"] = rec.eta;
    j["log_likelihood"] = rec.log_likelihood;
    auto& ks = j["kernels"] = ordered_json::array();
    for (const auto& p : rec.kernels) ks.push_back(param_value(p));
    return j;
}

TraceRecord record_from_value(const json& j) {
    TraceRecord rec;
    rec.iteration = j.at("iteration").get<std::size_t>();
    rec.nu = j.at("nu").get<std::vector<double>>();
    rec.eta = j.at("eta").get<double>();
    rec.log_likelihood = j.at("log_likelihood").get<double>();
    for (const auto& k : j.at("kernels")) rec.kernels.push_back(param_from_value(k));
    return rec;
}

ordered_json stats_value(const MoveStats& s) {
    ordered_json j;
    for (int m = 0; m < static_cast<int>(Move::count); ++m) {
        const auto mv = static_cast<Move>(m);
        const auto i = static_cast<std::size_t>(m);
        j[std::string(to_string(mv))] = {
            {"proposed", s.proposed[i]}, {"accepted", s.accepted[i]}, {"rate", s.rate(mv)}};
    }
    return j;
}

MoveStats stats_from_value(const json& j) {
    MoveStats s;
    for (int m = 0; m < static_cast<int>(Move::count); ++m) {
        const auto key = std::string(to_string(static_cast<Move>(m)));
        if (!j.contains(key)) continue;
        s.proposed[static_cast<std::size_t>(m)] = j[key].at("proposed").get<std::uint64_t>();
        s.accepted[static_cast<std::size_t>(m)] = j[key].at("accepted").get<std::uint64_t>();
    }
    return s;
}

json parse_or_throw(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string record_to_json(const TraceRecord& rec) { return record_value(rec).dump(); }

TraceRecord record_from_json(std::string_view line) {
    const auto j = parse_or_throw(line, "trace record");
    try {
        return record_from_value(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("trace record: ") + e.what());
    }
}

std::string kernel_param_to_json(const KernelParam& p) { return param_value(p).dump(); }

KernelParam kernel_param_from_json(std::string_view text) {
    const auto j = parse_or_throw(text, "kernel parameter");
    try {
        return param_from_value(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("kernel parameter: ") + e.what());
    }
}

std::string scalar_csv_header(std::size_t dim) {
    std::string out = "iteration,eta,log_likelihood";
    for (std::size_t k = 0; k < dim; ++k) out += ",nu_" + std::to_string(k + 1);
    for (std::size_t l = 0; l < dim; ++l)
        for (std::size_t k = 0; k < dim; ++k) out += ",delta_" + std::to_string(l + 1) + "_" + std::to_string(k + 1);
    return out;
}

TraceWriter::TraceWriter(const std::filesystem::path& ndjson, const std::filesystem::path& csv, std::size_t dim,
                         bool append)
    : dim_(dim) {
    const auto mode = std::ios::binary | (append ? std::ios::app : std::ios::trunc);
    ndjson_.open(ndjson, mode);
    if (!ndjson_) throw ConfigError("cannot write " + ndjson.string());
    csv_.open(csv, mode);
    if (!csv_) throw ConfigError("cannot write " + csv.string());
    if (!append) csv_ << scalar_csv_header(dim) << '\n';
}

void TraceWriter::write(const TraceRecord& rec) {
    ndjson_ << record_to_json(rec) << '\n';
    csv_ << rec.iteration << ',' << format_double(rec.eta) << ',' << format_double(rec.log_likelihood);
    for (double v : rec.nu) csv_ << ',' << format_double(v);
    for (const auto& p : rec.kernels) csv_ << ',' << (p.delta ? 1 : 0);
    csv_ << '\n';
    if (!ndjson_ || !csv_) throw ConfigError("trace write failed");
}

void TraceWriter::flush() {
    ndjson_.flush();
    csv_.flush();
}

std::string trace_summary_json(const ChainTrace& trace) {
    ordered_json j;
    j["K"] = trace.dim;
    j["A"] = trace.support;
    j["T"] = trace.horizon;
    j["knot_scheme"] = std::string(to_string(trace.scheme));
    j["kept"] = trace.kept;
    j["delta_probability"] = trace.delta_probability();
    std::vector<double> nu_mean(trace.nu_sum.size(), 0.0);
    if (trace.kept)
        for (std::size_t k = 0; k < nu_mean.size(); ++k) nu_mean[k] = trace.nu_sum[k] / static_cast<double>(trace.kept);
    j["nu_mean"] = nu_mean;
    j["acceptance"] = stats_value(trace.stats);
    j["final_scales"] = {{"mala_step", trace.final_mala_step},
                         {"height_rw_scale", trace.final_height_scale},
                         {"knot_rw_scale", trace.final_knot_scale}};
    return j.dump(2);
}

void write_trace_summary(const ChainTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << trace_summary_json(trace) << '\n';
}

ChainTrace read_trace(const std::filesystem::path& ndjson, const std::filesystem::path& summary) {
    const auto meta = parse_or_throw(read_file(summary), summary.string().c_str());
    ChainTrace trace;
    try {
        trace.dim = meta.at("K").get<std::size_t>();
        trace.support = meta.at("A").get<double>();
        trace.horizon = meta.at("T").get<double>();
        trace.scheme = knot_scheme_from_string(meta.at("knot_scheme").get<std::string>());
        if (meta.contains("acceptance")) trace.stats = stats_from_value(meta["acceptance"]);
        if (meta.contains("final_scales")) {
            const auto& s = meta["final_scales"];
            trace.final_mala_step = s.value("mala_step", 0.0);
            trace.final_height_scale = s.value("height_rw_scale", 0.0);
            trace.final_knot_scale = s.value("knot_rw_scale", 0.0);
        }
    } catch (const json::exception& e) {
        throw ConfigError(summary.string() + ": " + e.what());
    }

    std::ifstream in(ndjson, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + ndjson.string());
    trace.delta_count.assign(trace.dim * trace.dim, 0.0);
    trace.nu_sum.assign(trace.dim, 0.0);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        TraceRecord rec;
        try {
            rec = record_from_json(line);
        } catch (const ConfigError& e) {
            throw ConfigError(ndjson.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (rec.nu.size() != trace.dim || rec.kernels.size() != trace.dim * trace.dim)
            throw ConfigError(ndjson.string() + ":" + std::to_string(lineno) + ": record does not match K");
        ++trace.kept;
        for (std::size_t p = 0; p < rec.kernels.size(); ++p)
            if (rec.kernels[p].delta) trace.delta_count[p] += 1.0;
        for (std::size_t k = 0; k < trace.dim; ++k) trace.nu_sum[k] += rec.nu[k];
        trace.records.push_back(std::move(rec));
    }
    return trace;
}

std::string checkpoint_to_json(const Checkpoint& c) {
    ordered_json j;
    j["iteration"] = c.state.iteration;
    j["nu"] = c.state.nu;
    j["eta"] = c.state.eta;
    auto& ks = j["kernels"] = ordered_json::array();
    for (const auto& p : c.state.kernels) ks.push_back(param_value(p));
    j["rng"] = c.rng_state;
    j["mala_step"] = c.mala_step;
    j["height_scale"] = c.height_scale;
    j["knot_scale"] = c.knot_scale;
    j["adapt_count"] = c.adapt_count;
    j["stats"] = stats_value(c.stats);
    return j.dump(2);
}

Checkpoint checkpoint_from_json(std::string_view text) {
    const auto j = parse_or_throw(text, "checkpoint");
    Checkpoint c;
    try {
        c.state.iteration = j.at("iteration").get<std::size_t>();
        c.state.nu = j.at("nu").get<std::vector<double>>();
        c.state.eta = j.at("eta").get<double>();
        for (const auto& k : j.at("kernels")) c.state.kernels.push_back(param_from_value(k));
        c.rng_state = j.at("rng").get<std::string>();
        c.mala_step = j.at("mala_step").get<double>();
        c.height_scale = j.at("height_scale").get<double>();
        c.knot_scale = j.at("knot_scale").get<double>();
        c.adapt_count = j.at("adapt_count").get<std::array<std::uint64_t, 3>>();
        c.stats = stats_from_value(j.at("stats"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    }
    return c;
}

void write_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + tmp);
        out << checkpoint_to_json(c) << '\n';
        if (!out) throw ConfigError("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return checkpoint_from_json(read_file(path)); }

}  // namespace hawkes
