#include "commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include "hawkes/analysis.hpp"
#include "hawkes/config.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/events.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/sampler.hpp"
#include "hawkes/scenarios.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/trace_io.hpp"

namespace hawkes::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("cannot write " + path.string());
}

json read_json(const fs::path& path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string rep_name(std::size_t r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rep_%03zu", r);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

fs::path data_file(std::size_t r) { return fs::path("data") / (rep_name(r) + ".csv"); }

struct ChainPaths {
    fs::path ndjson, csv, summary, checkpoint;
};

ChainPaths chain_paths(const fs::path& dir, double horizon, std::size_t r) {
    const auto base = dir / "traces" / horizon_label(horizon) / rep_name(r);
    return {base.string() + ".ndjson", base.string() + ".csv", base.string() + ".summary.json",
            base.string() + ".ckpt.json"};
}

fs::path relative_to(const fs::path& p, const fs::path& dir) { return p.lexically_relative(dir); }

HawkesModel scenario_model(const std::string& id) {
    if (id == "1") return scenario1();
    if (id == "2") return scenario2();
    if (id == "3") return scenario3();
    throw ConfigError("unknown scenario id '" + id + "'");
}

std::size_t manifest_replicates(const fs::path& dir) {
    const auto m = read_json(dir / "manifest.json");
    try {
        return m.at("replicates").size();
    } catch (const json::exception& e) {
        throw ConfigError((dir / "manifest.json").string() + ": " + e.what());
    }
}

// Keeps the lines of an NDJSON / CSV trace whose iteration is <= `last`.
void truncate_trace(const ChainPaths& p, std::size_t last) {
    {
        std::ifstream in(p.ndjson, std::ios::binary);
        std::string kept, line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (record_from_json(line).iteration > last) break;
            kept += line + '\n';
        }
        in.close();
        write_text(p.ndjson, kept);
    }
    std::ifstream in(p.csv, std::ios::binary);
    std::string kept, line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            kept += line + '\n';
            header = false;
            continue;
        }
        if (line.empty()) continue;
        if (std::stoull(line.substr(0, line.find(','))) > last) break;
        kept += line + '\n';
    }
    in.close();
    write_text(p.csv, kept);
}

// Running summaries recomputed from the NDJSON file so that resumed and
// uninterrupted chains report identical numbers.
void fill_from_records(ChainTrace& trace, const fs::path& ndjson) {
    std::ifstream in(ndjson, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + ndjson.string());
    trace.kept = 0;
    trace.delta_count.assign(trace.dim * trace.dim, 0.0);
    trace.nu_sum.assign(trace.dim, 0.0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = record_from_json(line);
        ++trace.kept;
        for (std::size_t p = 0; p < rec.kernels.size(); ++p)
            if (rec.kernels[p].delta) trace.delta_count[p] += 1.0;
        for (std::size_t k = 0; k < trace.dim; ++k) trace.nu_sum[k] += rec.nu[k];
    }
}

struct ChainTask {
    double horizon = 0.0;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
};

struct ChainResult {
    std::size_t kept = 0;
    MoveStats stats;
    std::vector<double> delta_probability;
    bool skipped = false;
};

}  // namespace

std::string horizon_label(double horizon) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "T%g", horizon);
    return buf;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& log) {
    ExperimentConfig cfg = opts.config ? load_experiment(*opts.config) : ExperimentConfig{};
    if (opts.scenario) {
        cfg.scenario.id = *opts.scenario;
        cfg.scenario.model_path.clear();
    }
    if (opts.model) {
        cfg.scenario.id = "custom";
        cfg.scenario.model_path = *opts.model;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.replicates) cfg.scenario.replicates = *opts.replicates;
    if (opts.quick) cfg = quick_profile(cfg);
    cfg.validate();

    const HawkesModel model = cfg.scenario.model();
    const auto spectral = spectral_check(model);
    if (!spectral.stationary) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "model is not stationary: spectral radius %.6g (norm %.6g) >= 1",
                      spectral.spectral_radius, spectral.spectral_norm);
        throw NumericError(buf, {spectral.spectral_radius, spectral.spectral_norm});
    }

    fs::create_directories(opts.out / "data");
    ExperimentConfig stored = cfg;
    if (stored.scenario.id == "custom") stored.scenario.model_path = "truth.json";
    write_text(opts.out / "config.toml", experiment_to_toml(stored));
    write_model(model, opts.out / "truth.json");

    SimConfig sim;
    sim.horizon = cfg.scenario.max_horizon();
    sim.burn_in = cfg.scenario.burn_in;
    sim.seed = cfg.seed;
    sim.method = cfg.scenario.method;

    const std::size_t n = cfg.scenario.replicates;
    std::vector<std::vector<std::size_t>> counts(n);
    std::mutex log_mutex;
    parallel_for(n, opts.jobs, [&](std::size_t r) {
        const auto seq = simulate(model, sim, simulation_stream(r));
        write_events(seq, opts.out / data_file(r));
        auto& c = counts[r];
        for (int k = 0; k < seq.dim(); ++k) c.push_back(seq.count(k, 0.0, sim.horizon));
        std::lock_guard lock(log_mutex);
        log << "simulated " << rep_name(r) << ": " << seq.events().size() << " events\n";
    });

    ordered_json m;
    m["command"] = "simulate";
    m["seed"] = cfg.seed;
    m["scenario"] = cfg.scenario.id;
    m["model"] = "truth.json";
    m["config"] = "config.toml";
    m["K"] = model.dim();
    m["A"] = model.support();
    m["window"] = {-model.support(), sim.horizon};
    m["burn_in"] = sim.burn_in;
    m["method"] = std::string(to_string(sim.method));
    m["spectral_radius"] = spectral.spectral_radius;
    m["horizons"] = cfg.scenario.horizons;
    auto& reps = m["replicates"] = ordered_json::array();
    for (std::size_t r = 0; r < n; ++r) {
        const auto stream = simulation_stream(r);
        reps.push_back({{"index", r},
                        {"stream", stream},
                        {"stream_seed", derive_seed(cfg.seed, stream)},
                        {"file", data_file(r).generic_string()},
                        {"events_in_0_T", counts[r]}});
    }
    write_text(opts.out / "manifest.json", m.dump(2) + "\n");
    out << "wrote " << n << " replicates of scenario " << cfg.scenario.id << " to " << opts.out.string() << '\n';
    return kExitOk;
}

int cmd_infer(const InferOptions& opts, std::ostream& out, std::ostream& log) {
    const fs::path& dir = opts.dir;
    ExperimentConfig cfg = load_experiment(dir / "config.toml");
    if (opts.config) {
        const auto other = load_experiment(*opts.config);
        cfg.prior = other.prior;
        cfg.sampler = other.sampler;
    }
    const std::size_t available = manifest_replicates(dir);
    if (opts.quick) cfg = quick_profile(cfg);
    cfg.scenario.replicates = std::min(cfg.scenario.replicates, available);
    const HawkesModel truth = read_model(dir / "truth.json");
    cfg.prior.support = truth.support();
    cfg.validate();

    std::vector<ChainTask> tasks;
    auto horizons = cfg.scenario.horizons;
    std::sort(horizons.begin(), horizons.end());
    for (double h : horizons)
        for (std::size_t r = 0; r < cfg.scenario.replicates; ++r) tasks.push_back({h, r, chain_seed(cfg.seed, h, r)});

    if (opts.dry_run) {
        out << experiment_to_toml(cfg) << "\n# plan: " << tasks.size() << " chains\n";
        for (const auto& t : tasks)
            out << "# " << horizon_label(t.horizon) << ' ' << rep_name(t.replicate) << " seed " << t.seed << '\n';
        return kExitOk;
    }

    std::vector<ChainResult> results(tasks.size());
    std::mutex log_mutex;
    parallel_for(tasks.size(), opts.jobs, [&](std::size_t i) {
        const auto& task = tasks[i];
        const auto paths = chain_paths(dir, task.horizon, task.replicate);
        fs::create_directories(paths.ndjson.parent_path());
        auto& res = results[i];

        if (opts.resume && fs::exists(paths.summary)) {
            const auto meta = read_json(paths.summary);
            res.skipped = true;
            res.kept = meta.at("kept").get<std::size_t>();
            res.delta_probability = meta.at("delta_probability").get<std::vector<double>>();
            const auto trace = read_trace(paths.ndjson, paths.summary);
            res.stats = trace.stats;
            std::lock_guard lock(log_mutex);
            log << "skip " << horizon_label(task.horizon) << ' ' << rep_name(task.replicate) << " (complete)\n";
            return;
        }

        const auto full = read_events(dir / data_file(task.replicate));
        const auto seq = full.slice(-truth.support(), task.horizon);
        SamplerConfig sc = cfg.sampler;
        sc.seed = task.seed;

        std::optional<Sampler> sampler;
        bool append = false;
        if (opts.resume && fs::exists(paths.checkpoint)) {
            const auto ck = read_checkpoint(paths.checkpoint);
            truncate_trace(paths, ck.state.iteration);
            sampler.emplace(seq, task.horizon, cfg.prior, sc, ck);
            append = true;
        } else {
            sampler.emplace(seq, task.horizon, cfg.prior, sc, default_initial_state(seq, task.horizon, cfg.prior));
        }
        TraceWriter writer(paths.ndjson, paths.csv, truth.dim(), append);
        auto trace = sampler->run([&](const TraceRecord& rec) { writer.write(rec); }, false,
                                  [&](const Checkpoint& c) {
                                      writer.flush();
                                      write_checkpoint(c, paths.checkpoint);
                                  });
        writer.flush();
        fill_from_records(trace, paths.ndjson);
        write_trace_summary(trace, paths.summary);
        res.kept = trace.kept;
        res.stats = trace.stats;
        res.delta_probability = trace.delta_probability();
        std::lock_guard lock(log_mutex);
        log << "chain " << horizon_label(task.horizon) << ' ' << rep_name(task.replicate) << ": " << trace.kept
            << " draws kept\n";
    });

    ordered_json m;
    m["command"] = "infer";
    m["seed"] = cfg.seed;
    m["config"] = "config.toml";
    m["n_iter"] = cfg.sampler.n_iter;
    m["burn_in"] = cfg.sampler.burn_in;
    m["thin"] = cfg.sampler.thin;
    m["knot_scheme"] = std::string(to_string(cfg.prior.knot_scheme));
    auto& chains = m["chains"] = ordered_json::array();
    ordered_json acc = ordered_json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto paths = chain_paths(dir, tasks[i].horizon, tasks[i].replicate);
        chains.push_back({{"horizon", tasks[i].horizon},
                          {"replicate", tasks[i].replicate},
                          {"seed", tasks[i].seed},
                          {"data", data_file(tasks[i].replicate).generic_string()},
                          {"trace", relative_to(paths.ndjson, dir).generic_string()},
                          {"scalars", relative_to(paths.csv, dir).generic_string()},
                          {"summary", relative_to(paths.summary, dir).generic_string()},
                          {"kept", results[i].kept}});
        ordered_json rates;
        for (int mv = 0; mv < static_cast<int>(Move::count); ++mv)
            rates[std::string(to_string(static_cast<Move>(mv)))] = results[i].stats.rate(static_cast<Move>(mv));
        acc.push_back({{"horizon", tasks[i].horizon}, {"replicate", tasks[i].replicate}, {"rates", rates}});
    }
    write_text(dir / "infer_manifest.json", m.dump(2) + "\n");
    write_text(dir / "acceptance.json", acc.dump(2) + "\n");
    out << "ran " << tasks.size() << " chains into " << (dir / "traces").string() << '\n';
    return kExitOk;
}

int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& log) {
    const fs::path& dir = opts.dir;
    if (!fs::exists(dir / "infer_manifest.json")) throw ConfigError("no traces found in " + dir.string());
    const auto manifest = read_json(dir / "infer_manifest.json");
    if (manifest.at("chains").empty()) throw ConfigError("no traces found in " + dir.string());
    const std::string scheme = manifest.value("knot_scheme", std::string("random"));

    std::optional<HawkesModel> truth;
    if (fs::exists(dir / "truth.json")) truth = read_model(dir / "truth.json");
    else log << "notice: no truth.json in " << dir.string() << "; D metrics omitted, summaries only\n";

    std::map<double, std::vector<json>> by_horizon;
    for (const auto& c : manifest.at("chains")) by_horizon[c.at("horizon").get<double>()].push_back(c);

    const fs::path report = dir / "report";
    fs::create_directories(report);
    std::size_t dim = 0;
    std::string delta_rows;
    std::string d_rows;

    for (auto& [horizon, chains] : by_horizon) {
        std::sort(chains.begin(), chains.end(), [](const json& a, const json& b) {
            return a.at("replicate").get<std::size_t>() < b.at("replicate").get<std::size_t>();
        });
        const std::size_t n = chains.size();
        std::vector<std::vector<double>> probs(n);
        std::vector<double> d1(n, 0.0), d2(n, 0.0);
        std::vector<std::size_t> used(n, 0);
        parallel_for(n, opts.jobs, [&](std::size_t i) {
            const auto& c = chains[i];
            const auto r = c.at("replicate").get<std::size_t>();
            const auto trace = read_trace(dir / c.at("trace").get<std::string>(), dir / c.at("summary").get<std::string>());
            if (trace.records.empty()) throw ConfigError("empty trace " + c.at("trace").get<std::string>());
            const auto summary = summarize(trace);
            write_summary(summary, report / horizon_label(horizon) / rep_name(r));
            probs[i] = summary.edge_probability;
            if (!truth) return;
            const auto data = read_events(dir / c.at("data").get<std::string>()).slice(-trace.support, horizon);
            const std::size_t stride = std::max<std::size_t>(1, (trace.records.size() + opts.max_draws - 1) / opts.max_draws);
            const ReplicateDraws rep{&trace, &data};
            const auto d = estimate_D1_D2(std::span(&rep, 1), *truth, true, stride);
            d1[i] = d.d1;
            d2[i] = d.d2;
            used[i] = (trace.records.size() + stride - 1) / stride;
        });
        dim = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(probs[0].size()))));
        std::vector<double> mean(probs[0].size(), 0.0);
        for (const auto& p : probs)
            for (std::size_t e = 0; e < p.size(); ++e) mean[e] += p[e] / static_cast<double>(n);
        write_text(report / horizon_label(horizon) / "graph_mean.dot", extract_graph(dim, mean, opts.threshold).dot);

        delta_rows += num(horizon) + ',' + scheme + ',' + std::to_string(n);
        for (double p : mean) delta_rows += ',' + num(p);
        delta_rows += '\n';

        std::string per = "replicate,D1_h_l1,D2_lambda_d1T,draws\n";
        for (std::size_t i = 0; i < n; ++i)
            per += std::to_string(chains[i].at("replicate").get<std::size_t>()) + ',' + num(d1[i]) + ',' + num(d2[i]) +
                   ',' + std::to_string(used[i]) + '\n';
        if (truth) {
            write_text(report / horizon_label(horizon) / "d_metrics_replicates.csv", per);
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                m1 += d1[i] / static_cast<double>(n);
                m2 += d2[i] / static_cast<double>(n);
            }
            d_rows += num(horizon) + ',' + scheme + ',' + std::to_string(n) + ',' + num(m1) + ',' + num(m2) + '\n';
        }
        log << "report " << horizon_label(horizon) << ": " << n << " replicates\n";
    }

    std::string header = "T,knot_scheme,replicates";
    for (std::size_t l = 0; l < dim; ++l)
        for (std::size_t k = 0; k < dim; ++k) header += "," + std::to_string(l + 1) + " over " + std::to_string(k + 1);
    std::string truth_row;
    if (truth) {
        truth_row = "true,,";
        for (std::size_t l = 0; l < dim; ++l)
            for (std::size_t k = 0; k < dim; ++k) truth_row += truth->kernel(l, k).mass() > 0.0 ? ",1" : ",0";
        truth_row += '\n';
    }
    write_text(report / "delta_table.csv", header + '\n' + truth_row + delta_rows);
    if (truth) write_text(report / "d_metrics.csv", "T,knot_scheme,replicates,D1_h_l1,D2_lambda_d1T\n" + d_rows);
    out << "wrote report to " << report.string() << '\n';
    return kExitOk;
}

int cmd_distance(const DistanceOptions& opts, std::ostream& out) {
    const auto a = read_model(opts.model_a);
    const auto b = read_model(opts.model_b);
    ordered_json j;
    j["l1"] = l1_param_distance(a, b);
    if (opts.events) {
        if (!opts.horizon) throw ConfigError("distance: --horizon is required with --events");
        j["d1T"] = d1T_distance(a, b, read_events(*opts.events), *opts.horizon);
    }
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_check_model(const CheckModelOptions& opts, std::ostream& out) {
    if (opts.model.has_value() == opts.scenario.has_value())
        throw ConfigError("check-model: give exactly one of --model or --scenario");
    const HawkesModel model = opts.model ? read_model(*opts.model) : scenario_model(*opts.scenario);
    const auto rho = branching_matrix(model);
    const auto rep = spectral_check(rho);
    ordered_json j;
    j["K"] = model.dim();
    j["A"] = model.support();
    auto& rows = j["branching_matrix"] = ordered_json::array();
    for (Eigen::Index l = 0; l < rho.rows(); ++l) {
        std::vector<double> row(static_cast<std::size_t>(rho.cols()));
        for (Eigen::Index k = 0; k < rho.cols(); ++k) row[static_cast<std::size_t>(k)] = rho(l, k);
        rows.push_back(row);
    }
    j["spectral_radius"] = rep.spectral_radius;
    j["spectral_norm"] = rep.spectral_norm;
    j["stationary"] = rep.stationary;
    if (rep.stationary) {
        const auto mu = mean_intensity(model);
        j["mean_intensity"] = std::vector<double>(mu.data(), mu.data() + mu.size());
        std::vector<double> sizes;
        for (std::size_t l = 0; l < model.dim(); ++l) sizes.push_back(expected_cluster_size(model, l));
        j["expected_cluster_size"] = sizes;
    }
    out << j.dump(2) << '\n';
    if (opts.strict && !rep.stationary) return kExitNumeric;
    return kExitOk;
}

}  // namespace hawkes::cli
