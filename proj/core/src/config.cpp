#include "hawkes/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hawkes/errors.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/scenarios.hpp"
#include "toml_lite.hpp"

namespace hawkes {

namespace {

void reject_unknown(const toml::Table& t, const std::string& table, std::initializer_list<std::string_view> known) {
    const std::set<std::string_view> allowed(known);
    for (const auto& [key, _] : t)
        if (!allowed.count(key))
            throw ConfigError("unknown config key '" + key + "' in [" + (table.empty() ? "top level" : table) + "]");
}

std::size_t count_value(const toml::Value& v, std::string_view key) {
    const auto i = v.as_int(key);
    if (i < 0) throw ConfigError("config key '" + std::string(key) + "' must be >= 0");
    return static_cast<std::size_t>(i);
}

std::string size_str(std::size_t v) { return std::to_string(v); }

}  // namespace

HawkesModel ScenarioSpec::model() const {
    if (id == "custom") {
        if (model_path.empty()) throw ConfigError("custom scenario needs a model path");
        return read_model(model_path);
    }
    if (id == "1") return scenario1();
    if (id == "2") return scenario2();
    if (id == "3") return scenario3();
    throw ConfigError("unknown scenario id '" + id + "'");
}

double ScenarioSpec::max_horizon() const {
    double m = 0.0;
    for (double t : horizons) m = std::max(m, t);
    return m;
}

void ScenarioSpec::validate() const {
    if (id != "1" && id != "2" && id != "3" && id != "custom") throw ConfigError("scenario id must be 1, 2, 3 or custom");
    if (id == "custom" && model_path.empty()) throw ConfigError("custom scenario needs a model path");
    if (horizons.empty()) throw ConfigError("scenario needs at least one horizon");
    for (double t : horizons)
        if (!(t > 0.0 && std::isfinite(t))) throw ConfigError("horizons must be positive");
    if (replicates == 0) throw ConfigError("replicates must be >= 1");
    if (!(burn_in >= 0.0 && std::isfinite(burn_in))) throw ConfigError("scenario burn_in must be >= 0");
}

void ExperimentConfig::validate() const {
    scenario.validate();
    prior.validate();
    sampler.validate();
}

ExperimentConfig quick_profile(ExperimentConfig base) {
    base.scenario.horizons = {5.0};
    base.scenario.replicates = 5;
    base.sampler.n_iter = 6000;
    base.sampler.burn_in = 2000;
    return base;
}

ExperimentConfig parse_experiment(std::string_view text, const std::filesystem::path& base_dir) {
    const auto doc = toml::parse(text);
    ExperimentConfig cfg;
    for (const auto& [name, _] : doc)
        if (name != "" && name != "scenario" && name != "prior" && name != "sampler" && name != "sampler.moves")
            throw ConfigError("unknown config table [" + name + "]");

    if (auto it = doc.find(""); it != doc.end()) {
        reject_unknown(it->second, "", {"seed"});
        if (auto s = it->second.find("seed"); s != it->second.end())
            cfg.seed = static_cast<std::uint64_t>(s->second.as_int("seed"));
    }

    if (auto it = doc.find("scenario"); it != doc.end()) {
        const auto& t = it->second;
        reject_unknown(t, "scenario", {"id", "model", "horizons", "replicates", "burn_in", "method"});
        auto& s = cfg.scenario;
        if (auto v = t.find("id"); v != t.end()) {
            if (const auto* i = std::get_if<std::int64_t>(&v->second.data)) s.id = std::to_string(*i);
            else s.id = v->second.as_string("id");
        }
        if (auto v = t.find("model"); v != t.end()) {
            std::filesystem::path p = v->second.as_string("model");
            s.model_path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        if (auto v = t.find("horizons"); v != t.end()) {
            s.horizons.clear();
            for (const auto& h : v->second.as_array("horizons")) s.horizons.push_back(h.as_double("horizons"));
        }
        if (auto v = t.find("replicates"); v != t.end()) s.replicates = count_value(v->second, "replicates");
        if (auto v = t.find("burn_in"); v != t.end()) s.burn_in = v->second.as_double("scenario.burn_in");
        if (auto v = t.find("method"); v != t.end()) s.method = sim_method_from_string(v->second.as_string("method"));
    }

    if (auto it = doc.find("prior"); it != doc.end()) {
        const auto& t = it->second;
        reject_unknown(t, "prior",
                       {"p_delta", "eta_shape", "eta_rate", "pi_z", "mu_beta", "s_beta", "mu_nu", "s_nu",
                        "dirichlet_alpha", "knot_scheme", "nonempty_active"});
        auto& p = cfg.prior;
        auto num = [&](const char* key, double& out) {
            if (auto v = t.find(key); v != t.end()) out = v->second.as_double(key);
        };
        num("p_delta", p.p_delta);
        num("eta_shape", p.eta_shape);
        num("eta_rate", p.eta_rate);
        num("pi_z", p.pi_z);
        num("mu_beta", p.mu_beta);
        num("s_beta", p.s_beta);
        num("mu_nu", p.mu_nu);
        num("s_nu", p.s_nu);
        num("dirichlet_alpha", p.dirichlet_alpha);
        if (auto v = t.find("knot_scheme"); v != t.end())
            p.knot_scheme = knot_scheme_from_string(v->second.as_string("knot_scheme"));
        if (auto v = t.find("nonempty_active"); v != t.end()) p.nonempty_active = v->second.as_bool("nonempty_active");
    }

    if (auto it = doc.find("sampler"); it != doc.end()) {
        const auto& t = it->second;
        reject_unknown(t, "sampler",
                       {"n_iter", "burn_in", "thin", "mala_step", "height_rw_scale", "knot_rw_scale", "split_scale",
                        "adapt", "audit_every", "audit_tolerance", "checkpoint_every"});
        auto& s = cfg.sampler;
        auto count = [&](const char* key, std::size_t& out) {
            if (auto v = t.find(key); v != t.end()) out = count_value(v->second, key);
        };
        auto num = [&](const char* key, double& out) {
            if (auto v = t.find(key); v != t.end()) out = v->second.as_double(key);
        };
        count("n_iter", s.n_iter);
        count("burn_in", s.burn_in);
        count("thin", s.thin);
        count("audit_every", s.audit_every);
        count("checkpoint_every", s.checkpoint_every);
        num("mala_step", s.mala_step);
        num("height_rw_scale", s.height_rw_scale);
        num("knot_rw_scale", s.knot_rw_scale);
        num("split_scale", s.split_scale);
        num("audit_tolerance", s.audit_tolerance);
        if (auto v = t.find("adapt"); v != t.end()) s.adapt = v->second.as_bool("adapt");
    }

    if (auto it = doc.find("sampler.moves"); it != doc.end()) {
        const auto& t = it->second;
        reject_unknown(t, "sampler.moves", {"height", "birth", "death", "knot", "delta_flip"});
        auto& m = cfg.sampler.moves;
        auto num = [&](const char* key, double& out) {
            if (auto v = t.find(key); v != t.end()) out = v->second.as_double(key);
        };
        num("height", m.height);
        num("birth", m.birth);
        num("death", m.death);
        num("knot", m.knot);
        num("delta_flip", m.delta_flip);
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_experiment(buf.str(), path.parent_path());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string experiment_to_toml(const ExperimentConfig& cfg) {
    using toml::format;
    using toml::quote;
    std::ostringstream out;
    const auto& s = cfg.scenario;
    out << "seed = " << cfg.seed << "\n\n[scenario]\n";
    if (s.id == "custom") out << "id = \"custom\"\nmodel = " << quote(s.model_path.generic_string()) << '\n';
    else out << "id = " << s.id << '\n';
    out << "horizons = [";
    for (std::size_t i = 0; i < s.horizons.size(); ++i) out << (i ? ", " : "") << format(s.horizons[i]);
    out << "]\nreplicates = " << s.replicates << "\nburn_in = " << format(s.burn_in)
        << "\nmethod = " << quote(to_string(s.method)) << "\n\n";

    const auto& p = cfg.prior;
    out << "[prior]\n"
        << "p_delta = " << format(p.p_delta) << "\neta_shape = " << format(p.eta_shape)
        << "\neta_rate = " << format(p.eta_rate) << "\npi_z = " << format(p.pi_z)
        << "\nmu_beta = " << format(p.mu_beta) << "\ns_beta = " << format(p.s_beta)
        << "\nmu_nu = " << format(p.mu_nu) << "\ns_nu = " << format(p.s_nu)
        << "\ndirichlet_alpha = " << format(p.dirichlet_alpha)
        << "\nknot_scheme = " << quote(to_string(p.knot_scheme))
        << "\nnonempty_active = " << (p.nonempty_active ? "true" : "false") << "\n\n";

    const auto& m = cfg.sampler;
    out << "[sampler]\n"
        << "n_iter = " << size_str(m.n_iter) << "\nburn_in = " << size_str(m.burn_in) << "\nthin = " << size_str(m.thin)
        << "\nmala_step = " << format(m.mala_step) << "\nheight_rw_scale = " << format(m.height_rw_scale)
        << "\nknot_rw_scale = " << format(m.knot_rw_scale) << "\nsplit_scale = " << format(m.split_scale)
        << "\nadapt = " << (m.adapt ? "true" : "false") << "\naudit_every = " << size_str(m.audit_every)
        << "\naudit_tolerance = " << format(m.audit_tolerance)
        << "\ncheckpoint_every = " << size_str(m.checkpoint_every) << "\n\n";
    out << "[sampler.moves]\n"
        << "height = " << format(m.moves.height) << "\nbirth = " << format(m.moves.birth)
        << "\ndeath = " << format(m.moves.death) << "\nknot = " << format(m.moves.knot)
        << "\ndelta_flip = " << format(m.moves.delta_flip) << '\n';
    return out.str();
}

std::uint64_t simulation_stream(std::size_t replicate) { return replicate; }

std::uint64_t chain_seed(std::uint64_t seed, double horizon, std::size_t replicate) {
    const auto millis = static_cast<std::uint64_t>(std::llround(horizon * 1000.0));
    return derive_seed(seed, (std::uint64_t{1} << 62) | (millis << 24) | replicate);
}

}  // namespace hawkes
