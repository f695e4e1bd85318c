#include "hawkes/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hawkes/errors.hpp"
#include "json_convert.hpp"

namespace hawkes {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json kernel_to_json(const Kernel& h) {
    ordered_json out;
    out["type"] = std::string(h.type_name());
    ordered_json params = ordered_json::object();
    if (const auto* s = std::get_if<StepKernel>(&h.variant())) {
        params["knots"] = s->knots;
        params["heights"] = s->heights;
    } else if (const auto* e = std::get_if<ExponentialKernel>(&h.variant())) {
        params["scale"] = e->scale;
        params["rate"] = e->rate;
    } else if (const auto* g = std::get_if<TruncGaussKernel>(&h.variant())) {
        params["amplitude"] = g->amplitude;
        params["center"] = g->center;
        params["width"] = g->width;
    }
    out["params"] = std::move(params);
    return out;
}

Kernel kernel_from_json(const json& j, double support) {
    const auto type = j.at("type").get<std::string>();
    const json params = j.value("params", json::object());
    if (type == "null") return Kernel::null();
    if (type == "step")
        return Kernel::step(params.at("knots").get<std::vector<double>>(),
                            params.at("heights").get<std::vector<double>>());
    if (type == "exponential")
        return Kernel::exponential(params.at("scale").get<double>(), params.at("rate").get<double>(),
                                   support);
    if (type == "trunc_gauss")
        return Kernel::trunc_gauss(params.at("amplitude").get<double>(),
                                   params.at("center").get<double>(),
                                   params.at("width").get<double>(), support);
    throw ConfigError("unknown kernel type '" + type + "'");
}

ordered_json model_to_json_value(const HawkesModel& model) {
    ordered_json out;
    const auto k = model.dim();
    out["K"] = k;
    out["A"] = model.support();
    out["nu"] = model.nu();
    ordered_json rows = ordered_json::array();
    for (std::size_t l = 0; l < k; ++l) {
        ordered_json row = ordered_json::array();
        for (std::size_t m = 0; m < k; ++m) row.push_back(kernel_to_json(model.kernel(l, m)));
        rows.push_back(std::move(row));
    }
    out["kernels"] = std::move(rows);
    return out;
}

HawkesModel model_from_json_value(const json& j) {
    try {
        const auto k = j.at("K").get<std::size_t>();
        const double a = j.at("A").get<double>();
        auto nu = j.at("nu").get<std::vector<double>>();
        if (nu.size() != k) throw ConfigError("model JSON: nu has wrong length");
        const auto& rows = j.at("kernels");
        if (!rows.is_array() || rows.size() != k) throw ConfigError("model JSON: kernels must be K x K");
        std::vector<Kernel> kernels;
        kernels.reserve(k * k);
        for (const auto& row : rows) {
            if (!row.is_array() || row.size() != k)
                throw ConfigError("model JSON: kernels must be K x K");
            for (const auto& cell : row) kernels.push_back(kernel_from_json(cell, a));
        }
        return HawkesModel(a, std::move(nu), std::move(kernels));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model JSON: ") + e.what());
    }
}

std::string model_to_json(const HawkesModel& model, int indent) {
    return model_to_json_value(model).dump(indent);
}

HawkesModel model_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model JSON: ") + e.what());
    }
    return model_from_json_value(j);
}

void write_model(const HawkesModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << model_to_json(model) << '\n';
}

HawkesModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

}  // namespace hawkes
