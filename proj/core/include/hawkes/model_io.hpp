#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "hawkes/model.hpp"

namespace hawkes {

// {"K", "A", "nu": [...], "kernels": [[{"type": ..., "params": {...}}, ...], ...]}
// kernels[l][k] is h_{l,k}. Step params are {"knots": [...], "heights": [...]};
// exponential {"scale", "rate"}; trunc_gauss {"amplitude", "center", "width"};
// null {}.
std::string model_to_json(const HawkesModel& model, int indent = 2);
HawkesModel model_from_json(std::string_view text);

void write_model(const HawkesModel& model, const std::filesystem::path& path);
HawkesModel read_model(const std::filesystem::path& path);

}  // namespace hawkes
