#pragma once

// JSON conversions shared between translation units. Internal header.

#include <json.hpp>

#include "hawkes/model.hpp"

namespace hawkes {

nlohmann::ordered_json kernel_to_json(const Kernel& h);
Kernel kernel_from_json(const nlohmann::json& j, double support);
nlohmann::ordered_json model_to_json_value(const HawkesModel& model);
HawkesModel model_from_json_value(const nlohmann::json& j);

}  // namespace hawkes
