#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hawkes/model.hpp"
#include "hawkes/prior.hpp"
#include "hawkes/sampler.hpp"
#include "hawkes/simulate.hpp"

namespace hawkes {

/// What to simulate and on which windows. id is 1, 2, 3 or "custom" (model
/// read from model_path, relative paths resolved against the config file).
struct ScenarioSpec {
    std::string id = "1";
    std::filesystem::path model_path;
    std::vector<double> horizons{5.0, 10.0, 20.0};
    std::size_t replicates = 25;
    double burn_in = 2.0;
    SimMethod method = SimMethod::cluster;

    // Frozen scenario or the custom model file.
    HawkesModel model() const;
    double max_horizon() const;
    void validate() const;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    ScenarioSpec scenario;
    PriorConfig prior;
    SamplerConfig sampler;

    void validate() const;
};

// Desk-scale profile: T = 5 only, 5 replicates, 6000 iterations (2000 burn-in).
ExperimentConfig quick_profile(ExperimentConfig base);

// [scenario], [prior], [sampler] and [sampler.moves] tables plus a top-level
// seed. Unknown keys are rejected. Missing keys keep their defaults.
ExperimentConfig parse_experiment(std::string_view toml_text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment(const std::filesystem::path& path);
std::string experiment_to_toml(const ExperimentConfig& cfg);

// Stream ids used to derive per-replicate seeds from the top-level seed.
std::uint64_t simulation_stream(std::size_t replicate);
std::uint64_t chain_seed(std::uint64_t seed, double horizon, std::size_t replicate);

}  // namespace hawkes
