#pragma once

#include "crnoma/agents.hpp"
#include "crnoma/env.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace crnoma {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string name = "run";
    std::string preset = "desk"; // desk | paper
    std::string scenario = "B";  // A | B | C | custom
    EnvConfig env;
    AgentKind agent = AgentKind::masrddpg;
    AgentConfig training;
    int episodes = 200;
    std::vector<std::uint64_t> seeds = {1};
};

// Built-in defaults. "desk" keeps runs minutes-long; "paper" uses the
// full-scale training lengths and widths.
ExperimentConfig preset_config(const std::string& preset);

// Eavesdropper-position presets A/B/C; "custom" leaves distances untouched.
void apply_scenario(ExperimentConfig& cfg, const std::string& scenario);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Starts from the named preset, overlays the document, validates ranges and
// rejects unknown keys. Throws ConfigError with every diagnostic collected.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config_file(const std::string& path);
void save_config_file(const std::string& path, const ExperimentConfig& cfg);

} // namespace crnoma
