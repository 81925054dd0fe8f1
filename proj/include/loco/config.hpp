#pragma once

// Scenario configuration file: a JSON object whose sections mirror the
// structs below. Every key is optional and falls back to the struct default;
// unknown keys are validation errors. See README.md for the full key list.

#include "loco/gestures.hpp"
#include "loco/pilot.hpp"
#include "loco/sim.hpp"
#include "loco/svm.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace loco {

struct ScenarioConfig {
    ScenarioType scenario = ScenarioType::Pursuit;
    SimConfig sim{};
    ControllerConfig controller{};
    PursuitConfig pursuit{};
    WaypointsConfig waypoints{};
    PilotConfig pilot{};
    svm::TrainParams classifier{};
};

/// All problems found, in document order; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

/// Parses and validates. Throws ConfigError listing every problem at once.
ScenarioConfig parse_scenario_config(std::string_view json_text);
ScenarioConfig load_scenario_config(const std::string& path);

/// Applies a JSON object of pilot overrides on top of `base`.
/// Throws ConfigError on unknown keys or wrong types.
PilotConfig apply_pilot_overrides(const PilotConfig& base, std::string_view json_text);

} // namespace loco
