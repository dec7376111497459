#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coswap/engine.hpp"

namespace coswap {

// A self-contained bundled scenario: embedded config, fault rules, feed and
// scheduled swap specifications. Keep the Scenario alive while the engine
// built from it runs (the engine holds a pointer to the schedule).
struct Scenario {
    std::string name;
    std::string summary;
    MultiModelConfig config;
    EngineSettings settings;
    std::vector<FaultRule> fault_rules;
    std::shared_ptr<BrokerFeed> feed;
    std::shared_ptr<ScriptedTransferSource> schedule;
    std::vector<std::string> predeclared_columns;
};

std::vector<std::string> scenario_names();

// Throws Error on unknown names. `transfer_at` overrides the time the swap
// specification becomes available (scenarios with a schedule only).
Scenario build_scenario(const std::string& name, std::optional<double> transfer_at = std::nullopt);

// Engine wired with the scenario's registry, feed, schedule and columns.
std::unique_ptr<SwapEngine> make_scenario_engine(const Scenario& scenario);

} // namespace coswap
