#pragma once

#include <map>
#include <string>
#include <vector>

#include "coswap/builtin_units.hpp"
#include "coswap/condition.hpp"
#include "coswap/port_id.hpp"
#include "coswap/value.hpp"

namespace coswap {

// One entry of the modelSwaps section: the keyed instance is replaced by
// swap_instance once the conditions fire.
struct SwapEntry {
    std::string swap_instance;
    ConditionExpr step_condition;
    ConditionExpr swap_condition;
    std::map<PortId, std::vector<PortId>> swap_connections;

    bool operator==(const SwapEntry& other) const {
        return swap_instance == other.swap_instance &&
               step_condition == other.step_condition &&
               swap_condition == other.swap_condition &&
               swap_connections == other.swap_connections;
    }
};

// Parsed multi-model document. `units` holds the raw archive values from
// the `fmus` section; model names are derived by stripping the path and the
// `.fmu` suffix. Instance names are bound to unit keys through the port
// references that mention them; a key no port ever references stays
// unnamed and does not take part in a simulation.
struct MultiModelConfig {
    std::map<std::string, std::string> units; // key -> archive value
    std::map<PortId, std::vector<PortId>> connections;
    std::map<PortId, Value> parameters;
    std::map<std::string, SwapEntry> model_swaps;       // replaced instance -> entry
    std::map<std::string, std::string> model_transfers; // old name -> new name

    // Derived bindings (filled by the parser / rebuild_bindings()).
    std::map<std::string, std::string> instance_to_key;
    std::map<std::string, std::string> key_to_instance;

    bool has_instance(const std::string& name) const { return instance_to_key.count(name) != 0; }
    // Model name for a bound instance; throws if unknown.
    std::string model_of(const std::string& instance) const;
    // Instance names in deterministic (map) order.
    std::vector<std::string> instance_names() const;

    // Recompute the instance<->key bindings from all port references.
    // Throws ParseError on conflicting or unknown keys.
    void rebuild_bindings();

    bool operator==(const MultiModelConfig& other) const {
        return units == other.units && connections == other.connections &&
               parameters == other.parameters && model_swaps == other.model_swaps &&
               model_transfers == other.model_transfers;
    }
};

// Parse the multi-model JSON format (Fig-2-compatible field names: fmus,
// connections, parameters, modelSwaps, modelTransfers; swap entries use
// swapInstance, stepCondition, swapCondition, swapConnections). Unknown
// top-level keys are reported through `warnings` and skipped. Throws
// ParseError on syntax errors, malformed port ids, duplicate sinks,
// key conflicts, and transfer/swap overlaps.
MultiModelConfig parse_multi_model(const std::string& text,
                                   std::vector<std::string>* warnings = nullptr);

// Inverse of parse_multi_model up to config equality.
std::string serialize_multi_model(const MultiModelConfig& cfg, int indent = 2);

enum class Severity { Error, Warning, Note };

struct Diagnostic {
    Severity severity;
    std::string message;
};

struct ValidationReport {
    std::vector<Diagnostic> diagnostics;

    bool ok() const {
        for (const auto& d : diagnostics)
            if (d.severity == Severity::Error) return false;
        return true;
    }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& d : diagnostics)
            if (d.severity == Severity::Error) ++n;
        return n;
    }
    void add(Severity s, std::string message) { diagnostics.push_back({s, std::move(message)}); }
    std::string to_string() const;
};

// Static checks of a parsed config against the available models: model
// names resolve, connection endpoints name declared variables with the
// right causality, parameter types match, conditions reference declared
// variables (sim.time is allowed), plus a note when a swap entry's step
// and swap condition texts differ and neither is "(true)" (the engine
// assumes swapCondition implies stepCondition at run time).
ValidationReport validate_config(const MultiModelConfig& cfg, const ModelRegistry& registry);

} // namespace coswap
