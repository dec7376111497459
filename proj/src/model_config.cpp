#include "coswap/model_config.hpp"

#include <set>
#include <sstream>

#include <json.hpp>

#include "coswap/errors.hpp"

namespace coswap {

namespace {

using nlohmann::json;

std::string strip_braces(const std::string& key, const std::string& context) {
    if (key.size() < 3 || key.front() != '{' || key.back() != '}')
        throw ParseError(context + ": unit key '" + key + "' must be brace-delimited");
    std::string inner = key.substr(1, key.size() - 2);
    if (!is_identifier(inner))
        throw ParseError(context + ": unit key '" + key + "' is not an identifier");
    return inner;
}

Value value_from_json(const json& j, const std::string& context) {
    if (j.is_boolean()) return Value(j.get<bool>());
    if (j.is_number_integer()) return Value(j.get<std::int64_t>());
    if (j.is_number_float()) return Value(j.get<double>());
    if (j.is_string()) return Value(j.get<std::string>());
    throw ParseError(context + ": expected a scalar value");
}

json value_to_json(const Value& v) {
    switch (v.type()) {
    case ValueType::Real: return v.as_real();
    case ValueType::Integer: return v.as_integer();
    case ValueType::Boolean: return v.as_boolean();
    case ValueType::String: return v.as_string();
    }
    return nullptr;
}

std::map<PortId, std::vector<PortId>> parse_connection_block(const json& block,
                                                             const std::string& context,
                                                             std::set<std::string>& seen_sinks) {
    std::map<PortId, std::vector<PortId>> out;
    for (const auto& [source_text, sinks_json] : block.items()) {
        PortId source = parse_port_id(source_text);
        if (!sinks_json.is_array())
            throw ParseError(context + ": sinks of " + source_text + " must be an array");
        std::vector<PortId> sinks;
        for (const auto& sink_json : sinks_json) {
            if (!sink_json.is_string())
                throw ParseError(context + ": sink of " + source_text + " must be a string");
            PortId sink = parse_port_id(sink_json.get<std::string>());
            if (!seen_sinks.insert(sink.str()).second)
                throw ParseError(context + ": duplicate sink " + sink.str() +
                                 " (one source per input)");
            sinks.push_back(std::move(sink));
        }
        if (!out.emplace(std::move(source), std::move(sinks)).second)
            throw ParseError(context + ": duplicate source " + source_text);
    }
    return out;
}

ConditionExpr parse_entry_condition(const json& entry, const char* field,
                                    const std::string& context) {
    if (!entry.contains(field))
        throw ParseError(context + ": missing " + field);
    if (!entry.at(field).is_string())
        throw ParseError(context + ": " + field + " must be a string");
    try {
        return parse_condition(entry.at(field).get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(context + ": " + field + ": " + e.what());
    }
}

void bind(std::map<std::string, std::string>& instance_to_key,
          std::map<std::string, std::string>& key_to_instance, const PortId& port) {
    auto by_name = instance_to_key.find(port.instance_name);
    if (by_name != instance_to_key.end() && by_name->second != port.instance_key)
        throw ParseError("instance name '" + port.instance_name + "' is bound to both {" +
                         by_name->second + "} and {" + port.instance_key + "}");
    auto by_key = key_to_instance.find(port.instance_key);
    if (by_key != key_to_instance.end() && by_key->second != port.instance_name)
        throw ParseError("unit key {" + port.instance_key + "} is named both '" +
                         by_key->second + "' and '" + port.instance_name + "'");
    instance_to_key[port.instance_name] = port.instance_key;
    key_to_instance[port.instance_key] = port.instance_name;
}

} // namespace

std::string MultiModelConfig::model_of(const std::string& instance) const {
    auto it = instance_to_key.find(instance);
    if (it == instance_to_key.end()) throw Error("unknown instance '" + instance + "'");
    return model_name_from_unit_value(units.at(it->second));
}

std::vector<std::string> MultiModelConfig::instance_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : instance_to_key) out.push_back(name);
    return out;
}

void MultiModelConfig::rebuild_bindings() {
    instance_to_key.clear();
    key_to_instance.clear();
    auto visit = [&](const PortId& port) {
        if (units.count(port.instance_key) == 0)
            throw ParseError("unknown instance key {" + port.instance_key + "} in " + port.str());
        bind(instance_to_key, key_to_instance, port);
    };
    for (const auto& [source, sinks] : connections) {
        visit(source);
        for (const auto& sink : sinks) visit(sink);
    }
    for (const auto& [port, _] : parameters) visit(port);
    for (const auto& [_, entry] : model_swaps) {
        for (const auto& [source, sinks] : entry.swap_connections) {
            visit(source);
            for (const auto& sink : sinks) visit(sink);
        }
    }
}

MultiModelConfig parse_multi_model(const std::string& text, std::vector<std::string>* warnings) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("multi-model JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw ParseError("multi-model document must be a JSON object");

    static const std::set<std::string> known = {"fmus", "connections", "parameters", "modelSwaps",
                                                "modelTransfers"};
    for (const auto& [key, _] : doc.items()) {
        if (known.count(key) == 0 && warnings)
            warnings->push_back("unknown top-level key '" + key + "' ignored");
    }

    MultiModelConfig cfg;

    if (doc.contains("fmus")) {
        if (!doc.at("fmus").is_object()) throw ParseError("'fmus' must be an object");
        for (const auto& [key, value] : doc.at("fmus").items()) {
            if (!value.is_string()) throw ParseError("fmus entry " + key + " must be a string");
            cfg.units[strip_braces(key, "fmus")] = value.get<std::string>();
        }
    }

    std::set<std::string> seen_sinks;
    if (doc.contains("connections"))
        cfg.connections = parse_connection_block(doc.at("connections"), "connections", seen_sinks);

    if (doc.contains("parameters")) {
        if (!doc.at("parameters").is_object()) throw ParseError("'parameters' must be an object");
        for (const auto& [port_text, value] : doc.at("parameters").items())
            cfg.parameters[parse_port_id(port_text)] = value_from_json(value, port_text);
    }

    if (doc.contains("modelSwaps")) {
        if (!doc.at("modelSwaps").is_object()) throw ParseError("'modelSwaps' must be an object");
        for (const auto& [replaced, entry] : doc.at("modelSwaps").items()) {
            std::string context = "modelSwaps." + replaced;
            if (!entry.is_object()) throw ParseError(context + " must be an object");
            SwapEntry swap;
            if (!entry.contains("swapInstance") || !entry.at("swapInstance").is_string())
                throw ParseError(context + ": missing swapInstance");
            swap.swap_instance = entry.at("swapInstance").get<std::string>();
            swap.step_condition = parse_entry_condition(entry, "stepCondition", context);
            swap.swap_condition = parse_entry_condition(entry, "swapCondition", context);
            if (entry.contains("swapConnections")) {
                std::set<std::string> entry_sinks;
                swap.swap_connections = parse_connection_block(entry.at("swapConnections"),
                                                               context + ".swapConnections",
                                                               entry_sinks);
            }
            cfg.model_swaps[replaced] = std::move(swap);
        }
    }

    if (doc.contains("modelTransfers")) {
        if (!doc.at("modelTransfers").is_object())
            throw ParseError("'modelTransfers' must be an object");
        for (const auto& [old_name, new_name] : doc.at("modelTransfers").items()) {
            if (!new_name.is_string())
                throw ParseError("modelTransfers." + old_name + " must be a string");
            cfg.model_transfers[old_name] = new_name.get<std::string>();
        }
    }

    // A replaced instance is typically transferred (it keeps running until
    // its swap condition fires), but the replacement itself always starts
    // from scratch: it can never be carried over.
    for (const auto& [old_name, new_name] : cfg.model_transfers) {
        for (const auto& [target, entry] : cfg.model_swaps) {
            if (entry.swap_instance == old_name || entry.swap_instance == new_name)
                throw ParseError("swap instance '" + entry.swap_instance + "' (replacing " +
                                 target + ") cannot also be transferred");
        }
    }

    cfg.rebuild_bindings();

    for (const auto& [replaced, entry] : cfg.model_swaps) {
        if (!cfg.has_instance(entry.swap_instance))
            throw ParseError("modelSwaps." + replaced + ": swapInstance '" + entry.swap_instance +
                             "' is not a declared instance");
    }

    return cfg;
}

std::string serialize_multi_model(const MultiModelConfig& cfg, int indent) {
    json doc = json::object();
    json fmus = json::object();
    for (const auto& [key, value] : cfg.units) fmus["{" + key + "}"] = value;
    doc["fmus"] = std::move(fmus);

    auto connections_json = [](const std::map<PortId, std::vector<PortId>>& block) {
        json out = json::object();
        for (const auto& [source, sinks] : block) {
            json arr = json::array();
            for (const auto& sink : sinks) arr.push_back(sink.str());
            out[source.str()] = std::move(arr);
        }
        return out;
    };
    doc["connections"] = connections_json(cfg.connections);

    json params = json::object();
    for (const auto& [port, value] : cfg.parameters) params[port.str()] = value_to_json(value);
    doc["parameters"] = std::move(params);

    if (!cfg.model_swaps.empty()) {
        json swaps = json::object();
        for (const auto& [replaced, entry] : cfg.model_swaps) {
            json e = json::object();
            e["swapInstance"] = entry.swap_instance;
            e["stepCondition"] = entry.step_condition.source();
            e["swapCondition"] = entry.swap_condition.source();
            e["swapConnections"] = connections_json(entry.swap_connections);
            swaps[replaced] = std::move(e);
        }
        doc["modelSwaps"] = std::move(swaps);
    }
    if (!cfg.model_transfers.empty()) {
        json transfers = json::object();
        for (const auto& [old_name, new_name] : cfg.model_transfers) transfers[old_name] = new_name;
        doc["modelTransfers"] = std::move(transfers);
    }
    return doc.dump(indent);
}

namespace {

void check_port(const MultiModelConfig& cfg, const ModelRegistry& registry, const PortId& port,
                Causality expected, ValidationReport& report) {
    auto key_it = cfg.key_to_instance.find(port.instance_key);
    if (key_it == cfg.key_to_instance.end()) return; // bindings already vetted at parse
    std::string model = model_name_from_unit_value(cfg.units.at(port.instance_key));
    const ModelDescription* desc = registry.describe(model);
    if (!desc) return; // model existence reported separately
    const VariableInfo* info = desc->find(port.variable);
    if (!info) {
        report.add(Severity::Error,
                   "unknown variable " + port.instance_name + "." + port.variable + " on model " +
                       model);
        return;
    }
    if (expected == Causality::Output && info->causality != Causality::Output)
        report.add(Severity::Error, "connection source " + port.str() + " is not an output");
    if (expected == Causality::Input && info->causality != Causality::Input)
        report.add(Severity::Error, "connection sink " + port.str() + " is not an input");
}

void check_condition(const MultiModelConfig& cfg, const ModelRegistry& registry,
                     const ConditionExpr& cond, const std::string& context,
                     ValidationReport& report) {
    for (const auto& ref : cond.referenced_variables()) {
        auto dot = ref.find('.');
        std::string instance = ref.substr(0, dot);
        std::string variable = ref.substr(dot + 1);
        if (instance == "sim" && variable == "time") continue; // engine-provided binding
        auto it = cfg.instance_to_key.find(instance);
        if (it == cfg.instance_to_key.end()) {
            report.add(Severity::Error, context + ": unbound variable " + ref);
            continue;
        }
        std::string model = model_name_from_unit_value(cfg.units.at(it->second));
        const ModelDescription* desc = registry.describe(model);
        if (desc && !desc->find(variable))
            report.add(Severity::Error,
                       context + ": unknown variable " + ref + " on model " + model);
    }
}

} // namespace

ValidationReport validate_config(const MultiModelConfig& cfg, const ModelRegistry& registry) {
    ValidationReport report;

    for (const auto& [key, value] : cfg.units) {
        std::string model = model_name_from_unit_value(value);
        if (!registry.has(model))
            report.add(Severity::Error, "unknown model " + model + " (unit {" + key + "})");
        if (cfg.key_to_instance.count(key) == 0)
            report.add(Severity::Note,
                       "unit {" + key + "} is never referenced by a port and will not run");
    }

    for (const auto& [source, sinks] : cfg.connections) {
        check_port(cfg, registry, source, Causality::Output, report);
        for (const auto& sink : sinks) check_port(cfg, registry, sink, Causality::Input, report);
    }

    for (const auto& [port, value] : cfg.parameters) {
        auto key_it = cfg.key_to_instance.find(port.instance_key);
        if (key_it == cfg.key_to_instance.end()) continue;
        std::string model = model_name_from_unit_value(cfg.units.at(port.instance_key));
        const ModelDescription* desc = registry.describe(model);
        if (!desc) continue;
        const VariableInfo* info = desc->find(port.variable);
        if (!info) {
            report.add(Severity::Error,
                       "unknown variable " + port.instance_name + "." + port.variable +
                           " on model " + model);
            continue;
        }
        try {
            (void)value.coerced_to(info->type, port.str());
        } catch (const TypeError& e) {
            report.add(Severity::Error, e.what());
        }
    }

    for (const auto& [replaced, entry] : cfg.model_swaps) {
        std::string context = "modelSwaps." + replaced;
        if (!cfg.has_instance(replaced))
            report.add(Severity::Error, context + ": replaced instance is not declared");
        check_condition(cfg, registry, entry.step_condition, context + ".stepCondition", report);
        check_condition(cfg, registry, entry.swap_condition, context + ".swapCondition", report);
        for (const auto& [source, sinks] : entry.swap_connections) {
            check_port(cfg, registry, source, Causality::Output, report);
            for (const auto& sink : sinks)
                check_port(cfg, registry, sink, Causality::Input, report);
        }
        const std::string& step_text = entry.step_condition.source();
        const std::string& swap_text = entry.swap_condition.source();
        if (step_text != swap_text && step_text != "(true)" && swap_text != "(true)")
            report.add(Severity::Note,
                       context + ": step and swap conditions differ; the engine assumes the swap "
                                 "condition implies the step condition at run time");
    }

    return report;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& d : diagnostics) {
        switch (d.severity) {
        case Severity::Error: out << "error: "; break;
        case Severity::Warning: out << "warning: "; break;
        case Severity::Note: out << "note: "; break;
        }
        out << d.message << "\n";
    }
    return out.str();
}

} // namespace coswap
