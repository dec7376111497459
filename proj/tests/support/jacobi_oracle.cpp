#include "support/jacobi_oracle.hpp"

#include <algorithm>
#include <map>

#include "coswap/builtin_units.hpp"
#include "coswap/step_log.hpp"

namespace coswap::testing {

std::string jacobi_oracle_csv(const GeneratedConfig& generated, const EngineSettings& settings) {
    const MultiModelConfig& cfg = generated.config;
    ModelRegistry registry = builtin_registry();

    std::vector<std::string> order;
    for (const auto& name : generated.unit_order)
        if (cfg.has_instance(name)) order.push_back(name);

    std::map<std::string, UnitPtr> units;
    for (const auto& name : order)
        units[name] = registry.instantiate(cfg.model_of(name), name, UnitContext{});

    for (const auto& [port, value] : cfg.parameters)
        units.at(port.instance_name)->set_var(port.variable, value);

    // sink -> source
    std::map<PortId, PortId> source_of;
    for (const auto& [source, sinks] : cfg.connections)
        for (const auto& sink : sinks) source_of.emplace(sink, source);

    std::map<std::string, Value> values; // "instance.variable" -> last output

    auto read_outputs = [&](const std::string& name) {
        const SimulationUnit& unit = *units.at(name);
        for (const auto& v : unit.description().variables)
            if (v.causality == Causality::Output)
                values[name + "." + v.name] = unit.get_var(v.name);
    };

    // Initialization in generation order; forward-only wiring means every
    // source is initialized before its sinks.
    for (const auto& name : order) {
        SimulationUnit& unit = *units.at(name);
        unit.enter_initialization();
        auto key = cfg.instance_to_key.at(name);
        for (const auto& v : unit.description().variables) {
            if (v.causality != Causality::Input) continue;
            auto src = source_of.find(PortId{key, name, v.name});
            if (src == source_of.end()) continue;
            auto val = values.find(src->second.scope_key());
            if (val != values.end())
                unit.set_var(v.name, val->second.coerced_to(v.type, v.name));
        }
        unit.exit_initialization();
        read_outputs(name);
    }

    std::vector<PortId> columns;
    for (const auto& [source, _] : cfg.connections) columns.push_back(source);
    std::sort(columns.begin(), columns.end());

    std::vector<std::string> column_names;
    for (const auto& c : columns) column_names.push_back(c.str());
    std::string csv = render_csv_header(column_names);

    long total = std::lround((settings.end_time - settings.start_time) / settings.step_size);
    for (long k = 0; k < total; ++k) {
        double t = settings.start_time + static_cast<double>(k) * settings.step_size;

        // set all
        for (const auto& [source, sinks] : cfg.connections) {
            for (const auto& sink : sinks) {
                const VariableInfo* info =
                    units.at(sink.instance_name)->description().find(sink.variable);
                units.at(sink.instance_name)
                    ->set_var(sink.variable,
                              values.at(source.scope_key()).coerced_to(info->type, sink.str()));
            }
        }
        // step all
        for (const auto& name : order) units.at(name)->do_step(t, settings.step_size);
        // get all
        for (const auto& name : order) read_outputs(name);

        StepLog row;
        row.time = settings.start_time + static_cast<double>(k + 1) * settings.step_size;
        for (const auto& c : columns) row.values.emplace_back(values.at(c.scope_key()));
        csv += render_csv_row(row);
    }
    return csv;
}

} // namespace coswap::testing
