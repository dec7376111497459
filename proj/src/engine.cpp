#include "coswap/engine.hpp"

#include <algorithm>
#include <cmath>

#include "coswap/errors.hpp"

namespace coswap {

namespace {

const std::string kSimTime = "sim.time";

std::string step_latch_column(const std::string& target) { return "stepCondition." + target; }
std::string swap_latch_column(const std::string& target) { return "swapCondition." + target; }

} // namespace

SwapEngine::SwapEngine(MultiModelConfig config, ModelRegistry registry, EngineSettings settings,
                       UnitContext unit_context, std::vector<FaultRule> fault_rules)
    : config_(std::move(config)), registry_(std::move(registry)), settings_(settings),
      unit_context_(std::move(unit_context)), fault_rules_(std::move(fault_rules)) {
    if (!(settings_.step_size > 0.0)) throw EngineError("step size must be positive");
    if (settings_.end_time < settings_.start_time)
        throw EngineError("end time precedes start time");
    if (settings_.check_every_n_steps < 1)
        throw EngineError("check_every_n_steps must be at least 1");
    config_.rebuild_bindings();
}

void SwapEngine::predeclare_columns(const std::vector<std::string>& columns) {
    predeclared_.insert(columns.begin(), columns.end());
}

const SimulationUnit* SwapEngine::find_unit(const std::string& instance) const {
    auto it = units_.find(instance);
    return it == units_.end() ? nullptr : it->second.get();
}

double SwapEngine::offset_of(const std::string& swap_instance) const {
    auto it = offsets_.find(swap_instance);
    return it == offsets_.end() ? 0.0 : it->second;
}

SwapEngine::SwapState* SwapEngine::find_swap_state(const std::string& target) {
    for (auto& sw : swaps_)
        if (sw.target == target) return &sw;
    return nullptr;
}

const SwapEngine::SwapState* SwapEngine::find_swap_state(const std::string& target) const {
    for (const auto& sw : swaps_)
        if (sw.target == target) return &sw;
    return nullptr;
}

bool SwapEngine::step_latched(const std::string& target) const {
    const SwapState* sw = find_swap_state(target);
    return sw && sw->step.latched;
}

bool SwapEngine::swap_latched(const std::string& target) const {
    const SwapState* sw = find_swap_state(target);
    return sw && sw->swap.latched;
}

void SwapEngine::advance_environments() {
    for (auto& env : environments_) env->advance_to(global_time());
}

void SwapEngine::seed_outputs_into_scope(const std::string& instance) {
    const SimulationUnit* unit = find_unit(instance);
    if (!unit || unit->phase() != UnitPhase::Initialized) return;
    for (const auto& v : unit->description().variables) {
        if (v.causality == Causality::Output)
            scope_[instance + "." + v.name] = unit->get_var(v.name);
    }
}

void SwapEngine::instantiate_all(const std::vector<std::string>& fresh,
                                 const MultiModelConfig& cfg) {
    for (const auto& name : fresh) {
        UnitPtr unit = registry_.instantiate(cfg.model_of(name), name, unit_context_);
        unit = apply_fault_rules(std::move(unit), fault_rules_);
        units_[name] = std::move(unit);
        swapped_out_.erase(name); // a reused name starts a new life
    }
}

void SwapEngine::apply_parameters(const MultiModelConfig& cfg, const std::set<std::string>& only,
                                  std::vector<std::string>* skipped_notes) {
    for (const auto& [port, value] : cfg.parameters) {
        if (only.count(port.instance_name) == 0) {
            if (skipped_notes)
                skipped_notes->push_back("parameters for transferred instance " +
                                         port.instance_name + " are ignored");
            continue;
        }
        units_.at(port.instance_name)->set_var(port.variable, value);
    }
}

void SwapEngine::initialize_fresh(const std::vector<std::string>& fresh,
                                  const DependencyGraph& graph) {
    std::set<std::string> fresh_set(fresh.begin(), fresh.end());

    std::vector<PortId> order;
    LoopError loop;
    if (!initialization_order(graph, order, loop)) throw EngineError(loop.message());

    // sink -> source over base and swap connections
    std::map<PortId, PortId> source_of;
    auto record = [&](const std::map<PortId, std::vector<PortId>>& block) {
        for (const auto& [source, sinks] : block)
            for (const auto& sink : sinks) source_of.emplace(sink, source);
    };
    record(config_.connections);
    for (const auto& [_, entry] : config_.model_swaps) record(entry.swap_connections);

    for (const auto& name : fresh) units_.at(name)->enter_initialization();

    for (const auto& port : order) {
        if (fresh_set.count(port.instance_name) == 0) continue;
        SimulationUnit& unit = *units_.at(port.instance_name);
        const VariableInfo* info = unit.description().find(port.variable);
        if (!info) continue; // validation reports unknown variables
        if (info->causality == Causality::Output) {
            if (unit.phase() == UnitPhase::Initializing) unit.exit_initialization();
            scope_[port.scope_key()] = unit.get_var(port.variable);
        } else if (info->causality == Causality::Input) {
            auto src = source_of.find(port);
            if (src == source_of.end()) continue;
            auto value = scope_.find(src->second.scope_key());
            if (value == scope_.end()) continue; // source not seeded yet (pruned context)
            unit.set_var(port.variable, value->second.coerced_to(info->type, port.str()));
        }
    }

    for (const auto& name : fresh) {
        SimulationUnit& unit = *units_.at(name);
        if (unit.phase() == UnitPhase::Initializing) unit.exit_initialization();
        seed_outputs_into_scope(name);
    }
}

void SwapEngine::rebuild_wiring() {
    std::map<PortId, SinkBinding> by_sink;
    for (const auto& [source, sinks] : config_.connections) {
        for (const auto& sink : sinks) {
            SinkBinding& b = by_sink[sink];
            b.sink = sink;
            b.base_source = source;
        }
    }
    for (const auto& [target, entry] : config_.model_swaps) {
        for (const auto& [source, sinks] : entry.swap_connections) {
            for (const auto& sink : sinks) {
                SinkBinding& b = by_sink[sink];
                b.sink = sink;
                b.swap_source = source;
                b.swap_target = target;
            }
        }
    }
    for (auto& [sink, b] : by_sink) {
        for (const auto& sw : swaps_) {
            if (sink.instance_name == sw.swap_instance) {
                b.sink_step_target = sw.target;
                break;
            }
        }
    }
    bindings_.clear();
    for (auto& [_, b] : by_sink) bindings_.push_back(std::move(b));

    faulted_input_ports_.clear();
    for (const auto& rule : fault_rules_) {
        if (rule.direction != FaultDirection::Input) continue;
        auto key = config_.instance_to_key.find(rule.instance);
        if (key == config_.instance_to_key.end()) continue;
        faulted_input_ports_.push_back(
            PortId{key->second, rule.instance, rule.variable}.str());
    }
}

std::vector<std::string> log_columns_for(const MultiModelConfig& cfg,
                                         const std::vector<FaultRule>& fault_rules) {
    std::set<std::string> cols;
    auto add_sources = [&](const std::map<PortId, std::vector<PortId>>& block) {
        for (const auto& [source, _] : block) cols.insert(source.str());
    };
    add_sources(cfg.connections);
    for (const auto& [target, entry] : cfg.model_swaps) {
        add_sources(entry.swap_connections);
        cols.insert(step_latch_column(target));
        cols.insert(swap_latch_column(target));
    }
    for (const auto& rule : fault_rules) {
        if (rule.direction != FaultDirection::Input) continue;
        auto key = cfg.instance_to_key.find(rule.instance);
        if (key == cfg.instance_to_key.end()) continue;
        cols.insert(PortId{key->second, rule.instance, rule.variable}.str());
    }
    return {cols.begin(), cols.end()};
}

void SwapEngine::rebuild_columns() {
    std::set<std::string> cols(predeclared_.begin(), predeclared_.end());
    for (const auto& col : log_columns_for(config_, fault_rules_)) cols.insert(col);

    std::vector<std::string> next(cols.begin(), cols.end());
    if (next != columns_) {
        columns_ = std::move(next);
        if (columns_announced_ && active_sink_) active_sink_->on_columns(columns_);
    }
}

void SwapEngine::initialize() {
    if (initialized_) throw EngineError("engine already initialized");

    ValidationReport report = validate_config(config_, registry_);
    if (!report.ok()) throw EngineError("invalid configuration:\n" + report.to_string());

    advance_environments();
    scope_[kSimTime] = Value(global_time());

    swaps_.clear();
    for (const auto& [target, entry] : config_.model_swaps) {
        SwapState sw;
        sw.target = target;
        sw.swap_instance = entry.swap_instance;
        sw.step.expr = entry.step_condition;
        sw.swap.expr = entry.swap_condition;
        swaps_.push_back(std::move(sw));
        offsets_[entry.swap_instance] = 0.0;
    }

    std::vector<std::string> all = config_.instance_names();
    instantiate_all(all, config_);
    apply_parameters(config_, {all.begin(), all.end()}, nullptr);
    initialize_fresh(all, build_port_graph(config_, registry_));

    rebuild_wiring();
    rebuild_columns();
    initialized_ = true;
}

bool SwapEngine::done() const {
    return global_time() + settings_.step_size > settings_.end_time + 0.5 * settings_.step_size;
}

void SwapEngine::update_latches() {
    for (auto& sw : swaps_) {
        bool swap_was = sw.swap.latched;
        bool step_was = sw.step.latched;
        sw.swap.update(scope_); // Fig-3 order: swap condition first
        sw.step.update(scope_);
        if (sw.swap.latched && !sw.step.latched)
            throw EngineError("swap condition for " + sw.target +
                              " latched while its step condition is still false");
        if (!step_was && sw.step.latched)
            stats_.latch_events.push_back({sw.target, "step", iteration_, global_time()});
        if (!swap_was && sw.swap.latched) {
            stats_.latch_events.push_back({sw.target, "swap", iteration_, global_time()});
            // The replaced instance is done: terminate and retire it.
            auto it = units_.find(sw.target);
            if (it != units_.end() && it->second->phase() == UnitPhase::Initialized)
                it->second->terminate();
            swapped_out_.insert(sw.target);
        }
    }
}

void SwapEngine::set_inputs() {
    stats_.sets_this_iteration.clear();
    for (const auto& b : bindings_) {
        if (swapped_out_.count(b.sink.instance_name)) continue;
        auto unit_it = units_.find(b.sink.instance_name);
        if (unit_it == units_.end()) continue;

        std::optional<PortId> source;
        if (!b.sink_step_target.empty()) {
            // Input of a swap instance: only once its step latch holds.
            if (!step_latched(b.sink_step_target)) continue;
            source = b.swap_source ? b.swap_source : b.base_source;
        } else if (b.base_source && b.swap_source) {
            source = swap_latched(b.swap_target) ? b.swap_source : b.base_source;
        } else if (b.base_source) {
            if (swapped_out_.count(b.base_source->instance_name)) continue;
            source = b.base_source;
        } else if (b.swap_source) {
            if (!swap_latched(b.swap_target)) continue;
            source = b.swap_source;
        }
        if (!source) continue;

        auto value = scope_.find(source->scope_key());
        if (value == scope_.end())
            throw EngineError("no value for connection source " + source->str());
        const VariableInfo* info = unit_it->second->description().find(b.sink.variable);
        if (!info)
            throw EngineError("unknown connection sink " + b.sink.str());
        unit_it->second->set_var(b.sink.variable,
                                 value->second.coerced_to(info->type, b.sink.str()));

        long& writes = stats_.sets_this_iteration[b.sink.str()];
        if (++writes > 1)
            throw EngineError("input " + b.sink.str() + " written twice in one iteration");
    }
}

void SwapEngine::step_units() {
    double t = global_time();
    double dt = settings_.step_size;
    std::set<std::string> stepped;

    for (auto& [name, unit] : units_) {
        if (swapped_out_.count(name)) continue;

        const SwapState* as_target = find_swap_state(name);
        const SwapState* as_swap_instance = nullptr;
        for (const auto& sw : swaps_)
            if (sw.swap_instance == name) { as_swap_instance = &sw; break; }

        if (as_target && as_target->swap.latched) continue; // replaced: never steps again
        double communication_point = t;
        if (as_swap_instance) {
            if (!as_swap_instance->step.latched) continue; // waits for its step condition
            communication_point = offsets_[name];
        }

        unit->do_step(communication_point, dt);
        ++stats_.do_step_counts[name];
        stepped.insert(name);
        if (as_swap_instance) offsets_[name] += dt;
    }

    collect_outputs(stepped);
}

void SwapEngine::collect_outputs(const std::set<std::string>& stepped) {
    for (const auto& name : stepped) seed_outputs_into_scope(name);
}

StepLog SwapEngine::make_log_row(double row_time) const {
    StepLog row;
    row.time = row_time;
    row.values.reserve(columns_.size());
    for (const auto& column : columns_) {
        std::optional<Value> cell;
        if (column.rfind("stepCondition.", 0) == 0) {
            const SwapState* sw = find_swap_state(column.substr(14));
            if (sw) cell = Value(sw->step.latched);
        } else if (column.rfind("swapCondition.", 0) == 0) {
            const SwapState* sw = find_swap_state(column.substr(14));
            if (sw) cell = Value(sw->swap.latched);
        } else if (!column.empty() && column.front() == '{') {
            PortId port = parse_port_id(column);
            bool faulted = std::find(faulted_input_ports_.begin(), faulted_input_ports_.end(),
                                     column) != faulted_input_ports_.end();
            if (faulted) {
                // Log what the wrapped unit actually saw (injected values).
                if (const auto* injector =
                        dynamic_cast<const FaultInjector*>(find_unit(port.instance_name))) {
                    if (const Value* delivered = injector->last_delivered(port.variable))
                        cell = *delivered;
                }
            } else {
                auto it = scope_.find(port.scope_key());
                if (it != scope_.end()) cell = it->second;
            }
        }
        row.values.push_back(std::move(cell));
    }
    return row;
}

StepLog SwapEngine::execute_step() {
    if (!initialized_) throw EngineError("execute_step before initialize");
    if (done()) throw EngineError("execute_step past the end time");

    advance_environments();
    scope_[kSimTime] = Value(global_time());

    if (auto plan = check_transfer_point()) apply_transfer(*plan);

    update_latches();
    set_inputs();
    step_units();

    ++iteration_;
    stats_.iterations = iteration_;
    StepLog row = make_log_row(global_time());
    if (observer_) observer_(*this);
    return row;
}

std::optional<SwapPlan> SwapEngine::check_transfer_point() {
    if (!transfer_source_) return std::nullopt;
    if (iteration_ < settings_.min_steps_before_transfer) return std::nullopt;
    if (iteration_ % settings_.check_every_n_steps != 0) return std::nullopt;

    auto pending = transfer_source_->poll(iteration_, global_time());
    if (!pending) return std::nullopt;

    std::vector<std::string> warnings;
    MultiModelConfig new_config;
    try {
        new_config = parse_multi_model(pending->text, &warnings);
    } catch (const ParseError& e) {
        std::string diag = std::string("parse error: ") + e.what();
        transfer_source_->consumed(*pending, false, diag);
        stats_.transfer_events.push_back({iteration_, global_time(), pending->id, false, diag});
        return std::nullopt;
    }

    SwapPlan plan;
    ValidationReport report = validate_swap_spec(new_config, &plan);
    plan.notes.insert(plan.notes.end(), warnings.begin(), warnings.end());
    if (!report.ok()) {
        transfer_source_->consumed(*pending, false, report.to_string());
        stats_.transfer_events.push_back(
            {iteration_, global_time(), pending->id, false, report.to_string()});
        return std::nullopt;
    }

    transfer_source_->consumed(*pending, true, report.to_string());
    stats_.transfer_events.push_back(
        {iteration_, global_time(), pending->id, true, report.to_string()});
    return plan;
}

ValidationReport SwapEngine::validate_swap_spec(const MultiModelConfig& new_config,
                                                SwapPlan* plan_out) const {
    ValidationReport report;
    SwapPlan plan;
    plan.new_config = new_config;
    plan.new_config.rebuild_bindings();
    plan.transfers = new_config.model_transfers;

    // Static structure (models, ports, parameter types); condition references
    // get the live-scope fallback below.
    ValidationReport static_report = validate_config(new_config, registry_);
    for (auto& d : static_report.diagnostics) {
        if (d.message.find("unbound variable") != std::string::npos) continue;
        report.diagnostics.push_back(d);
    }

    std::set<std::string> transferred_new_names;
    for (const auto& [old_name, new_name] : new_config.model_transfers) {
        transferred_new_names.insert(new_name);
        auto it = units_.find(old_name);
        if (it == units_.end() || swapped_out_.count(old_name)) {
            report.add(Severity::Error, "unknown transfer instance " + old_name);
            continue;
        }
        if (!new_config.has_instance(new_name)) {
            report.add(Severity::Error,
                       "transferred instance " + new_name + " is not referenced by the new model");
            continue;
        }
        if (new_config.model_of(new_name) != it->second->description().model_name)
            report.add(Severity::Error, "transfer " + old_name + " -> " + new_name +
                                            " changes the model; transfers preserve state");
    }

    for (const auto& name : plan.new_config.instance_names()) {
        if (transferred_new_names.count(name)) continue;
        plan.fresh_instances.push_back(name);
        if (units_.count(name) && !swapped_out_.count(name))
            report.add(Severity::Error, "fresh instance " + name +
                                            " collides with a live instance; transfer it instead");
    }

    // Conditions may reference the new wiring or anything still in scope
    // (including retired instances' frozen values).
    for (const auto& [target, entry] : new_config.model_swaps) {
        auto check = [&](const ConditionExpr& cond, const std::string& which) {
            for (const auto& ref : cond.referenced_variables()) {
                if (ref == kSimTime) continue;
                std::string instance = ref.substr(0, ref.find('.'));
                if (new_config.has_instance(instance)) continue;
                if (scope_.count(ref)) continue;
                report.add(Severity::Error,
                           "modelSwaps." + target + "." + which + ": unbound variable " + ref);
            }
        };
        check(entry.step_condition, "stepCondition");
        check(entry.swap_condition, "swapCondition");
    }

    for (const auto& [port, _] : new_config.parameters) {
        if (transferred_new_names.count(port.instance_name)) {
            std::string note =
                "parameters for transferred instance " + port.instance_name + " are ignored";
            report.add(Severity::Warning, note);
            plan.notes.push_back(note);
        }
    }

    // The new wiring must still initialize: prune edges into transferred
    // instances and require an acyclic remainder.
    if (report.ok()) {
        DependencyGraph graph = build_port_graph(plan.new_config, registry_);
        graph = prune_transfer_edges(std::move(graph), transferred_new_names);
        std::vector<PortId> order;
        LoopError loop;
        if (!initialization_order(graph, order, loop)) report.add(Severity::Error, loop.message());
    }

    // Dry-instantiate every fresh unit in a sandbox; a failing spec must
    // never perturb the live simulation, so shared feeds are cloned.
    if (report.ok()) {
        UnitContext sandbox = unit_context_;
        if (sandbox.feed) sandbox.feed = std::make_shared<BrokerFeed>(*sandbox.feed);
        for (const auto& name : plan.fresh_instances) {
            try {
                UnitPtr probe =
                    registry_.instantiate(plan.new_config.model_of(name), name, sandbox);
                for (const auto& [port, value] : plan.new_config.parameters) {
                    if (port.instance_name == name) probe->set_var(port.variable, value);
                }
                probe->enter_initialization();
                probe->exit_initialization();
            } catch (const Error& e) {
                report.add(Severity::Error,
                           "dry-run of fresh instance " + name + " failed: " + e.what());
            }
        }
    }

    if (plan_out && report.ok()) *plan_out = std::move(plan);
    return report;
}

void SwapEngine::apply_transfer(const SwapPlan& plan) {
    // Move transferred units into the new context, renaming where asked;
    // their state, including unit-local time, carries over untouched.
    std::map<std::string, UnitPtr> next_units;
    for (const auto& [old_name, new_name] : plan.transfers) {
        auto it = units_.find(old_name);
        if (it == units_.end()) throw EngineError("transfer source vanished: " + old_name);
        UnitPtr unit = std::move(it->second);
        units_.erase(it);
        if (old_name != new_name) {
            unit->rename(new_name);
            // Alias the frozen values under the new name; conditions may
            // still refer to the old one.
            for (const auto& v : unit->description().variables) {
                auto sv = scope_.find(old_name + "." + v.name);
                if (sv != scope_.end()) scope_[new_name + "." + v.name] = sv->second;
            }
            auto count = stats_.do_step_counts.find(old_name);
            if (count != stats_.do_step_counts.end()) {
                stats_.do_step_counts[new_name] += count->second;
                stats_.do_step_counts.erase(count);
            }
        }
        next_units[new_name] = std::move(unit);
    }

    // Anything not transferred stays behind in the old context.
    for (auto& [name, unit] : units_) {
        if (unit && unit->phase() == UnitPhase::Initialized) unit->terminate();
    }
    units_ = std::move(next_units);

    config_ = plan.new_config;
    config_.rebuild_bindings();

    // Rebuild swap bookkeeping; latches persist across the transfer for
    // entries that survive verbatim, everything else starts fresh.
    std::vector<SwapState> previous = std::move(swaps_);
    swaps_.clear();
    std::map<std::string, double> previous_offsets = std::move(offsets_);
    offsets_.clear();
    for (const auto& [target, entry] : config_.model_swaps) {
        SwapState sw;
        sw.target = target;
        sw.swap_instance = entry.swap_instance;
        sw.step.expr = entry.step_condition;
        sw.swap.expr = entry.swap_condition;
        for (const auto& old : previous) {
            if (old.target == target && old.swap_instance == entry.swap_instance &&
                old.step.expr.source() == entry.step_condition.source() &&
                old.swap.expr.source() == entry.swap_condition.source()) {
                sw.step.latched = old.step.latched;
                sw.swap.latched = old.swap.latched;
                if (auto it = previous_offsets.find(entry.swap_instance);
                    it != previous_offsets.end())
                    offsets_[entry.swap_instance] = it->second;
            }
        }
        offsets_.try_emplace(entry.swap_instance, 0.0);
        swaps_.push_back(std::move(sw));
    }

    instantiate_all(plan.fresh_instances, config_);
    std::set<std::string> fresh_set(plan.fresh_instances.begin(), plan.fresh_instances.end());
    apply_parameters(config_, fresh_set, nullptr);

    std::set<std::string> transferred;
    for (const auto& [_, new_name] : plan.transfers) transferred.insert(new_name);
    DependencyGraph graph = build_port_graph(config_, registry_);
    graph = prune_transfer_edges(std::move(graph), transferred);
    initialize_fresh(plan.fresh_instances, graph);

    rebuild_wiring();
    rebuild_columns();
}

void SwapEngine::run(StepLogSink& sink) {
    if (!initialized_) initialize();
    active_sink_ = &sink;
    sink.on_columns(columns_);
    columns_announced_ = true;
    while (!done()) sink.on_row(execute_step());
    active_sink_ = nullptr;
    columns_announced_ = false;
}

void run_simulation(MultiModelConfig config, ModelRegistry registry, EngineSettings settings,
                    StepLogSink& sink, UnitContext unit_context,
                    std::vector<FaultRule> fault_rules, TransferSource* transfer_source) {
    SwapEngine engine(std::move(config), std::move(registry), settings, std::move(unit_context),
                      std::move(fault_rules));
    engine.set_transfer_source(transfer_source);
    engine.run(sink);
}

} // namespace coswap
