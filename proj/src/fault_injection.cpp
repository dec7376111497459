#include "coswap/fault_injection.hpp"

#include <algorithm>

#include <json.hpp>

#include "coswap/errors.hpp"

namespace coswap {

FaultInjector::FaultInjector(UnitPtr target, std::vector<FaultRule> rules)
    : target_(std::move(target)) {
    for (auto& rule : rules) {
        const VariableInfo* info = target_->description().find(rule.variable);
        if (!info)
            throw Error("fault rule: unknown variable " + rule.instance + "." + rule.variable);
        bool is_input = info->causality == Causality::Input;
        if (rule.direction == FaultDirection::Input && !is_input)
            throw Error("fault rule: " + rule.variable + " is not an input of " + rule.instance);
        if (rule.direction == FaultDirection::Output && info->causality != Causality::Output)
            throw Error("fault rule: " + rule.variable + " is not an output of " + rule.instance);
        rules_.push_back({std::move(rule), false, 0});
    }
}

void FaultInjector::set_var(const std::string& name, const Value& value) {
    const VariableInfo* info = target_->description().find(name);
    if (info && info->causality == Causality::Input) {
        commanded_[name] = value;
        delivered_[name] = value;
    }
    target_->set_var(name, value);
}

Value FaultInjector::get_var(const std::string& name) const {
    Value v = target_->get_var(name);
    for (const auto& rs : rules_) {
        if (rs.rule.direction == FaultDirection::Output && rs.rule.variable == name && rs.active) {
            if (rs.rule.transform.kind == FaultTransform::Kind::Constant)
                return rs.rule.transform.constant_value.coerced_to(v.type(), name);
            return Value(rs.alternation % 2 == 1 ? 1.0 : 0.0).coerced_to(v.type(), name);
        }
    }
    return v;
}

Scope FaultInjector::trigger_scope(double current_time) const {
    Scope scope;
    const std::string& inst = target_->instance_name();
    for (const auto& v : target_->description().variables) {
        if (v.causality == Causality::Input) {
            auto it = commanded_.find(v.name);
            if (it != commanded_.end()) scope[inst + "." + v.name] = it->second;
            else if (v.start) scope[inst + "." + v.name] = *v.start;
        } else if (target_->phase() == UnitPhase::Initialized) {
            scope[inst + "." + v.name] = target_->get_var(v.name);
        }
    }
    scope["sim.time"] = Value(current_time);
    return scope;
}

Value FaultInjector::transformed(RuleState& rs, const Value& commanded) {
    ++rs.alternation;
    if (rs.rule.transform.kind == FaultTransform::Kind::Constant)
        return rs.rule.transform.constant_value.coerced_to(commanded.type(), rs.rule.variable);
    return Value(rs.alternation % 2 == 1 ? 1.0 : 0.0).coerced_to(commanded.type(), rs.rule.variable);
}

void FaultInjector::do_step(double current_time, double step_size) {
    Scope scope = trigger_scope(current_time);
    for (auto& rs : rules_) {
        rs.active = rs.rule.trigger.evaluate(scope);
        if (!rs.active) continue;
        if (rs.rule.direction == FaultDirection::Input) {
            auto it = commanded_.find(rs.rule.variable);
            Value commanded = it != commanded_.end()
                                  ? it->second
                                  : *target_->description().find(rs.rule.variable)->start;
            Value injected = transformed(rs, commanded);
            target_->set_var(rs.rule.variable, injected);
            delivered_[rs.rule.variable] = injected;
        } else {
            ++rs.alternation; // output alternation advances per active step
        }
    }
    target_->do_step(current_time, step_size);
    // Alternation for output rules counted once above; for constant output
    // rules the counter is unused.
}

const Value* FaultInjector::last_delivered(const std::string& variable) const {
    auto it = delivered_.find(variable);
    return it == delivered_.end() ? nullptr : &it->second;
}

UnitPtr apply_fault_rules(UnitPtr unit, const std::vector<FaultRule>& rules) {
    std::vector<FaultRule> mine;
    for (const auto& r : rules)
        if (r.instance == unit->instance_name()) mine.push_back(r);
    if (mine.empty()) return unit;
    return std::make_unique<FaultInjector>(std::move(unit), std::move(mine));
}

std::vector<FaultRule> parse_fault_rules(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("fault-rule JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_array()) throw ParseError("fault-rule file must be a JSON array");

    std::vector<FaultRule> rules;
    for (const auto& item : doc) {
        FaultRule rule;
        if (!item.contains("instance") || !item.contains("variable") ||
            !item.contains("trigger") || !item.contains("transform"))
            throw ParseError("fault rule needs instance, variable, trigger and transform");
        rule.instance = item.at("instance").get<std::string>();
        rule.variable = item.at("variable").get<std::string>();
        std::string direction = item.value("direction", "input");
        if (direction == "input") rule.direction = FaultDirection::Input;
        else if (direction == "output") rule.direction = FaultDirection::Output;
        else throw ParseError("fault rule direction must be 'input' or 'output'");
        rule.trigger = parse_condition(item.at("trigger").get<std::string>());
        const auto& transform = item.at("transform");
        if (transform.is_string() && transform.get<std::string>() == "alternate01") {
            rule.transform = FaultTransform::alternate01();
        } else if (transform.is_object() && transform.contains("constant")) {
            const auto& c = transform.at("constant");
            if (c.is_boolean()) rule.transform = FaultTransform::constant(Value(c.get<bool>()));
            else if (c.is_number_integer())
                rule.transform = FaultTransform::constant(Value(c.get<std::int64_t>()));
            else rule.transform = FaultTransform::constant(Value(c.get<double>()));
        } else {
            throw ParseError("fault rule transform must be \"alternate01\" or {\"constant\": v}");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

} // namespace coswap
