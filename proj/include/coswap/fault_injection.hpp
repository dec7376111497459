#pragma once

#include <map>
#include <string>
#include <vector>

#include "coswap/condition.hpp"
#include "coswap/simulation_unit.hpp"

namespace coswap {

// What to do with a tampered variable while its trigger condition holds.
struct FaultTransform {
    enum class Kind { Alternate01, Constant } kind = Kind::Alternate01;
    Value constant_value; // Kind::Constant only

    static FaultTransform alternate01() { return {Kind::Alternate01, Value()}; }
    static FaultTransform constant(Value v) { return {Kind::Constant, std::move(v)}; }
};

enum class FaultDirection { Input, Output };

struct FaultRule {
    std::string instance;
    std::string variable;
    FaultDirection direction = FaultDirection::Input;
    ConditionExpr trigger; // over the target's variables plus sim.time
    FaultTransform transform;
};

// Decorates a unit so that, on every step where a rule's trigger condition
// evaluates true, the rule's transform replaces what the unit sees on the
// tampered input (or emits on the tampered output). Triggers are evaluated
// against the unit's pre-step variable values, with commanded (pre-fault)
// values for inputs and the step's communication point bound as sim.time.
// alternate01 produces 1,0,1,0,... over consecutive active steps.
class FaultInjector : public SimulationUnit {
public:
    FaultInjector(UnitPtr target, std::vector<FaultRule> rules);

    const ModelDescription& description() const override { return target_->description(); }
    const std::string& instance_name() const override { return target_->instance_name(); }
    void rename(std::string new_name) override { target_->rename(std::move(new_name)); }
    UnitPhase phase() const override { return target_->phase(); }

    void set_var(const std::string& name, const Value& value) override;
    Value get_var(const std::string& name) const override;
    void enter_initialization() override { target_->enter_initialization(); }
    void exit_initialization() override { target_->exit_initialization(); }
    void do_step(double current_time, double step_size) override;
    void terminate() override { target_->terminate(); }

    // Value the wrapped unit actually saw on `variable` at the last step
    // (injected or commanded); used by the step log.
    const Value* last_delivered(const std::string& variable) const;

private:
    struct RuleState {
        FaultRule rule;
        bool active = false;
        long alternation = 0; // active steps so far
    };

    Value transformed(RuleState& rs, const Value& commanded);
    Scope trigger_scope(double current_time) const;

    UnitPtr target_;
    std::vector<RuleState> rules_;
    std::map<std::string, Value> commanded_;  // last engine-delivered input values
    std::map<std::string, Value> delivered_;  // what the unit saw after injection
};

// Wrap `unit` if any rule targets its instance name; returns the unit
// unchanged otherwise. Throws on unknown variables or direction mismatches.
UnitPtr apply_fault_rules(UnitPtr unit, const std::vector<FaultRule>& rules);

// Fault-rule file: a JSON array of
//   {"instance": ..., "variable": ..., "direction": "input"|"output",
//    "trigger": "(...)", "transform": "alternate01" | {"constant": v}}
std::vector<FaultRule> parse_fault_rules(const std::string& text);

} // namespace coswap
