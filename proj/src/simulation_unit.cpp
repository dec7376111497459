#include "coswap/simulation_unit.hpp"

#include "coswap/errors.hpp"

namespace coswap {

std::string to_string(UnitPhase phase) {
    switch (phase) {
    case UnitPhase::Instantiated: return "instantiated";
    case UnitPhase::Initializing: return "initializing";
    case UnitPhase::Initialized: return "initialized";
    case UnitPhase::Terminated: return "terminated";
    }
    return "?";
}

UnitBase::UnitBase(ModelDescription desc, std::string instance_name)
    : desc_(std::move(desc)), name_(std::move(instance_name)) {
    for (const auto& v : desc_.variables) {
        if (v.start) values_[v.name] = *v.start;
    }
}

void UnitBase::fail(const std::string& what) const {
    throw LifecycleError(name_ + " (" + desc_.model_name + "): " + what);
}

const VariableInfo& UnitBase::lookup(const std::string& name) const {
    const VariableInfo* info = desc_.find(name);
    if (!info) fail("unknown variable '" + name + "'");
    return *info;
}

void UnitBase::set_var(const std::string& name, const Value& value) {
    const VariableInfo& info = lookup(name);
    if (phase_ == UnitPhase::Terminated) fail("set_var after terminate");
    switch (info.causality) {
    case Causality::Parameter:
        if (phase_ != UnitPhase::Instantiated && phase_ != UnitPhase::Initializing)
            fail("parameter '" + name + "' can only be set before initialization completes");
        break;
    case Causality::Output:
        // Start-value override; legal only until initialization completes.
        if (phase_ == UnitPhase::Initialized)
            fail("cannot set output '" + name + "' after initialization");
        break;
    case Causality::Input:
        break;
    }
    values_[name] = value.coerced_to(info.type, name_ + "." + name);
}

Value UnitBase::get_var(const std::string& name) const {
    const VariableInfo& info = lookup(name);
    if (phase_ != UnitPhase::Initialized)
        fail("get_var('" + name + "') while " + to_string(phase_));
    auto it = values_.find(info.name);
    if (it == values_.end()) fail("variable '" + name + "' has no value yet");
    return it->second;
}

void UnitBase::enter_initialization() {
    if (phase_ != UnitPhase::Instantiated)
        fail("enter_initialization while " + to_string(phase_));
    phase_ = UnitPhase::Initializing;
}

void UnitBase::exit_initialization() {
    if (phase_ != UnitPhase::Initializing)
        fail("exit_initialization while " + to_string(phase_));
    on_initialized();
    phase_ = UnitPhase::Initialized;
}

void UnitBase::do_step(double current_time, double step_size) {
    (void)current_time; // units keep their own local time
    if (phase_ != UnitPhase::Initialized) fail("do_step while " + to_string(phase_));
    if (!(step_size > 0.0)) fail("nonpositive step");
    on_step(step_size);
}

void UnitBase::terminate() {
    if (phase_ != UnitPhase::Initialized) fail("terminate while " + to_string(phase_));
    phase_ = UnitPhase::Terminated;
}

bool UnitBase::has_value(const std::string& name) const { return values_.count(name) != 0; }

const Value& UnitBase::var(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) fail("variable '" + name + "' has no value");
    return it->second;
}

void UnitBase::store(const std::string& name, Value value) {
    values_[name] = std::move(value);
}

} // namespace coswap
