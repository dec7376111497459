#pragma once

#include <map>
#include <memory>
#include <string>

#include "coswap/model_description.hpp"
#include "coswap/value.hpp"

namespace coswap {

enum class UnitPhase { Instantiated, Initializing, Initialized, Terminated };

std::string to_string(UnitPhase phase);

// Stateful model instance with an FMI-like lifecycle:
//
//   instantiated -> (set parameters/start values) -> enter_initialization
//   -> (set inputs/start values) -> exit_initialization
//   -> { set_var | do_step | get_var }* -> terminate
//
// Out-of-order calls raise LifecycleError. Units are single-threaded
// objects owned exclusively by the engine.
class SimulationUnit {
public:
    virtual ~SimulationUnit() = default;

    virtual const ModelDescription& description() const = 0;
    virtual const std::string& instance_name() const = 0;
    virtual void rename(std::string new_name) = 0;
    virtual UnitPhase phase() const = 0;

    virtual void set_var(const std::string& name, const Value& value) = 0;
    virtual Value get_var(const std::string& name) const = 0;
    virtual void enter_initialization() = 0;
    virtual void exit_initialization() = 0;
    virtual void do_step(double current_time, double step_size) = 0;
    virtual void terminate() = 0;
};

using UnitPtr = std::unique_ptr<SimulationUnit>;

// Common lifecycle bookkeeping for concrete units. Derived classes store
// their variables through vars_ and override the on_* hooks.
class UnitBase : public SimulationUnit {
public:
    UnitBase(ModelDescription desc, std::string instance_name);

    const ModelDescription& description() const override { return desc_; }
    const std::string& instance_name() const override { return name_; }
    void rename(std::string new_name) override { name_ = std::move(new_name); }
    UnitPhase phase() const override { return phase_; }

    void set_var(const std::string& name, const Value& value) override;
    Value get_var(const std::string& name) const override;
    void enter_initialization() override;
    void exit_initialization() override;
    void do_step(double current_time, double step_size) override;
    void terminate() override;

protected:
    // Validated parameter/input values are visible to hooks through these.
    const Value& var(const std::string& name) const;
    bool has_value(const std::string& name) const;
    void store(const std::string& name, Value value);
    double real_var(const std::string& name) const { return var(name).as_real(); }
    bool bool_var(const std::string& name) const { return var(name).as_boolean(); }
    std::int64_t int_var(const std::string& name) const { return var(name).as_integer(); }

    // Called from exit_initialization: validate parameters, compute initial
    // outputs. Throw LifecycleError on invalid parameters.
    virtual void on_initialized() {}
    // Advance by dt; inputs for the interval are already stored.
    virtual void on_step(double dt) = 0;

    [[noreturn]] void fail(const std::string& what) const;

private:
    const VariableInfo& lookup(const std::string& name) const;

    ModelDescription desc_;
    std::string name_;
    UnitPhase phase_ = UnitPhase::Instantiated;
    std::map<std::string, Value> values_;
};

} // namespace coswap
