#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coswap/broker.hpp"
#include "coswap/simulation_unit.hpp"

namespace coswap {

// Single water tank with constant inflow and a drain valve, integrated with
// an explicit Euler step: level <- max(0, level + dt*(q_in - valve*q_out)).
class WaterTankUnit : public UnitBase {
public:
    explicit WaterTankUnit(std::string instance_name);
    static ModelDescription make_description();

protected:
    void on_initialized() override;
    void on_step(double dt) override;
};

// Bang-bang level controller with hysteresis: opens the drain at
// level >= maxLevel, closes it at level <= minLevel, holds in between.
class TankControllerUnit : public UnitBase {
public:
    explicit TankControllerUnit(std::string instance_name);
    static ModelDescription make_description();

protected:
    void on_initialized() override;
    void on_step(double dt) override;
};

// Counts consecutive samples where the valve is commanded closed while the
// level still falls; reports (and latches) a leak at `threshold` of them.
class LeakDetectorUnit : public UnitBase {
public:
    explicit LeakDetectorUnit(std::string instance_name);
    static ModelDescription make_description();

    int decrease_counter() const { return counter_; }

protected:
    void on_initialized() override;
    void on_step(double dt) override;

private:
    std::optional<double> prev_level_;
    int counter_ = 0;
};

// Bang-bang controller that permanently lowers its effective max level by
// leakDelta the first time the leak input reads true.
class LeakControllerUnit : public UnitBase {
public:
    explicit LeakControllerUnit(std::string instance_name);
    static ModelDescription make_description();

    double effective_max_level() const { return effective_max_; }

protected:
    void on_initialized() override;
    void on_step(double dt) override;

private:
    double effective_max_ = 0.0;
    bool leak_seen_ = false;
};

// angle = amplitude * sin(2*pi*t/period + phase) at unit-local time t.
class SineSourceUnit : public UnitBase {
public:
    explicit SineSourceUnit(std::string instance_name);
    static ModelDescription make_description();

protected:
    void on_initialized() override;
    void on_step(double dt) override;

private:
    double local_time_ = 0.0;
};

// out = in, same step. Used to give externally produced signals a
// connected, logged sink.
class PassthroughUnit : public UnitBase {
public:
    explicit PassthroughUnit(std::string instance_name);
    static ModelDescription make_description();

protected:
    void on_initialized() override;
    void on_step(double dt) override;
};

// Shared resources a factory may need.
struct UnitContext {
    std::shared_ptr<BrokerFeed> feed;
};

// Maps model names (multi-model `fmus` values, sans path and `.fmu`) to
// descriptions and factories.
class ModelRegistry {
public:
    using Factory = std::function<UnitPtr(std::string instance_name, const UnitContext&)>;

    void add(ModelDescription description, Factory factory);
    bool has(const std::string& model_name) const;
    const ModelDescription* describe(const std::string& model_name) const;
    UnitPtr instantiate(const std::string& model_name, const std::string& instance_name,
                        const UnitContext& ctx) const;
    std::vector<std::string> model_names() const;

private:
    std::map<std::string, std::pair<ModelDescription, Factory>> models_;
};

// All builtin models under their registry names.
ModelRegistry builtin_registry();

// "dir/singlewatertank-20sim.fmu" -> "singlewatertank-20sim"
std::string model_name_from_unit_value(const std::string& value);

} // namespace coswap
