#include "coswap/builtin_units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coswap/errors.hpp"

namespace coswap {

// --- water tank ----------------------------------------------------------

ModelDescription WaterTankUnit::make_description() {
    ModelDescription d;
    d.model_name = "singlewatertank-20sim";
    d.variables = {
        {"valvecontrol", ValueType::Real, Causality::Input, Value(0.0), true},
        // level is pure state; no direct feedthrough from valvecontrol
        {"level", ValueType::Real, Causality::Output, std::nullopt, false},
        {"q_in", ValueType::Real, Causality::Parameter, Value(0.1), true},
        {"q_out", ValueType::Real, Causality::Parameter, Value(0.3), true},
        {"l0", ValueType::Real, Causality::Parameter, Value(1.0), true},
    };
    return d;
}

WaterTankUnit::WaterTankUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void WaterTankUnit::on_initialized() {
    if (!(real_var("q_in") > 0.0)) fail("q_in must be positive");
    if (!(real_var("q_out") > 0.0)) fail("q_out must be positive");
    if (!has_value("level")) store("level", Value(real_var("l0")));
}

void WaterTankUnit::on_step(double dt) {
    double level = real_var("level");
    double next = level + dt * (real_var("q_in") - real_var("valvecontrol") * real_var("q_out"));
    store("level", Value(std::max(0.0, next)));
}

// --- bang-bang controller -------------------------------------------------

ModelDescription TankControllerUnit::make_description() {
    ModelDescription d;
    d.model_name = "watertankcontroller-c";
    d.variables = {
        {"level", ValueType::Real, Causality::Input, Value(0.0), true},
        {"valve", ValueType::Real, Causality::Output, Value(0.0), false},
        {"minLevel", ValueType::Real, Causality::Parameter, Value(1.0), true},
        {"maxLevel", ValueType::Real, Causality::Parameter, Value(2.0), true},
    };
    return d;
}

TankControllerUnit::TankControllerUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void TankControllerUnit::on_initialized() {
    if (!(real_var("minLevel") < real_var("maxLevel"))) fail("minLevel must be below maxLevel");
}

void TankControllerUnit::on_step(double) {
    double level = real_var("level");
    if (level >= real_var("maxLevel")) store("valve", Value(1.0));
    else if (level <= real_var("minLevel")) store("valve", Value(0.0));
    // otherwise hold the previous output
}

// --- leak detector ---------------------------------------------------------

ModelDescription LeakDetectorUnit::make_description() {
    ModelDescription d;
    d.model_name = "leak_detector";
    d.variables = {
        {"valve", ValueType::Real, Causality::Input, Value(0.0), true},
        {"level", ValueType::Real, Causality::Input, Value(0.0), true},
        {"leak", ValueType::Boolean, Causality::Output, Value(false), false},
        {"threshold", ValueType::Integer, Causality::Parameter, Value(3), true},
    };
    return d;
}

LeakDetectorUnit::LeakDetectorUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void LeakDetectorUnit::on_initialized() {
    if (int_var("threshold") < 1) fail("threshold must be at least 1");
}

void LeakDetectorUnit::on_step(double) {
    double level = real_var("level");
    if (prev_level_) {
        if (real_var("valve") == 0.0 && level < *prev_level_) ++counter_;
        else counter_ = 0;
    }
    prev_level_ = level;
    if (counter_ >= int_var("threshold")) store("leak", Value(true)); // latched
}

// --- mitigating controller --------------------------------------------------

ModelDescription LeakControllerUnit::make_description() {
    ModelDescription d;
    d.model_name = "leak_controller";
    d.variables = {
        {"level", ValueType::Real, Causality::Input, Value(0.0), true},
        {"leak", ValueType::Boolean, Causality::Input, Value(false), true},
        {"valve", ValueType::Real, Causality::Output, Value(0.0), false},
        {"minLevel", ValueType::Real, Causality::Parameter, Value(1.0), true},
        {"maxLevel", ValueType::Real, Causality::Parameter, Value(2.0), true},
        {"leakDelta", ValueType::Real, Causality::Parameter, Value(0.5), true},
    };
    return d;
}

LeakControllerUnit::LeakControllerUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void LeakControllerUnit::on_initialized() {
    if (!(real_var("leakDelta") > 0.0)) fail("leakDelta must be positive");
    if (!(real_var("minLevel") < real_var("maxLevel") - real_var("leakDelta")))
        fail("minLevel must be below maxLevel - leakDelta");
    effective_max_ = real_var("maxLevel");
}

void LeakControllerUnit::on_step(double) {
    if (!leak_seen_ && bool_var("leak")) {
        leak_seen_ = true;
        effective_max_ = real_var("maxLevel") - real_var("leakDelta"); // one-shot
    }
    double level = real_var("level");
    if (level >= effective_max_) store("valve", Value(1.0));
    else if (level <= real_var("minLevel")) store("valve", Value(0.0));
}

// --- sine source -------------------------------------------------------------

ModelDescription SineSourceUnit::make_description() {
    ModelDescription d;
    d.model_name = "sine-source";
    d.variables = {
        {"angle", ValueType::Real, Causality::Output, Value(0.0), false},
        {"amplitude", ValueType::Real, Causality::Parameter, Value(1.0), true},
        {"period", ValueType::Real, Causality::Parameter, Value(1.0), true},
        {"phase", ValueType::Real, Causality::Parameter, Value(0.0), true},
    };
    return d;
}

SineSourceUnit::SineSourceUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void SineSourceUnit::on_initialized() {
    if (!(real_var("period") > 0.0)) fail("period must be positive");
    local_time_ = 0.0;
    store("angle", Value(real_var("amplitude") * std::sin(real_var("phase"))));
}

void SineSourceUnit::on_step(double dt) {
    local_time_ += dt;
    double arg = 2.0 * std::numbers::pi * local_time_ / real_var("period") + real_var("phase");
    store("angle", Value(real_var("amplitude") * std::sin(arg)));
}

// --- passthrough ---------------------------------------------------------------

ModelDescription PassthroughUnit::make_description() {
    ModelDescription d;
    d.model_name = "passthrough";
    d.variables = {
        {"in", ValueType::Real, Causality::Input, Value(0.0), true},
        {"out", ValueType::Real, Causality::Output, Value(0.0), true},
    };
    return d;
}

PassthroughUnit::PassthroughUnit(std::string instance_name)
    : UnitBase(make_description(), std::move(instance_name)) {}

void PassthroughUnit::on_initialized() { store("out", var("in")); }

void PassthroughUnit::on_step(double) { store("out", var("in")); }

// --- registry -------------------------------------------------------------------

void ModelRegistry::add(ModelDescription description, Factory factory) {
    std::string name = description.model_name;
    models_[name] = {std::move(description), std::move(factory)};
}

bool ModelRegistry::has(const std::string& model_name) const {
    return models_.count(model_name) != 0;
}

const ModelDescription* ModelRegistry::describe(const std::string& model_name) const {
    auto it = models_.find(model_name);
    return it == models_.end() ? nullptr : &it->second.first;
}

UnitPtr ModelRegistry::instantiate(const std::string& model_name, const std::string& instance_name,
                                   const UnitContext& ctx) const {
    auto it = models_.find(model_name);
    if (it == models_.end()) throw Error("unknown model " + model_name);
    return it->second.second(instance_name, ctx);
}

std::vector<std::string> ModelRegistry::model_names() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : models_) out.push_back(name);
    return out;
}

ModelRegistry builtin_registry() {
    ModelRegistry reg;
    reg.add(WaterTankUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<WaterTankUnit>(std::move(name));
    });
    reg.add(TankControllerUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<TankControllerUnit>(std::move(name));
    });
    reg.add(LeakDetectorUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<LeakDetectorUnit>(std::move(name));
    });
    reg.add(LeakControllerUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<LeakControllerUnit>(std::move(name));
    });
    reg.add(SineSourceUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<SineSourceUnit>(std::move(name));
    });
    reg.add(PassthroughUnit::make_description(), [](std::string name, const UnitContext&) {
        return std::make_unique<PassthroughUnit>(std::move(name));
    });
    reg.add(BrokerUnit::make_description(), [](std::string name, const UnitContext& ctx) {
        return std::make_unique<BrokerUnit>(std::move(name), ctx.feed);
    });
    return reg;
}

std::string model_name_from_unit_value(const std::string& value) {
    std::string name = value;
    auto slash = name.find_last_of("/\\");
    if (slash != std::string::npos) name = name.substr(slash + 1);
    if (name.size() > 4 && name.substr(name.size() - 4) == ".fmu") name.resize(name.size() - 4);
    return name;
}

} // namespace coswap
