#include "coswap/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "coswap/errors.hpp"

namespace coswap {

namespace {

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

const char* kWaterTankConfig = R"json({
  "fmus": {
    "{x1}": "watertankcontroller-c.fmu",
    "{x2}": "singlewatertank-20sim.fmu"
  },
  "connections": {
    "{x1}.controller.valve": ["{x2}.tank.valvecontrol"],
    "{x2}.tank.level": ["{x1}.controller.level"]
  },
  "parameters": {
    "{x1}.controller.maxLevel": 2,
    "{x1}.controller.minLevel": 1
  }
})json";

const char* kWaterTankSwapSpec = R"json({
  "fmus": {
    "{x1}": "watertankcontroller-c.fmu",
    "{x2}": "singlewatertank-20sim.fmu",
    "{x3}": "leak_detector.fmu",
    "{x4}": "leak_controller.fmu"
  },
  "connections": {
    "{x1}.controller.valve": [
      "{x2}.tank.valvecontrol",
      "{x3}.leak_detector.valve"
    ],
    "{x2}.tank.level": [
      "{x1}.controller.level",
      "{x3}.leak_detector.level"
    ]
  },
  "parameters": {
    "{x4}.leak_controller.maxLevel": 2,
    "{x4}.leak_controller.minLevel": 1,
    "{x4}.leak_controller.leakDelta": 0.5
  },
  "modelSwaps": {
    "controller": {
      "swapInstance": "leak_controller",
      "stepCondition": "(true)",
      "swapCondition": "(true)",
      "swapConnections": {
        "{x4}.leak_controller.valve": [
          "{x2}.tank.valvecontrol",
          "{x3}.leak_detector.valve"
        ],
        "{x2}.tank.level": [
          "{x4}.leak_controller.level"
        ],
        "{x3}.leak_detector.leak": [
          "{x4}.leak_controller.leak"
        ]
      }
    }
  },
  "modelTransfers": {
    "controller": "controller",
    "tank": "tank"
  }
})json";

const char* kBrokerConfig = R"json({
  "fmus": {
    "{x1}": "message-broker.fmu",
    "{x2}": "passthrough.fmu",
    "{x4}": "passthrough.fmu"
  },
  "connections": {
    "{x1}.broker.angle": ["{x2}.monitor.in"],
    "{x2}.monitor.out": ["{x4}.recorder.in"]
  },
  "parameters": {
    "{x1}.broker.prefetch_count": 50,
    "{x1}.broker.maxage": 10
  }
})json";

std::string broker_swap_spec(const std::string& step_condition,
                             const std::string& swap_condition) {
    std::string spec = R"json({
  "fmus": {
    "{x1}": "message-broker.fmu",
    "{x2}": "passthrough.fmu",
    "{x3}": "message-broker.fmu",
    "{x4}": "passthrough.fmu"
  },
  "connections": {
    "{x1}.broker.angle": ["{x2}.monitor.in"],
    "{x2}.monitor.out": ["{x4}.recorder.in"]
  },
  "parameters": {
    "{x3}.broker2.prefetch_count": 0,
    "{x3}.broker2.maxage": 10
  },
  "modelSwaps": {
    "broker": {
      "swapInstance": "broker2",
      "stepCondition": "@STEP@",
      "swapCondition": "@SWAP@",
      "swapConnections": {
        "{x3}.broker2.angle": ["{x2}.monitor.in"]
      }
    }
  },
  "modelTransfers": {
    "broker": "broker",
    "monitor": "monitor",
    "recorder": "recorder"
  }
})json";
    spec.replace(spec.find("@STEP@"), 6, step_condition);
    spec.replace(spec.find("@SWAP@"), 6, swap_condition);
    return spec;
}

// Steering-angle tape: a slow sine published every 0.1 s, with 5 s of
// history buffered before the run starts (the old broker's prefetched
// backlog).
std::shared_ptr<BrokerFeed> make_angle_feed(double first_ts, double last_ts, double spacing,
                                            double period) {
    std::vector<FeedEntry> entries;
    long count = std::lround((last_ts - first_ts) / spacing);
    for (long i = 0; i <= count; ++i) {
        double ts = first_ts + spacing * static_cast<double>(i);
        entries.push_back({ts, std::sin(2.0 * std::numbers::pi * ts / period)});
    }
    return std::make_shared<BrokerFeed>(std::move(entries));
}

FaultRule alternate_rule(const std::string& trigger) {
    FaultRule rule;
    rule.instance = "tank";
    rule.variable = "valvecontrol";
    rule.direction = FaultDirection::Input;
    rule.trigger = parse_condition(trigger);
    rule.transform = FaultTransform::alternate01();
    return rule;
}

FaultRule stuck_open_rule(const std::string& trigger) {
    FaultRule rule;
    rule.instance = "tank";
    rule.variable = "valvecontrol";
    rule.direction = FaultDirection::Input;
    rule.trigger = parse_condition(trigger);
    rule.transform = FaultTransform::constant(Value(1.0));
    return rule;
}

void predeclare_from_spec(Scenario& scenario, const std::string& spec_text) {
    MultiModelConfig spec = parse_multi_model(spec_text);
    for (const auto& col : log_columns_for(spec, scenario.fault_rules))
        scenario.predeclared_columns.push_back(col);
}

Scenario broker_scenario(const std::string& name, const std::string& summary,
                         const std::string& step_condition, const std::string& swap_condition,
                         std::optional<double> transfer_at) {
    Scenario s;
    s.name = name;
    s.summary = summary;
    s.config = parse_multi_model(kBrokerConfig);
    s.settings = {0.0, 20.0, 0.1, 1, 1};
    s.feed = make_angle_feed(-5.0, 25.0, 0.1, 40.0);
    s.schedule = std::make_shared<ScriptedTransferSource>();
    std::string spec = broker_swap_spec(step_condition, swap_condition);
    s.schedule->add(transfer_at.value_or(5.0), spec, name + "-spec");
    predeclare_from_spec(s, spec);
    return s;
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"watertank-normal", "watertank-fault", "watertank-swap",
            "broker-instant",   "broker-swapcond", "broker-stepcond"};
}

Scenario build_scenario(const std::string& name, std::optional<double> transfer_at) {
    if (name == "watertank-normal") {
        Scenario s;
        s.name = name;
        s.summary = "bang-bang level control between minLevel and maxLevel";
        s.config = parse_multi_model(kWaterTankConfig);
        s.settings = {0.0, 40.0, 0.1, 1, 1};
        return s;
    }
    if (name == "watertank-fault") {
        Scenario s;
        s.name = name;
        s.summary = "valve alternation injected at level >= 1.6 from t >= 12 s";
        s.config = parse_multi_model(kWaterTankConfig);
        s.settings = {0.0, 40.0, 0.1, 1, 1};
        s.fault_rules.push_back(
            alternate_rule("(sim.time >= 12 && tank.level >= 1.6)"));
        return s;
    }
    if (name == "watertank-swap") {
        double drop = transfer_at.value_or(22.0);
        Scenario s;
        s.name = name;
        s.summary = "leak detector + mitigating controller swapped in at t = " +
                    format_time(drop) + " s";
        s.config = parse_multi_model(kWaterTankConfig);
        s.settings = {0.0, 40.0, 0.1, 1, 1};
        // Valve alternation up to the swap drop, then a stuck-open drain
        // whenever the level sits above the crack while the valve is
        // commanded shut: the decreasing-level signature the detector needs.
        s.fault_rules.push_back(alternate_rule("(sim.time >= 12 && sim.time < " +
                                               format_time(drop) + " && tank.level >= 1.6)"));
        s.fault_rules.push_back(stuck_open_rule("(sim.time >= " + format_time(drop) +
                                                " && tank.valvecontrol == 0 && tank.level >= 1.5)"));
        s.schedule = std::make_shared<ScriptedTransferSource>();
        s.schedule->add(drop, kWaterTankSwapSpec, "watertank-swap-spec");
        predeclare_from_spec(s, kWaterTankSwapSpec);
        return s;
    }
    if (name == "broker-instant")
        return broker_scenario(name, "instant broker swap, both conditions (true)", "(true)",
                               "(true)", transfer_at);
    if (name == "broker-swapcond")
        return broker_scenario(name,
                               "swap gated on output match only; the backlog offset persists",
                               "(true)", "(broker.angle == broker2.angle)", transfer_at);
    if (name == "broker-stepcond")
        return broker_scenario(
            name, "step and swap both gated on output match; continuity preserved",
            "(broker.angle == broker2.angle)", "(broker.angle == broker2.angle)", transfer_at);
    throw Error("unknown scenario '" + name + "'");
}

std::unique_ptr<SwapEngine> make_scenario_engine(const Scenario& scenario) {
    UnitContext ctx;
    ctx.feed = scenario.feed;
    auto engine = std::make_unique<SwapEngine>(scenario.config, builtin_registry(),
                                               scenario.settings, ctx, scenario.fault_rules);
    if (scenario.feed) engine->add_environment(scenario.feed);
    if (scenario.schedule) engine->set_transfer_source(scenario.schedule.get());
    engine->predeclare_columns(scenario.predeclared_columns);
    return engine;
}

} // namespace coswap
