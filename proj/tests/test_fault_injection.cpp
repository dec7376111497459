#include <doctest.h>

#include "coswap/builtin_units.hpp"
#include "coswap/errors.hpp"
#include "coswap/fault_injection.hpp"

using namespace coswap;

namespace {

FaultRule rule(const std::string& variable, FaultDirection dir, const std::string& trigger,
               FaultTransform transform) {
    return FaultRule{"tank", variable, dir, parse_condition(trigger), std::move(transform)};
}

UnitPtr wrapped_tank(const FaultRule& r) {
    UnitPtr tank = std::make_unique<WaterTankUnit>("tank");
    return apply_fault_rules(std::move(tank), {r});
}

} // namespace

TEST_CASE("inactive rules pass values through unchanged") {
    UnitPtr tank =
        wrapped_tank(rule("valvecontrol", FaultDirection::Input, "(tank.level >= 1.6)",
                          FaultTransform::alternate01()));
    tank->enter_initialization();
    tank->exit_initialization(); // level 1.0 < 1.6
    tank->set_var("valvecontrol", Value(1.0));
    tank->do_step(0.0, 0.1);
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.98)); // saw the commanded 1
}

TEST_CASE("alternate01 delivers 1,0,1 on consecutive active steps") {
    UnitPtr tank = wrapped_tank(rule("valvecontrol", FaultDirection::Input, "(tank.level >= 0)",
                                     FaultTransform::alternate01()));
    tank->enter_initialization();
    tank->exit_initialization();
    double level = 1.0;
    // regardless of the commanded 0, the tank sees 1, 0, 1
    for (double expected_valve : {1.0, 0.0, 1.0}) {
        tank->set_var("valvecontrol", Value(0.0));
        tank->do_step(0.0, 0.1);
        double next = level + 0.1 * (0.1 - expected_valve * 0.3);
        CHECK(tank->get_var("level").as_real() == doctest::Approx(next).epsilon(1e-12));
        level = next;
    }
    const auto* injector = dynamic_cast<const FaultInjector*>(tank.get());
    REQUIRE(injector != nullptr);
    REQUIRE(injector->last_delivered("valvecontrol") != nullptr);
    CHECK(injector->last_delivered("valvecontrol")->as_real() == 1.0);
}

TEST_CASE("level-gated rule releases the input when the trigger clears") {
    UnitPtr tank = wrapped_tank(rule("valvecontrol", FaultDirection::Input,
                                     "(tank.level >= 1.0)", FaultTransform::constant(Value(1.0))));
    tank->enter_initialization();
    tank->exit_initialization(); // level 1.0
    tank->set_var("valvecontrol", Value(0.0));
    tank->do_step(0.0, 0.1); // active: sees 1 -> 0.98
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.98));
    tank->set_var("valvecontrol", Value(0.0));
    tank->do_step(0.1, 0.1); // 0.98 < 1.0: released, sees the commanded 0
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.99));
}

TEST_CASE("sim.time is bound for triggers") {
    UnitPtr tank = wrapped_tank(rule("valvecontrol", FaultDirection::Input, "(sim.time >= 0.2)",
                                     FaultTransform::constant(Value(1.0))));
    tank->enter_initialization();
    tank->exit_initialization();
    tank->set_var("valvecontrol", Value(0.0));
    tank->do_step(0.0, 0.1);
    CHECK(tank->get_var("level").as_real() == doctest::Approx(1.01)); // not yet
    tank->set_var("valvecontrol", Value(0.0));
    tank->do_step(0.2, 0.1);
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.99)); // stuck open
}

TEST_CASE("triggers see commanded inputs, not injected ones") {
    UnitPtr tank =
        wrapped_tank(rule("valvecontrol", FaultDirection::Input,
                          "(tank.valvecontrol == 0 && tank.level >= 1.0)",
                          FaultTransform::constant(Value(1.0))));
    tank->enter_initialization();
    tank->exit_initialization();
    tank->set_var("valvecontrol", Value(0.0));
    tank->do_step(0.0, 0.1); // commanded closed, level 1.0: leak drains
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.98));
    tank->set_var("valvecontrol", Value(1.0));
    tank->do_step(0.1, 0.1); // commanded open: gate is off, drains anyway
    CHECK(tank->get_var("level").as_real() == doctest::Approx(0.96));
}

TEST_CASE("constant transform on an output masks what readers see") {
    UnitPtr det = std::make_unique<LeakDetectorUnit>("det");
    FaultRule r{"det", "leak", FaultDirection::Output, parse_condition("(true)"),
                FaultTransform::constant(Value(false))};
    UnitPtr wrapped = apply_fault_rules(std::move(det), {r});
    wrapped->enter_initialization();
    wrapped->exit_initialization();
    for (double level : {1.6, 1.58, 1.56, 1.54, 1.52}) {
        wrapped->set_var("valve", Value(0.0));
        wrapped->set_var("level", Value(level));
        wrapped->do_step(0.0, 0.1);
        CHECK_FALSE(wrapped->get_var("leak").as_boolean()); // masked
    }
}

TEST_CASE("rules referencing unknown variables or the wrong direction fail fast") {
    CHECK_THROWS_WITH_AS(wrapped_tank(rule("nosuch", FaultDirection::Input, "(true)",
                                           FaultTransform::alternate01())),
                         doctest::Contains("unknown variable"), Error);
    CHECK_THROWS_WITH_AS(wrapped_tank(rule("level", FaultDirection::Input, "(true)",
                                           FaultTransform::alternate01())),
                         doctest::Contains("not an input"), Error);
    CHECK_THROWS_WITH_AS(wrapped_tank(rule("valvecontrol", FaultDirection::Output, "(true)",
                                           FaultTransform::alternate01())),
                         doctest::Contains("not an output"), Error);
}

TEST_CASE("units without matching rules stay unwrapped") {
    UnitPtr tank = std::make_unique<WaterTankUnit>("tank");
    FaultRule other{"pump", "valvecontrol", FaultDirection::Input, parse_condition("(true)"),
                    FaultTransform::alternate01()};
    UnitPtr result = apply_fault_rules(std::move(tank), {other});
    CHECK(dynamic_cast<FaultInjector*>(result.get()) == nullptr);
}

TEST_CASE("fault rule files parse") {
    auto rules = parse_fault_rules(R"json([
      {"instance": "tank", "variable": "valvecontrol", "direction": "input",
       "trigger": "(sim.time >= 12 && tank.level >= 1.6)", "transform": "alternate01"},
      {"instance": "det", "variable": "leak", "direction": "output",
       "trigger": "(true)", "transform": {"constant": false}}
    ])json");
    REQUIRE(rules.size() == 2);
    CHECK(rules[0].transform.kind == FaultTransform::Kind::Alternate01);
    CHECK(rules[1].direction == FaultDirection::Output);
    CHECK(rules[1].transform.kind == FaultTransform::Kind::Constant);
    CHECK_FALSE(rules[1].transform.constant_value.as_boolean());

    CHECK_THROWS_AS(parse_fault_rules("{}"), ParseError);
    CHECK_THROWS_AS(parse_fault_rules(R"([{"instance":"a"}])"), ParseError);
    CHECK_THROWS_AS(
        parse_fault_rules(
            R"json([{"instance":"a","variable":"v","trigger":"(true)","transform":"x"}])json"),
        ParseError);
}
