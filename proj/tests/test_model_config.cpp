#include <doctest.h>

#include <random>

#include "coswap/builtin_units.hpp"
#include "coswap/errors.hpp"
#include "coswap/model_config.hpp"
#include "support/random_config.hpp"

using namespace coswap;

namespace {

const char* kSwapDocument = R"json({
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
    "{x1}.controller.maxLevel": 2,
    "{x1}.controller.minLevel": 1
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

} // namespace

TEST_CASE("the water-tank swap document parses with all sections") {
    MultiModelConfig cfg = parse_multi_model(kSwapDocument);

    REQUIRE(cfg.units.size() == 4);
    CHECK(cfg.units.at("x1") == "watertankcontroller-c.fmu");
    CHECK(cfg.model_of("controller") == "watertankcontroller-c");
    CHECK(cfg.model_of("tank") == "singlewatertank-20sim");
    CHECK(cfg.model_of("leak_detector") == "leak_detector");
    CHECK(cfg.model_of("leak_controller") == "leak_controller");

    REQUIRE(cfg.model_swaps.count("controller") == 1);
    const SwapEntry& swap = cfg.model_swaps.at("controller");
    CHECK(swap.swap_instance == "leak_controller");
    CHECK(swap.step_condition.source() == "(true)");
    CHECK(swap.swap_condition.source() == "(true)");
    CHECK(swap.swap_connections.size() == 3);

    REQUIRE(cfg.model_transfers.size() == 2);
    CHECK(cfg.model_transfers.at("controller") == "controller");
    CHECK(cfg.model_transfers.at("tank") == "tank");

    PortId source = parse_port_id("{x1}.controller.valve");
    REQUIRE(cfg.connections.count(source) == 1);
    CHECK(cfg.connections.at(source).size() == 2);
}

TEST_CASE("empty configuration") {
    MultiModelConfig cfg = parse_multi_model(R"json({"fmus":{},"connections":{}})json");
    CHECK(cfg.units.empty());
    CHECK(cfg.connections.empty());
    CHECK(cfg.parameters.empty());
    CHECK(cfg.model_swaps.empty());
    CHECK(cfg.model_transfers.empty());
}

TEST_CASE("unknown instance key is an error") {
    std::string doc = R"json({
      "fmus": {"{x1}": "watertankcontroller-c.fmu"},
      "parameters": {"{x9}.ghost.p": 1}
    })json";
    CHECK_THROWS_WITH_AS(parse_multi_model(doc), doctest::Contains("unknown instance key {x9}"),
                         ParseError);
}

TEST_CASE("unknown top-level keys warn but parse") {
    std::vector<std::string> warnings;
    parse_multi_model(R"json({"fmus":{},"algorithm":{"type":"jacobi"}})json", &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("algorithm") != std::string::npos);
}

TEST_CASE("duplicate sink is rejected") {
    std::string doc = R"json({
      "fmus": {"{x1}": "a.fmu", "{x2}": "b.fmu", "{x3}": "c.fmu"},
      "connections": {
        "{x1}.a.out": ["{x3}.c.in"],
        "{x2}.b.out": ["{x3}.c.in"]
      }
    })json";
    CHECK_THROWS_WITH_AS(parse_multi_model(doc), doctest::Contains("duplicate sink"), ParseError);
}

TEST_CASE("malformed port id inside a document is rejected") {
    CHECK_THROWS_AS(parse_multi_model(R"json({"fmus":{"{x1}":"m.fmu"},"parameters":{"x1.a.b":1}})json"),
                    ParseError);
    CHECK_THROWS_AS(parse_multi_model(R"json({"fmus":{"x1":"m.fmu"}})json"), ParseError);
}

TEST_CASE("json syntax errors carry a position") {
    try {
        parse_multi_model("{\"fmus\": }");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset().has_value());
    }
}

TEST_CASE("a swap instance cannot be transferred") {
    std::string doc = R"json({
      "fmus": {"{x1}": "a.fmu", "{x2}": "b.fmu"},
      "connections": {"{x1}.a.out": ["{x2}.b.in"]},
      "modelSwaps": {
        "a": {"swapInstance": "b", "stepCondition": "(true)", "swapCondition": "(true)",
              "swapConnections": {"{x2}.b.out": []}}
      },
      "modelTransfers": {"a": "a", "b": "b"}
    })json";
    CHECK_THROWS_WITH_AS(parse_multi_model(doc), doctest::Contains("cannot also be transferred"),
                         ParseError);
}

TEST_CASE("conflicting instance bindings are rejected") {
    CHECK_THROWS_AS(parse_multi_model(R"json({
      "fmus": {"{x1}": "a.fmu", "{x2}": "b.fmu"},
      "connections": {"{x1}.a.out": ["{x2}.a.in"]}
    })json"),
                    ParseError);
    CHECK_THROWS_AS(parse_multi_model(R"json({
      "fmus": {"{x1}": "a.fmu"},
      "connections": {"{x1}.a.out": ["{x1}.b.in"]}
    })json"),
                    ParseError);
}

TEST_CASE("parse-serialize-parse is the identity on valid configs") {
    MultiModelConfig fig = parse_multi_model(kSwapDocument);
    CHECK(parse_multi_model(serialize_multi_model(fig)) == fig);

    std::mt19937 rng(42);
    for (int i = 0; i < 50; ++i) {
        MultiModelConfig cfg = testing::random_acyclic_config(rng).config;
        MultiModelConfig reparsed = parse_multi_model(serialize_multi_model(cfg));
        CHECK(reparsed == cfg);
    }
}

TEST_CASE("validation accepts the swap document against the builtin registry") {
    MultiModelConfig cfg = parse_multi_model(kSwapDocument);
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK(report.error_count() == 0);
}

TEST_CASE("validation is pure") {
    MultiModelConfig cfg = parse_multi_model(kSwapDocument);
    ModelRegistry registry = builtin_registry();
    ValidationReport a = validate_config(cfg, registry);
    ValidationReport b = validate_config(cfg, registry);
    REQUIRE(a.diagnostics.size() == b.diagnostics.size());
    for (std::size_t i = 0; i < a.diagnostics.size(); ++i)
        CHECK(a.diagnostics[i].message == b.diagnostics[i].message);
}

TEST_CASE("validation flags unknown models") {
    MultiModelConfig cfg = parse_multi_model(R"json({
      "fmus": {"{x1}": "nosuch.fmu"},
      "parameters": {"{x1}.thing.p": 1}
    })json");
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("unknown model nosuch") != std::string::npos);
}

TEST_CASE("validation flags unknown variables in swap connections") {
    std::string doc = kSwapDocument;
    auto at = doc.find("leak_controller.level");
    REQUIRE(at != std::string::npos);
    doc.replace(at, std::string("leak_controller.level").size(), "leak_controller.levl");
    MultiModelConfig cfg = parse_multi_model(doc);
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("unknown variable leak_controller.levl") != std::string::npos);
}

TEST_CASE("validation flags parameter type mismatches") {
    MultiModelConfig cfg = parse_multi_model(R"json({
      "fmus": {"{x1}": "leak_detector.fmu"},
      "parameters": {"{x1}.leak_detector.threshold": 2.5}
    })json");
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK_FALSE(report.ok());
}

TEST_CASE("validation flags unbound condition variables") {
    std::string doc = kSwapDocument;
    auto at = doc.find("\"stepCondition\": \"(true)\"");
    REQUIRE(at != std::string::npos);
    doc.replace(at, std::string("\"stepCondition\": \"(true)\"").size(),
                "\"stepCondition\": \"(ghost.x > 1)\"");
    MultiModelConfig cfg = parse_multi_model(doc);
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK_FALSE(report.ok());
    CHECK(report.to_string().find("unbound variable ghost.x") != std::string::npos);
}

TEST_CASE("differing non-trivial conditions earn a note") {
    std::string doc = kSwapDocument;
    auto at = doc.find("\"stepCondition\": \"(true)\"");
    doc.replace(at, std::string("\"stepCondition\": \"(true)\"").size(),
                "\"stepCondition\": \"(tank.level > 1)\"");
    at = doc.find("\"swapCondition\": \"(true)\"");
    doc.replace(at, std::string("\"swapCondition\": \"(true)\"").size(),
                "\"swapCondition\": \"(tank.level > 1.5)\"");
    MultiModelConfig cfg = parse_multi_model(doc);
    ValidationReport report = validate_config(cfg, builtin_registry());
    CHECK(report.ok());
    bool noted = false;
    for (const auto& d : report.diagnostics)
        noted = noted || (d.severity == Severity::Note &&
                          d.message.find("swap condition implies") != std::string::npos);
    CHECK(noted);
}

TEST_CASE("replacement instances never appear among the transfers") {
    MultiModelConfig cfg = parse_multi_model(kSwapDocument);
    for (const auto& [target, entry] : cfg.model_swaps) {
        (void)target;
        for (const auto& [old_name, new_name] : cfg.model_transfers) {
            CHECK(entry.swap_instance != old_name);
            CHECK(entry.swap_instance != new_name);
        }
    }
    // the replaced instance itself is transferred: it keeps running with its
    // state until the swap condition fires
    CHECK(cfg.model_transfers.count("controller") == 1);
}
