#include <doctest.h>

#include <random>

#include "coswap/errors.hpp"
#include "coswap/port_id.hpp"

using namespace coswap;

TEST_CASE("port id parses the three components") {
    PortId p = parse_port_id("{x2}.tank.level");
    CHECK(p.instance_key == "x2");
    CHECK(p.instance_name == "tank");
    CHECK(p.variable == "level");
    CHECK(p.str() == "{x2}.tank.level");
    CHECK(p.scope_key() == "tank.level");
}

TEST_CASE("minimal identifiers") {
    PortId p = parse_port_id("{a}.b.c");
    CHECK(p.instance_key == "a");
    CHECK(p.instance_name == "b");
    CHECK(p.variable == "c");
}

TEST_CASE("missing braces is rejected") {
    CHECK_THROWS_WITH_AS(parse_port_id("tank.level"),
                         doctest::Contains("missing instance key braces"), ParseError);
}

TEST_CASE("wrong component count and empty components are rejected") {
    CHECK_THROWS_AS(parse_port_id("{x1}.tank"), ParseError);
    CHECK_THROWS_AS(parse_port_id("{x1}.tank.level.extra"), ParseError);
    CHECK_THROWS_AS(parse_port_id("{}.tank.level"), ParseError);
    CHECK_THROWS_AS(parse_port_id("{x1}..level"), ParseError);
    CHECK_THROWS_AS(parse_port_id("{x1}.tank."), ParseError);
    CHECK_THROWS_AS(parse_port_id("{x1}tank.level"), ParseError);
    CHECK_THROWS_AS(parse_port_id("{x1}.2tank.level"), ParseError);
}

TEST_CASE("serialization round-trips") {
    std::mt19937 rng(7);
    const char* idents[] = {"a", "tank", "leak_controller", "_x9", "v2"};
    std::uniform_int_distribution<int> pick(0, 4);
    for (int i = 0; i < 200; ++i) {
        PortId p{idents[pick(rng)], idents[pick(rng)], idents[pick(rng)]};
        CHECK(parse_port_id(p.str()) == p);
    }
}
