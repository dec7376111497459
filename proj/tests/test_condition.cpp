#include <doctest.h>

#include <random>

#include "coswap/condition.hpp"
#include "coswap/errors.hpp"

using namespace coswap;

TEST_CASE("trivially true condition") {
    ConditionExpr c = parse_condition("(true)");
    CHECK(c.root()->kind == ExprNode::Kind::BoolLiteral);
    CHECK(c.root()->bool_value);
    CHECK(c.evaluate({}));
}

TEST_CASE("constant relation folds under any scope") {
    ConditionExpr c = parse_condition("(1 < 2)");
    CHECK(c.evaluate({}));
    CHECK(c.evaluate({{"a.x", Value(99.0)}}));
}

TEST_CASE("equality over two variable references") {
    ConditionExpr c = parse_condition("(controller.valve == leak_controller.valve)");
    CHECK(c.root()->kind == ExprNode::Kind::Binary);
    CHECK(c.root()->binary_op == BinaryOp::Eq);
    CHECK(c.root()->lhs->kind == ExprNode::Kind::VariableRef);
    CHECK(c.root()->rhs->scope_key() == "leak_controller.valve");
    CHECK(c.evaluate({{"controller.valve", Value(1.0)}, {"leak_controller.valve", Value(1.0)}}));
    CHECK_FALSE(
        c.evaluate({{"controller.valve", Value(1.0)}, {"leak_controller.valve", Value(0.0)}}));
}

TEST_CASE("arithmetic and precedence") {
    Scope scope{{"a.x", Value(1.5)}};
    CHECK(parse_condition("(a.x < 2.0)").evaluate(scope));
    CHECK(parse_condition("a.x * 2 + 1 == 4").evaluate(scope));
    CHECK(parse_condition("1 + 2 * 3 == 7").evaluate({}));
    CHECK(parse_condition("(1 + 2) * 3 == 9").evaluate({}));
    CHECK(parse_condition("!false && true").evaluate({}));
    CHECK(parse_condition("-a.x < 0").evaluate(scope));
    CHECK(parse_condition("true || false && false").evaluate({}));
}

TEST_CASE("short-circuit style boolean mix") {
    Scope scope{{"a.x", Value(3.0)}, {"b.ok", Value(true)}};
    CHECK_FALSE(parse_condition("(a.x < 2.0 && b.ok)").evaluate(scope));
    CHECK(parse_condition("(a.x < 2.0 || b.ok)").evaluate(scope));
}

TEST_CASE("parse errors carry offsets") {
    try {
        parse_condition("(a.x <) 2");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.offset().has_value());
        CHECK(*e.offset() == 6);
    }
    CHECK_THROWS_AS(parse_condition("(a.x"), ParseError);
    CHECK_THROWS_AS(parse_condition("a ? b"), ParseError);
    CHECK_THROWS_AS(parse_condition("(a.b.c > 1)"), ParseError);
    CHECK_THROWS_AS(parse_condition(""), ParseError);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(parse_condition("(ghost.x > 1)").evaluate({}), EngineError);
    CHECK_THROWS_AS(parse_condition("(a.x && true)").evaluate({{"a.x", Value(1.0)}}), TypeError);
    CHECK_THROWS_AS(parse_condition("(a.x == b.y)")
                        .evaluate({{"a.x", Value(1.0)}, {"b.y", Value(true)}}),
                    TypeError);
    CHECK_THROWS_AS(parse_condition("(a.x + 1)").evaluate({{"a.x", Value(1.0)}}), TypeError);
}

TEST_CASE("integer values widen in numeric contexts") {
    Scope scope{{"n.count", Value(3)}};
    CHECK(parse_condition("(n.count >= 3)").evaluate(scope));
    CHECK(parse_condition("(n.count * 2 == 6)").evaluate(scope));
}

TEST_CASE("pretty-print reparses to an identical AST") {
    const char* samples[] = {
        "(true)",
        "(a.x < 2.0 && b.ok)",
        "(a.x - b.x < 0.01 && b.x - a.x < 0.01)",
        "!(a.p || b.q) == false",
        "((a.x + 1) * 2 >= b.y / 4 - 1)",
        "(sim.time >= 12 && tank.level >= 1.6)",
        "-(a.x + 1) < -2",
    };
    for (const char* text : samples) {
        ConditionExpr parsed = parse_condition(text);
        ConditionExpr reparsed = parse_condition(parsed.pretty_print());
        CHECK_MESSAGE(parsed == reparsed, text, " -> ", parsed.pretty_print());
    }
}

TEST_CASE("referenced variables are collected sorted") {
    auto refs = parse_condition("(b.y < a.x && a.x > 0)").referenced_variables();
    REQUIRE(refs.size() == 2);
    CHECK(refs[0] == "a.x");
    CHECK(refs[1] == "b.y");
}

TEST_CASE("latch basics") {
    LatchedCondition latch{parse_condition("(false)")};
    CHECK_FALSE(latch.update({}));
    CHECK_FALSE(latch.update({}));

    LatchedCondition sticky{parse_condition("(false)"), true};
    CHECK(sticky.update({}));

    LatchedCondition threshold{parse_condition("(a.x >= 1)")};
    CHECK(threshold.update({{"a.x", Value(1.0)}}));

    LatchedCondition once{parse_condition("(true)")};
    CHECK(once.update({}));
}

TEST_CASE("latch is monotone over random scope sequences") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> level(0.0, 2.0);
    for (int trial = 0; trial < 1000; ++trial) {
        LatchedCondition latch{parse_condition("(tank.level >= 1.5)")};
        bool seen_true = false;
        for (int step = 0; step < 40; ++step) {
            bool now = latch.update({{"tank.level", Value(level(rng))}});
            if (seen_true) CHECK(now);
            seen_true = seen_true || now;
        }
    }
}
