#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "coswap/value.hpp"

namespace coswap {

// Variable bindings visible to a condition: "instance.variable" -> value.
using Scope = std::map<std::string, Value>;

enum class BinaryOp { And, Or, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div };
enum class UnaryOp { Not, Negate };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { BoolLiteral, NumberLiteral, VariableRef, Unary, Binary };

    Kind kind;
    bool bool_value = false;
    double number_value = 0.0;
    std::string instance; // VariableRef
    std::string variable; // VariableRef
    UnaryOp unary_op = UnaryOp::Not;
    BinaryOp binary_op = BinaryOp::And;
    ExprPtr lhs;
    ExprPtr rhs;
    std::size_t offset = 0; // position in the source text, for diagnostics

    std::string scope_key() const { return instance + "." + variable; }
};

bool structurally_equal(const ExprNode& a, const ExprNode& b);

// Condition over instance variables, parsed from the step/swap condition
// text embedded in a multi-model document.
class ConditionExpr {
public:
    ConditionExpr() = default;
    explicit ConditionExpr(ExprPtr root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    const ExprPtr& root() const { return root_; }
    const std::string& source() const { return source_; }
    bool empty() const { return root_ == nullptr; }

    // Strict evaluation; the scope must bind every referenced variable with
    // the right type. Throws EngineError on unbound variables and TypeError
    // on type mismatches (both indicate validation bugs upstream).
    bool evaluate(const Scope& scope) const;

    // Canonical text form; reparses to a structurally identical AST.
    std::string pretty_print() const;

    // All "instance.variable" references, sorted, deduplicated.
    std::vector<std::string> referenced_variables() const;

    bool operator==(const ConditionExpr& other) const;

private:
    ExprPtr root_;
    std::string source_;
};

// C-style infix grammar with precedence
//   unary > * / > + - > < <= > >= > == != > && > ||
// Identifiers are two-component dotted variable references; literals are
// `true`, `false` and decimal numbers. Throws ParseError with the offending
// character offset.
ConditionExpr parse_condition(const std::string& text);

// Trigger condition state: once true, stays true.
struct LatchedCondition {
    ConditionExpr expr;
    bool latched = false;

    // latched <- latched || expr(scope); returns the new latch value.
    // Called once per condition at the start of each loop iteration.
    bool update(const Scope& scope) {
        if (!latched) latched = expr.evaluate(scope);
        return latched;
    }
};

} // namespace coswap
