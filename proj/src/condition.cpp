#include "coswap/condition.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include "coswap/errors.hpp"

namespace coswap {

namespace {

enum class Tok {
    End, True, False, Number, Ident,
    LParen, RParen, Dot,
    AndAnd, OrOr, Not,
    Eq, Ne, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash,
};

struct Token {
    Tok kind;
    std::size_t offset;
    double number = 0.0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, pos_});
                return out;
            }
            std::size_t at = pos_;
            char c = src_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                out.push_back(number(at));
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(ident(at));
            } else {
                out.push_back(symbol(at));
            }
        }
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    Token number(std::size_t at) {
        std::size_t end = pos_;
        bool seen_dot = false, seen_exp = false;
        while (end < src_.size()) {
            char c = src_[end];
            if (std::isdigit(static_cast<unsigned char>(c))) { ++end; continue; }
            if (c == '.' && !seen_dot && !seen_exp) { seen_dot = true; ++end; continue; }
            if ((c == 'e' || c == 'E') && !seen_exp && end > pos_) {
                seen_exp = true; ++end;
                if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
                continue;
            }
            break;
        }
        std::string text = src_.substr(pos_, end - pos_);
        char* stop = nullptr;
        double v = std::strtod(text.c_str(), &stop);
        if (stop != text.c_str() + text.size())
            throw ParseError("bad numeric literal '" + text + "'", at);
        pos_ = end;
        return {Tok::Number, at, v, text};
    }

    Token ident(std::size_t at) {
        std::size_t end = pos_;
        while (end < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
            ++end;
        std::string text = src_.substr(pos_, end - pos_);
        pos_ = end;
        if (text == "true") return {Tok::True, at};
        if (text == "false") return {Tok::False, at};
        return {Tok::Ident, at, 0.0, text};
    }

    Token symbol(std::size_t at) {
        auto two = [&](char a, char b) {
            return src_[pos_] == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('&', '&')) { pos_ += 2; return {Tok::AndAnd, at}; }
        if (two('|', '|')) { pos_ += 2; return {Tok::OrOr, at}; }
        if (two('=', '=')) { pos_ += 2; return {Tok::Eq, at}; }
        if (two('!', '=')) { pos_ += 2; return {Tok::Ne, at}; }
        if (two('<', '=')) { pos_ += 2; return {Tok::Le, at}; }
        if (two('>', '=')) { pos_ += 2; return {Tok::Ge, at}; }
        char c = src_[pos_++];
        switch (c) {
        case '(': return {Tok::LParen, at};
        case ')': return {Tok::RParen, at};
        case '.': return {Tok::Dot, at};
        case '!': return {Tok::Not, at};
        case '<': return {Tok::Lt, at};
        case '>': return {Tok::Gt, at};
        case '+': return {Tok::Plus, at};
        case '-': return {Tok::Minus, at};
        case '*': return {Tok::Star, at};
        case '/': return {Tok::Slash, at};
        default:
            throw ParseError(std::string("unexpected character '") + c + "' in condition", at);
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

ExprPtr make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ExprPtr run() {
        ExprPtr e = parse_or();
        if (peek().kind != Tok::End)
            throw ParseError("trailing input after condition expression", peek().offset);
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (peek().kind == k) { ++pos_; return true; }
        return false;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (peek().kind == Tok::OrOr) {
            std::size_t at = take().offset;
            lhs = binary(BinaryOp::Or, lhs, parse_and(), at);
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_equality();
        while (peek().kind == Tok::AndAnd) {
            std::size_t at = take().offset;
            lhs = binary(BinaryOp::And, lhs, parse_equality(), at);
        }
        return lhs;
    }

    ExprPtr parse_equality() {
        ExprPtr lhs = parse_relational();
        while (peek().kind == Tok::Eq || peek().kind == Tok::Ne) {
            Token t = take();
            lhs = binary(t.kind == Tok::Eq ? BinaryOp::Eq : BinaryOp::Ne, lhs, parse_relational(),
                         t.offset);
        }
        return lhs;
    }

    ExprPtr parse_relational() {
        ExprPtr lhs = parse_additive();
        while (true) {
            BinaryOp op;
            switch (peek().kind) {
            case Tok::Lt: op = BinaryOp::Lt; break;
            case Tok::Le: op = BinaryOp::Le; break;
            case Tok::Gt: op = BinaryOp::Gt; break;
            case Tok::Ge: op = BinaryOp::Ge; break;
            default: return lhs;
            }
            std::size_t at = take().offset;
            lhs = binary(op, lhs, parse_additive(), at);
        }
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            Token t = take();
            lhs = binary(t.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub, lhs,
                         parse_multiplicative(), t.offset);
        }
        return lhs;
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            Token t = take();
            lhs = binary(t.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div, lhs, parse_unary(),
                         t.offset);
        }
        return lhs;
    }

    ExprPtr parse_unary() {
        if (peek().kind == Tok::Not) {
            Token t = take();
            ExprNode n;
            n.kind = ExprNode::Kind::Unary;
            n.unary_op = UnaryOp::Not;
            n.lhs = parse_unary();
            n.offset = t.offset;
            return make_node(std::move(n));
        }
        if (peek().kind == Tok::Minus) {
            Token t = take();
            ExprNode n;
            n.kind = ExprNode::Kind::Unary;
            n.unary_op = UnaryOp::Negate;
            n.lhs = parse_unary();
            n.offset = t.offset;
            return make_node(std::move(n));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        Token t = take();
        ExprNode n;
        n.offset = t.offset;
        switch (t.kind) {
        case Tok::True:
        case Tok::False:
            n.kind = ExprNode::Kind::BoolLiteral;
            n.bool_value = (t.kind == Tok::True);
            return make_node(std::move(n));
        case Tok::Number:
            n.kind = ExprNode::Kind::NumberLiteral;
            n.number_value = t.number;
            return make_node(std::move(n));
        case Tok::Ident: {
            if (!accept(Tok::Dot))
                throw ParseError("expected '.' after '" + t.text +
                                     "' (variables are instance.variable)",
                                 peek().offset);
            Token v = take();
            if (v.kind != Tok::Ident)
                throw ParseError("expected variable name after '.'", v.offset);
            n.kind = ExprNode::Kind::VariableRef;
            n.instance = t.text;
            n.variable = v.text;
            return make_node(std::move(n));
        }
        case Tok::LParen: {
            ExprPtr inner = parse_or();
            if (!accept(Tok::RParen))
                throw ParseError("expected ')'", peek().offset);
            return inner;
        }
        default:
            throw ParseError("expected literal, variable or '('", t.offset);
        }
    }

    ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, std::size_t at) {
        ExprNode n;
        n.kind = ExprNode::Kind::Binary;
        n.binary_op = op;
        n.lhs = std::move(lhs);
        n.rhs = std::move(rhs);
        n.offset = at;
        return make_node(std::move(n));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// --- evaluation ---------------------------------------------------------

struct EvalValue {
    enum class Kind { Bool, Number, Str } kind;
    bool b = false;
    double num = 0.0;
    std::string str;
};

EvalValue eval_value_of(const Value& v, const std::string& name) {
    switch (v.type()) {
    case ValueType::Boolean: return {EvalValue::Kind::Bool, v.as_boolean(), 0.0, {}};
    case ValueType::Real:
    case ValueType::Integer: return {EvalValue::Kind::Number, false, v.as_real(), {}};
    case ValueType::String: return {EvalValue::Kind::Str, false, 0.0, v.as_string()};
    }
    throw TypeError("unsupported value type for " + name);
}

EvalValue eval_node(const ExprNode& n, const Scope& scope);

bool eval_bool(const ExprNode& n, const Scope& scope) {
    EvalValue v = eval_node(n, scope);
    if (v.kind != EvalValue::Kind::Bool)
        throw TypeError("expected boolean operand in condition (offset " +
                        std::to_string(n.offset) + ")");
    return v.b;
}

double eval_num(const ExprNode& n, const Scope& scope) {
    EvalValue v = eval_node(n, scope);
    if (v.kind != EvalValue::Kind::Number)
        throw TypeError("expected numeric operand in condition (offset " +
                        std::to_string(n.offset) + ")");
    return v.num;
}

EvalValue eval_node(const ExprNode& n, const Scope& scope) {
    switch (n.kind) {
    case ExprNode::Kind::BoolLiteral: return {EvalValue::Kind::Bool, n.bool_value, 0.0, {}};
    case ExprNode::Kind::NumberLiteral: return {EvalValue::Kind::Number, false, n.number_value, {}};
    case ExprNode::Kind::VariableRef: {
        auto it = scope.find(n.scope_key());
        if (it == scope.end())
            throw EngineError("unbound variable " + n.scope_key() + " in condition");
        return eval_value_of(it->second, n.scope_key());
    }
    case ExprNode::Kind::Unary:
        if (n.unary_op == UnaryOp::Not) return {EvalValue::Kind::Bool, !eval_bool(*n.lhs, scope), 0.0, {}};
        return {EvalValue::Kind::Number, false, -eval_num(*n.lhs, scope), {}};
    case ExprNode::Kind::Binary: {
        switch (n.binary_op) {
        case BinaryOp::And:
            return {EvalValue::Kind::Bool, eval_bool(*n.lhs, scope) && eval_bool(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Or:
            return {EvalValue::Kind::Bool, eval_bool(*n.lhs, scope) || eval_bool(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
            EvalValue l = eval_node(*n.lhs, scope);
            EvalValue r = eval_node(*n.rhs, scope);
            if (l.kind != r.kind)
                throw TypeError("equality over mismatched types (offset " +
                                std::to_string(n.offset) + ")");
            bool eq = false;
            switch (l.kind) {
            case EvalValue::Kind::Bool: eq = l.b == r.b; break;
            case EvalValue::Kind::Number: eq = l.num == r.num; break;
            case EvalValue::Kind::Str: eq = l.str == r.str; break;
            }
            return {EvalValue::Kind::Bool, n.binary_op == BinaryOp::Eq ? eq : !eq, 0.0, {}};
        }
        case BinaryOp::Lt:
            return {EvalValue::Kind::Bool, eval_num(*n.lhs, scope) < eval_num(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Le:
            return {EvalValue::Kind::Bool, eval_num(*n.lhs, scope) <= eval_num(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Gt:
            return {EvalValue::Kind::Bool, eval_num(*n.lhs, scope) > eval_num(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Ge:
            return {EvalValue::Kind::Bool, eval_num(*n.lhs, scope) >= eval_num(*n.rhs, scope), 0.0, {}};
        case BinaryOp::Add:
            return {EvalValue::Kind::Number, false, eval_num(*n.lhs, scope) + eval_num(*n.rhs, scope), {}};
        case BinaryOp::Sub:
            return {EvalValue::Kind::Number, false, eval_num(*n.lhs, scope) - eval_num(*n.rhs, scope), {}};
        case BinaryOp::Mul:
            return {EvalValue::Kind::Number, false, eval_num(*n.lhs, scope) * eval_num(*n.rhs, scope), {}};
        case BinaryOp::Div:
            return {EvalValue::Kind::Number, false, eval_num(*n.lhs, scope) / eval_num(*n.rhs, scope), {}};
        }
        break;
    }
    }
    throw EngineError("corrupt condition AST");
}

// --- printing -----------------------------------------------------------

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 6;
    }
    return 0;
}

const char* op_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    }
    return "?";
}

std::string number_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void print_node(const ExprNode& n, std::string& out, int parent_prec) {
    switch (n.kind) {
    case ExprNode::Kind::BoolLiteral:
        out += n.bool_value ? "true" : "false";
        return;
    case ExprNode::Kind::NumberLiteral:
        out += number_text(n.number_value);
        return;
    case ExprNode::Kind::VariableRef:
        out += n.scope_key();
        return;
    case ExprNode::Kind::Unary:
        out += n.unary_op == UnaryOp::Not ? "!" : "-";
        print_node(*n.lhs, out, 7);
        return;
    case ExprNode::Kind::Binary: {
        int prec = precedence(n.binary_op);
        bool parens = prec < parent_prec;
        if (parens) out += "(";
        print_node(*n.lhs, out, prec);
        out += " ";
        out += op_text(n.binary_op);
        out += " ";
        print_node(*n.rhs, out, prec + 1);
        if (parens) out += ")";
        return;
    }
    }
}

void collect_refs(const ExprNode& n, std::set<std::string>& out) {
    switch (n.kind) {
    case ExprNode::Kind::VariableRef: out.insert(n.scope_key()); return;
    case ExprNode::Kind::Unary: collect_refs(*n.lhs, out); return;
    case ExprNode::Kind::Binary:
        collect_refs(*n.lhs, out);
        collect_refs(*n.rhs, out);
        return;
    default: return;
    }
}

} // namespace

bool structurally_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprNode::Kind::BoolLiteral: return a.bool_value == b.bool_value;
    case ExprNode::Kind::NumberLiteral: return a.number_value == b.number_value;
    case ExprNode::Kind::VariableRef: return a.instance == b.instance && a.variable == b.variable;
    case ExprNode::Kind::Unary: return a.unary_op == b.unary_op && structurally_equal(*a.lhs, *b.lhs);
    case ExprNode::Kind::Binary:
        return a.binary_op == b.binary_op && structurally_equal(*a.lhs, *b.lhs) &&
               structurally_equal(*a.rhs, *b.rhs);
    }
    return false;
}

bool ConditionExpr::evaluate(const Scope& scope) const {
    if (!root_) throw EngineError("evaluating empty condition");
    EvalValue v = eval_node(*root_, scope);
    if (v.kind != EvalValue::Kind::Bool)
        throw TypeError("condition '" + source_ + "' does not evaluate to a boolean");
    return v.b;
}

std::string ConditionExpr::pretty_print() const {
    if (!root_) return "";
    std::string out = "(";
    print_node(*root_, out, 0);
    out += ")";
    return out;
}

std::vector<std::string> ConditionExpr::referenced_variables() const {
    std::set<std::string> refs;
    if (root_) collect_refs(*root_, refs);
    return {refs.begin(), refs.end()};
}

bool ConditionExpr::operator==(const ConditionExpr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return structurally_equal(*root_, *other.root_);
}

ConditionExpr parse_condition(const std::string& text) {
    Lexer lex(text);
    Parser parser(lex.run());
    return ConditionExpr(parser.run(), text);
}

} // namespace coswap
