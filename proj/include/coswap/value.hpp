#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace coswap {

enum class ValueType { Real, Integer, Boolean, String };

std::string to_string(ValueType type);

// Scalar variable value. The type of a variable is fixed for the whole run;
// the only implicit coercion anywhere is integer literal -> real.
class Value {
public:
    Value() : data_(0.0) {}
    Value(double v) : data_(v) {}
    Value(std::int64_t v) : data_(v) {}
    Value(int v) : data_(static_cast<std::int64_t>(v)) {}
    Value(bool v) : data_(v) {}
    Value(std::string v) : data_(std::move(v)) {}
    Value(const char* v) : data_(std::string(v)) {}

    ValueType type() const;

    bool is_real() const { return std::holds_alternative<double>(data_); }
    bool is_integer() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_boolean() const { return std::holds_alternative<bool>(data_); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_numeric() const { return is_real() || is_integer(); }

    double as_real() const;          // Real or Integer (widened)
    std::int64_t as_integer() const; // Integer only
    bool as_boolean() const;         // Boolean only
    const std::string& as_string() const;

    // Coerce to the variable type `target`. Integer -> Real is allowed,
    // everything else must match exactly. Throws TypeError.
    Value coerced_to(ValueType target, const std::string& context) const;

    // Exact equality (same type, same payload).
    bool operator==(const Value& other) const { return data_ == other.data_; }
    bool operator!=(const Value& other) const { return !(*this == other); }

    // Rendering used by the CSV log: reals with 9 fixed decimals,
    // booleans as 1/0, integers plain, strings raw.
    std::string render() const;

private:
    std::variant<double, std::int64_t, bool, std::string> data_;
};

// Fixed 9-decimal rendering for reals (stable log columns).
std::string render_real(double v);

} // namespace coswap
