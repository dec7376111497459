#include "coswap/value.hpp"

#include <cstdio>

#include "coswap/errors.hpp"

namespace coswap {

std::string to_string(ValueType type) {
    switch (type) {
    case ValueType::Real: return "real";
    case ValueType::Integer: return "integer";
    case ValueType::Boolean: return "boolean";
    case ValueType::String: return "string";
    }
    return "?";
}

ValueType Value::type() const {
    if (is_real()) return ValueType::Real;
    if (is_integer()) return ValueType::Integer;
    if (is_boolean()) return ValueType::Boolean;
    return ValueType::String;
}

double Value::as_real() const {
    if (is_real()) return std::get<double>(data_);
    if (is_integer()) return static_cast<double>(std::get<std::int64_t>(data_));
    throw TypeError("value is not numeric (" + to_string(type()) + ")");
}

std::int64_t Value::as_integer() const {
    if (is_integer()) return std::get<std::int64_t>(data_);
    throw TypeError("value is not an integer (" + to_string(type()) + ")");
}

bool Value::as_boolean() const {
    if (is_boolean()) return std::get<bool>(data_);
    throw TypeError("value is not a boolean (" + to_string(type()) + ")");
}

const std::string& Value::as_string() const {
    if (is_string()) return std::get<std::string>(data_);
    throw TypeError("value is not a string (" + to_string(type()) + ")");
}

Value Value::coerced_to(ValueType target, const std::string& context) const {
    if (type() == target) return *this;
    if (target == ValueType::Real && is_integer()) return Value(as_real());
    throw TypeError(context + ": expected " + to_string(target) + ", got " + to_string(type()));
}

std::string render_real(double v) {
    if (v == 0.0) v = 0.0; // collapse -0.0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::string Value::render() const {
    switch (type()) {
    case ValueType::Real: return render_real(std::get<double>(data_));
    case ValueType::Integer: return std::to_string(std::get<std::int64_t>(data_));
    case ValueType::Boolean: return std::get<bool>(data_) ? "1" : "0";
    case ValueType::String: return std::get<std::string>(data_);
    }
    return "";
}

} // namespace coswap
