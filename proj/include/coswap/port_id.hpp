#pragma once

#include <string>

namespace coswap {

// Identifier of a unit port in the multi-model format.
// Serialized form: {key}.instance.variable
struct PortId {
    std::string instance_key;  // the {xN} key, braces stripped
    std::string instance_name;
    std::string variable;

    std::string str() const { return "{" + instance_key + "}." + instance_name + "." + variable; }

    // "instance.variable" — the form used in condition scopes.
    std::string scope_key() const { return instance_name + "." + variable; }

    bool operator==(const PortId&) const = default;
    // Ordering on the serialized form; keeps graph walks and log columns stable.
    auto operator<=>(const PortId& other) const { return str() <=> other.str(); }
};

// Parse "{key}.instance.variable". Throws ParseError on missing braces,
// wrong component count or malformed identifiers.
PortId parse_port_id(const std::string& s);

// Identifier: [A-Za-z_][A-Za-z0-9_]*
bool is_identifier(const std::string& s);

} // namespace coswap
