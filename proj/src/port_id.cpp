#include "coswap/port_id.hpp"

#include <cctype>

#include "coswap/errors.hpp"

namespace coswap {

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

PortId parse_port_id(const std::string& s) {
    if (s.empty() || s[0] != '{')
        throw ParseError("missing instance key braces in port id '" + s + "'", 0);
    auto close = s.find('}');
    if (close == std::string::npos)
        throw ParseError("missing closing brace in port id '" + s + "'", s.size());
    std::string key = s.substr(1, close - 1);
    if (key.empty()) throw ParseError("empty instance key in port id '" + s + "'", 1);
    if (close + 1 >= s.size() || s[close + 1] != '.')
        throw ParseError("expected '.' after instance key in port id '" + s + "'", close + 1);

    std::string rest = s.substr(close + 2);
    auto dot = rest.find('.');
    if (dot == std::string::npos)
        throw ParseError("port id '" + s + "' needs instance and variable components", close + 2);
    std::string instance = rest.substr(0, dot);
    std::string variable = rest.substr(dot + 1);
    if (variable.find('.') != std::string::npos)
        throw ParseError("too many components in port id '" + s + "'",
                         close + 2 + dot + 1 + variable.find('.'));
    if (!is_identifier(instance))
        throw ParseError("bad instance name '" + instance + "' in port id '" + s + "'", close + 2);
    if (!is_identifier(variable))
        throw ParseError("bad variable name '" + variable + "' in port id '" + s + "'",
                         close + 2 + dot + 1);
    return PortId{key, instance, variable};
}

} // namespace coswap
