#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coswap/value.hpp"

namespace coswap {

enum class Causality { Input, Output, Parameter };

struct VariableInfo {
    std::string name;
    ValueType type = ValueType::Real;
    Causality causality = Causality::Input;
    std::optional<Value> start;
    // Whether this output depends directly on current inputs (same step).
    // Only meaningful for outputs; used for initialization ordering.
    bool direct_feedthrough = true;
};

struct ModelDescription {
    std::string model_name;
    std::vector<VariableInfo> variables;

    const VariableInfo* find(const std::string& name) const {
        for (const auto& v : variables)
            if (v.name == name) return &v;
        return nullptr;
    }

    std::vector<const VariableInfo*> of_causality(Causality c) const {
        std::vector<const VariableInfo*> out;
        for (const auto& v : variables)
            if (v.causality == c) out.push_back(&v);
        return out;
    }
};

} // namespace coswap
