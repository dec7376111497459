#pragma once

#include <random>
#include <string>
#include <vector>

#include "coswap/model_config.hpp"

namespace coswap::testing {

// A randomly generated swap-free config with forward-only (hence acyclic)
// wiring. unit_order lists the instances in generation order, which is a
// valid topological order by construction.
struct GeneratedConfig {
    MultiModelConfig config;
    std::vector<std::string> unit_order;
};

GeneratedConfig random_acyclic_config(std::mt19937& rng);

} // namespace coswap::testing
