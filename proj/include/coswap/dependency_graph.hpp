#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "coswap/model_config.hpp"
#include "coswap/port_id.hpp"

namespace coswap {

// Directed graph over connected ports: connection edges (source output ->
// sink input) plus intra-unit feedthrough edges (input -> output) for every
// output declaring direct feedthrough. Used for initialization ordering and
// algebraic-loop detection.
struct DependencyGraph {
    std::set<PortId> nodes;
    std::map<PortId, std::set<PortId>> edges; // from -> to
    std::set<std::string> instances;

    bool has_edge(const PortId& from, const PortId& to) const {
        auto it = edges.find(from);
        return it != edges.end() && it->second.count(to) != 0;
    }
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& [_, to] : edges) n += to.size();
        return n;
    }
};

// Raised data for a detected algebraic loop; carries one witness cycle.
struct LoopError {
    std::vector<PortId> cycle;
    std::string message() const;
};

// Build the port graph for a validated config: one node per connected
// port, connection edges as configured (base connections plus every swap
// entry's swapConnections), and feedthrough edges per the model
// descriptions.
DependencyGraph build_port_graph(const MultiModelConfig& cfg, const ModelRegistry& registry);

// Remove every edge whose sink port belongs to a transferred instance;
// nodes are retained.
DependencyGraph prune_transfer_edges(DependencyGraph graph,
                                     const std::set<std::string>& transfers);

// Kahn topological sort with lexicographic tie-breaking on the serialized
// PortId. Returns the port order, or a LoopError through `loop` when a
// directed cycle exists (algebraic loops are rejected, not iterated).
bool initialization_order(const DependencyGraph& graph, std::vector<PortId>& order,
                          LoopError& loop);

} // namespace coswap
