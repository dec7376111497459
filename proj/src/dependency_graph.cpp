#include "coswap/dependency_graph.hpp"

#include <algorithm>
#include <sstream>

#include "coswap/errors.hpp"

namespace coswap {

std::string LoopError::message() const {
    std::ostringstream out;
    out << "algebraic loop: ";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (i) out << " -> ";
        out << cycle[i].str();
    }
    return out.str();
}

namespace {

void add_edge(DependencyGraph& g, const PortId& from, const PortId& to) {
    g.nodes.insert(from);
    g.nodes.insert(to);
    g.instances.insert(from.instance_name);
    g.instances.insert(to.instance_name);
    g.edges[from].insert(to);
}

void add_connection_block(DependencyGraph& g,
                          const std::map<PortId, std::vector<PortId>>& block) {
    for (const auto& [source, sinks] : block)
        for (const auto& sink : sinks) add_edge(g, source, sink);
}

} // namespace

DependencyGraph build_port_graph(const MultiModelConfig& cfg, const ModelRegistry& registry) {
    DependencyGraph g;
    add_connection_block(g, cfg.connections);
    for (const auto& [_, entry] : cfg.model_swaps) add_connection_block(g, entry.swap_connections);

    // Feedthrough: input -> output within each instance, for connected ports
    // of outputs that declare direct feedthrough.
    std::map<std::string, std::vector<PortId>> by_instance;
    for (const auto& node : g.nodes) by_instance[node.instance_name].push_back(node);
    for (const auto& [instance, ports] : by_instance) {
        auto key_it = cfg.instance_to_key.find(instance);
        if (key_it == cfg.instance_to_key.end()) continue;
        const ModelDescription* desc =
            registry.describe(model_name_from_unit_value(cfg.units.at(key_it->second)));
        if (!desc) continue;
        for (const auto& in_port : ports) {
            const VariableInfo* in_info = desc->find(in_port.variable);
            if (!in_info || in_info->causality != Causality::Input) continue;
            for (const auto& out_port : ports) {
                const VariableInfo* out_info = desc->find(out_port.variable);
                if (!out_info || out_info->causality != Causality::Output) continue;
                if (out_info->direct_feedthrough) add_edge(g, in_port, out_port);
            }
        }
    }
    return g;
}

DependencyGraph prune_transfer_edges(DependencyGraph graph,
                                     const std::set<std::string>& transfers) {
    for (auto& [_, targets] : graph.edges) {
        for (auto it = targets.begin(); it != targets.end();) {
            if (transfers.count(it->instance_name)) it = targets.erase(it);
            else ++it;
        }
    }
    return graph;
}

bool initialization_order(const DependencyGraph& graph, std::vector<PortId>& order,
                          LoopError& loop) {
    order.clear();
    std::map<PortId, std::size_t> indegree;
    for (const auto& node : graph.nodes) indegree[node] = 0;
    for (const auto& [_, targets] : graph.edges)
        for (const auto& to : targets) ++indegree[to];

    // std::map iteration gives the lexicographic tie-break for free.
    std::set<PortId> ready;
    for (const auto& [node, deg] : indegree)
        if (deg == 0) ready.insert(node);

    while (!ready.empty()) {
        PortId node = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(node);
        auto it = graph.edges.find(node);
        if (it == graph.edges.end()) continue;
        for (const auto& to : it->second) {
            if (--indegree[to] == 0) ready.insert(to);
        }
    }

    if (order.size() == graph.nodes.size()) return true;

    // Remaining nodes are on cycles or downstream of one; peel nodes without
    // a remaining successor until only the cyclic core is left.
    std::set<PortId> remaining;
    for (const auto& [node, deg] : indegree)
        if (deg > 0) remaining.insert(node);

    auto remaining_successor = [&](const PortId& node, PortId& out) {
        auto it = graph.edges.find(node);
        if (it == graph.edges.end()) return false;
        for (const auto& to : it->second) {
            if (remaining.count(to)) {
                out = to;
                return true;
            }
        }
        return false;
    };

    bool peeled = true;
    while (peeled) {
        peeled = false;
        for (auto it = remaining.begin(); it != remaining.end();) {
            PortId unused;
            if (!remaining_successor(*it, unused)) {
                it = remaining.erase(it);
                peeled = true;
            } else {
                ++it;
            }
        }
    }

    std::vector<PortId> path;
    std::map<PortId, std::size_t> visited_at;
    PortId current = *remaining.begin();
    while (visited_at.count(current) == 0) {
        visited_at[current] = path.size();
        path.push_back(current);
        PortId next;
        remaining_successor(current, next);
        current = next;
    }
    loop.cycle.assign(path.begin() + static_cast<long>(visited_at[current]), path.end());
    return false;
}

} // namespace coswap
