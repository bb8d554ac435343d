#include "memswarm/graph.hpp"

#include "memswarm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>

namespace memswarm {

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

bool reaches(const std::vector<std::vector<EdgeId>>& adjacency, const std::vector<Edge>& edges,
             NodeId from, NodeId to) {
    std::vector<bool> seen(adjacency.size(), false);
    std::vector<NodeId> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        const NodeId n = stack.back();
        stack.pop_back();
        if (n == to) return true;
        for (EdgeId e : adjacency[n]) {
            const NodeId m = edges[e].opposite(n);
            if (!seen[m]) {
                seen[m] = true;
                stack.push_back(m);
            }
        }
    }
    return false;
}

}  // namespace

Graph Graph::build(std::span<const EdgeSpec> edges, std::string_view source,
                   std::string_view target) {
    std::vector<std::string> names;
    std::unordered_map<std::string, NodeId> seen;
    for (const auto& spec : edges) {
        for (const auto* name : {&spec.u, &spec.v}) {
            if (seen.emplace(*name, names.size()).second) names.push_back(*name);
        }
    }
    // Terminals that never appear in an edge cannot be connected.
    for (auto terminal : {source, target}) {
        if (!seen.contains(std::string(terminal))) {
            throw Error(ErrorCode::DisconnectedTerminals,
                        "terminal '" + std::string(terminal) + "' is not incident to any edge");
        }
    }
    return build(names, edges, source, target);
}

Graph Graph::build(std::span<const std::string> nodes, std::span<const EdgeSpec> edges,
                   std::string_view source, std::string_view target) {
    Graph g;
    std::unordered_map<std::string, NodeId> index;
    for (const auto& name : nodes) {
        if (index.emplace(name, g.names_.size()).second) g.names_.push_back(name);
    }
    auto lookup = [&](std::string_view name, ErrorCode code) {
        auto it = index.find(std::string(name));
        if (it == index.end()) throw Error(code, "unknown node '" + std::string(name) + "'");
        return it->second;
    };

    g.source_ = lookup(source, ErrorCode::UnknownTerminal);
    g.target_ = lookup(target, ErrorCode::UnknownTerminal);
    if (g.source_ == g.target_) {
        throw Error(ErrorCode::IdenticalTerminals, "source and target are both '" +
                                                       std::string(source) + "'");
    }

    g.adjacency_.resize(g.names_.size());
    g.edges_.reserve(edges.size());
    for (const auto& spec : edges) {
        const EdgeId id = g.edges_.size();
        if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
            throw Error(ErrorCode::NonPositiveLength,
                        "edge " + std::to_string(id) + " has length " + std::to_string(spec.length));
        }
        const NodeId u = lookup(spec.u, ErrorCode::UnknownNode);
        const NodeId v = lookup(spec.v, ErrorCode::UnknownNode);
        if (u == v) {
            throw Error(ErrorCode::SelfLoop, "edge " + std::to_string(id) + " loops on '" + spec.u + "'");
        }
        g.edges_.push_back(Edge{u, v, spec.length, id});
        g.adjacency_[u].push_back(id);
        g.adjacency_[v].push_back(id);
    }

    if (!reaches(g.adjacency_, g.edges_, g.source_, g.target_)) {
        throw Error(ErrorCode::DisconnectedTerminals,
                    "no path between '" + std::string(source) + "' and '" + std::string(target) + "'");
    }
    return g;
}

std::optional<NodeId> Graph::find_node(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
}

Path make_path(const Graph& g, std::vector<EdgeId> edges) {
    Path p;
    for (EdgeId e : edges) p.total_length += g.edge(e).length;
    p.edges = std::move(edges);
    return p;
}

bool is_simple_terminal_path(const Graph& g, const Path& p) {
    if (p.edges.empty()) return false;
    std::vector<bool> visited(g.node_count(), false);
    NodeId at = g.source();
    visited[at] = true;
    double length = 0.0;
    for (EdgeId e : p.edges) {
        if (e >= g.edge_count()) return false;
        const Edge& edge = g.edge(e);
        if (!edge.touches(at)) return false;
        at = edge.opposite(at);
        if (visited[at]) return false;
        visited[at] = true;
        length += edge.length;
    }
    return at == g.target() && length == p.total_length;
}

Path shortest_path_oracle(const Graph& g) {
    // Dijkstra from the target gives the remaining distance at every node; a
    // forward walk that always takes the lowest-id tight edge then yields the
    // lexicographically smallest shortest path.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.node_count(), inf);
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[g.target()] = 0.0;
    queue.emplace(0.0, g.target());
    while (!queue.empty()) {
        auto [d, n] = queue.top();
        queue.pop();
        if (d > dist[n]) continue;
        for (EdgeId e : g.incident_edges(n)) {
            const Edge& edge = g.edge(e);
            const NodeId m = edge.opposite(n);
            const double candidate = d + edge.length;
            if (candidate < dist[m]) {
                dist[m] = candidate;
                queue.emplace(candidate, m);
            }
        }
    }

    std::vector<EdgeId> edges;
    NodeId at = g.source();
    while (at != g.target()) {
        const double slack = 1e-12 * std::max(1.0, dist[at]);
        std::optional<EdgeId> next;
        for (EdgeId e : g.incident_edges(at)) {
            const Edge& edge = g.edge(e);
            if (edge.length + dist[edge.opposite(at)] <= dist[at] + slack) {
                next = e;
                break;
            }
        }
        // Positive lengths make dist strictly decrease along tight edges.
        at = g.edge(*next).opposite(at);
        edges.push_back(*next);
    }
    return make_path(g, std::move(edges));
}

std::vector<Path> enumerate_simple_paths(const Graph& g, std::size_t max_paths) {
    std::vector<Path> paths;
    std::vector<bool> visited(g.node_count(), false);
    std::vector<EdgeId> current;

    std::function<void(NodeId)> visit = [&](NodeId at) {
        if (at == g.target()) {
            if (paths.size() == max_paths) {
                throw Error(ErrorCode::PathBudgetExceeded,
                            "more than " + std::to_string(max_paths) + " simple paths");
            }
            paths.push_back(make_path(g, current));
            return;
        }
        for (EdgeId e : g.incident_edges(at)) {
            const NodeId next = g.edge(e).opposite(at);
            if (visited[next]) continue;
            visited[next] = true;
            current.push_back(e);
            visit(next);
            current.pop_back();
            visited[next] = false;
        }
    };
    visited[g.source()] = true;
    visit(g.source());

    std::sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) {
        if (a.total_length != b.total_length) return a.total_length < b.total_length;
        return a.edges < b.edges;
    });
    return paths;
}

std::vector<std::size_t> hop_distances(const Graph& g, NodeId from) {
    std::vector<std::size_t> hops(g.node_count(), kUnreachable);
    std::queue<NodeId> queue;
    hops[from] = 0;
    queue.push(from);
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop();
        for (EdgeId e : g.incident_edges(n)) {
            const NodeId m = g.edge(e).opposite(n);
            if (hops[m] == kUnreachable) {
                hops[m] = hops[n] + 1;
                queue.push(m);
            }
        }
    }
    return hops;
}

Path greedy_max_walk(const Graph& g, std::span<const double> edge_values) {
    if (edge_values.size() != g.edge_count()) {
        throw Error(ErrorCode::InvalidParameter, "edge value count does not match edge count");
    }
    std::vector<bool> visited(g.node_count(), false);
    std::vector<EdgeId> edges;
    NodeId at = g.source();
    visited[at] = true;
    while (at != g.target()) {
        std::optional<EdgeId> best;
        for (EdgeId e : g.incident_edges(at)) {
            if (visited[g.edge(e).opposite(at)]) continue;
            if (!best || edge_values[e] > edge_values[*best]) best = e;
        }
        if (!best) {
            throw Error(ErrorCode::NoPathExtractable,
                        "greedy walk dead-ended at node '" + g.node_name(at) + "'");
        }
        edges.push_back(*best);
        at = g.edge(*best).opposite(at);
        visited[at] = true;
    }
    return make_path(g, std::move(edges));
}

Path threshold_readout(const Graph& g, std::span<const double> edge_values, double theta) {
    if (edge_values.size() != g.edge_count()) {
        throw Error(ErrorCode::InvalidParameter, "edge value count does not match edge count");
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "readout threshold must lie in (0, 1)");
    }
    const double peak = *std::max_element(edge_values.begin(), edge_values.end());
    std::vector<bool> selected(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) selected[e] = edge_values[e] >= theta * peak;

    // Count simple paths inside the selected subgraph, stopping at two.
    std::vector<Path> found;
    std::vector<bool> visited(g.node_count(), false);
    std::vector<EdgeId> current;
    std::function<void(NodeId)> visit = [&](NodeId at) {
        if (found.size() > 1) return;
        if (at == g.target()) {
            found.push_back(make_path(g, current));
            return;
        }
        for (EdgeId e : g.incident_edges(at)) {
            if (!selected[e]) continue;
            const NodeId next = g.edge(e).opposite(at);
            if (visited[next]) continue;
            visited[next] = true;
            current.push_back(e);
            visit(next);
            current.pop_back();
            visited[next] = false;
        }
    };
    visited[g.source()] = true;
    visit(g.source());

    if (found.size() == 1) return found.front();
    return greedy_max_walk(g, edge_values);
}

std::optional<std::vector<Path>> parallel_path_decomposition(const Graph& g) {
    for (NodeId n = 0; n < g.node_count(); ++n) {
        if (n == g.source() || n == g.target()) continue;
        const auto degree = g.incident_edges(n).size();
        if (degree != 0 && degree != 2) return std::nullopt;
    }
    std::vector<bool> used(g.edge_count(), false);
    std::vector<Path> paths;
    for (EdgeId first : g.incident_edges(g.source())) {
        if (used[first]) return std::nullopt;
        std::vector<EdgeId> edges{first};
        used[first] = true;
        NodeId at = g.edge(first).opposite(g.source());
        while (at != g.target()) {
            if (at == g.source()) return std::nullopt;
            const auto incident = g.incident_edges(at);
            const EdgeId next = incident[0] == edges.back() ? incident[1] : incident[0];
            if (used[next]) return std::nullopt;
            used[next] = true;
            edges.push_back(next);
            at = g.edge(next).opposite(at);
        }
        paths.push_back(make_path(g, std::move(edges)));
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) return std::nullopt;
    return paths;
}

}  // namespace memswarm
