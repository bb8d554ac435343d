#pragma once

// Problem instances: weighted undirected graphs with two terminals, plus the
// classical shortest-path oracles used to certify the physics-based solvers.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memswarm {

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct EdgeSpec {
    std::string u;
    std::string v;
    double length = 1.0;
};

struct Edge {
    NodeId u = 0;
    NodeId v = 0;
    double length = 1.0;
    EdgeId id = 0;

    NodeId opposite(NodeId n) const noexcept { return n == u ? v : u; }
    bool touches(NodeId n) const noexcept { return n == u || n == v; }
};

/// Immutable, validated problem instance. Edge ids are dense and follow the
/// input order; parallel edges are allowed, self-loops are not.
class Graph {
public:
    /// Nodes are taken from the edge list in first-appearance order.
    static Graph build(std::span<const EdgeSpec> edges, std::string_view source,
                       std::string_view target);

    /// Explicit node list; every endpoint and terminal must appear in it.
    static Graph build(std::span<const std::string> nodes, std::span<const EdgeSpec> edges,
                       std::string_view source, std::string_view target);

    std::size_t node_count() const noexcept { return names_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const std::vector<std::string>& node_names() const noexcept { return names_; }
    const std::string& node_name(NodeId n) const { return names_.at(n); }
    std::optional<NodeId> find_node(std::string_view name) const;

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }

    /// Incident edge ids in ascending order.
    std::span<const EdgeId> incident_edges(NodeId n) const { return adjacency_.at(n); }

    NodeId source() const noexcept { return source_; }
    NodeId target() const noexcept { return target_; }

private:
    Graph() = default;

    std::vector<std::string> names_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> adjacency_;
    NodeId source_ = 0;
    NodeId target_ = 0;
};

struct Path {
    std::vector<EdgeId> edges;
    double total_length = 0.0;

    bool operator==(const Path& other) const { return edges == other.edges; }
};

/// Builds a Path with its length summed in path order.
Path make_path(const Graph& g, std::vector<EdgeId> edges);

/// Contiguity, simplicity and endpoint check for a source-to-target path.
bool is_simple_terminal_path(const Graph& g, const Path& p);

/// Minimum-length simple path; ties go to the lexicographically smallest
/// edge id sequence.
Path shortest_path_oracle(const Graph& g);

/// Every simple source-to-target path, sorted by (total_length, edge ids).
/// Throws PathBudgetExceeded when more than `max_paths` exist.
std::vector<Path> enumerate_simple_paths(const Graph& g, std::size_t max_paths);

/// Unweighted BFS hop counts; unreachable nodes get SIZE_MAX.
std::vector<std::size_t> hop_distances(const Graph& g, NodeId from);

/// Walks from the source, always taking the incident edge to an unvisited node
/// with the largest value (ties: lowest edge id). Throws NoPathExtractable on a
/// dead end.
Path greedy_max_walk(const Graph& g, std::span<const double> edge_values);

/// Keeps edges with value >= theta * max(value). Returns the unique simple
/// terminal path inside that set when there is exactly one, otherwise falls
/// back to greedy_max_walk.
Path threshold_readout(const Graph& g, std::span<const double> edge_values, double theta);

/// If the graph is a bundle of internally disjoint source-target paths that
/// together use every edge exactly once, returns those paths in edge-id order.
std::optional<std::vector<Path>> parallel_path_decomposition(const Graph& g);

}  // namespace memswarm
