#include <catch_amalgamated.hpp>

#include "memswarm/errors.hpp"
#include "memswarm/graph.hpp"
#include "memswarm/memnet.hpp"

#include <array>
#include <vector>

using namespace memswarm;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& err) {
        return err.code();
    }
    FAIL("expected an exception");
    return ErrorCode::InvalidParameter;
}

}  // namespace

TEST_CASE("build_graph keeps input order and dense edge ids", "[graph]") {
    const std::array<EdgeSpec, 2> edges{{{"A", "B", 1.0}, {"A", "B", 2.0}}};
    const Graph g = Graph::build(edges, "A", "B");
    REQUIRE(g.edge_count() == 2);
    REQUIRE(g.node_count() == 2);
    CHECK(g.edge(0).length == 1.0);
    CHECK(g.edge(1).length == 2.0);
    CHECK(g.edge(1).id == 1);
    CHECK(g.node_name(g.source()) == "A");
    CHECK(g.node_name(g.target()) == "B");
}

TEST_CASE("build_graph accepts a single edge", "[graph]") {
    const std::array<EdgeSpec, 1> edges{{{"A", "B", 1.0}}};
    const Graph g = Graph::build(edges, "A", "B");
    CHECK(g.edge_count() == 1);
    CHECK(shortest_path_oracle(g).edges == std::vector<EdgeId>{0});
}

TEST_CASE("build_graph rejects invalid instances", "[graph][errors]") {
    const std::array<EdgeSpec, 1> missing_target{{{"A", "C", 1.0}}};
    CHECK(code_of([&] { Graph::build(missing_target, "A", "B"); }) == ErrorCode::DisconnectedTerminals);

    const std::array<EdgeSpec, 1> zero{{{"A", "B", 0.0}}};
    CHECK(code_of([&] { Graph::build(zero, "A", "B"); }) == ErrorCode::NonPositiveLength);

    const std::array<EdgeSpec, 1> negative{{{"A", "B", -1.0}}};
    CHECK(code_of([&] { Graph::build(negative, "A", "B"); }) == ErrorCode::NonPositiveLength);

    const std::array<EdgeSpec, 2> loop{{{"A", "B", 1.0}, {"B", "B", 1.0}}};
    CHECK(code_of([&] { Graph::build(loop, "A", "B"); }) == ErrorCode::SelfLoop);

    const std::array<EdgeSpec, 2> split{{{"A", "C", 1.0}, {"B", "D", 1.0}}};
    CHECK(code_of([&] { Graph::build(split, "A", "B"); }) == ErrorCode::DisconnectedTerminals);

    const std::vector<std::string> nodes{"A", "B"};
    const std::array<EdgeSpec, 1> ab{{{"A", "B", 1.0}}};
    CHECK(code_of([&] { Graph::build(nodes, ab, "A", "Z"); }) == ErrorCode::UnknownTerminal);
    CHECK(code_of([&] { Graph::build(nodes, ab, "A", "A"); }) == ErrorCode::IdenticalTerminals);

    const std::array<EdgeSpec, 1> stray{{{"A", "Q", 1.0}}};
    CHECK(code_of([&] { Graph::build(nodes, stray, "A", "B"); }) == ErrorCode::UnknownNode);
}

TEST_CASE("shortest_path_oracle picks the shorter parallel edge", "[graph][oracle]") {
    const Graph g = preset_two_path_graph();
    const Path p = shortest_path_oracle(g);
    CHECK(p.edges == std::vector<EdgeId>{0});
    CHECK(p.total_length == 1.0);
}

TEST_CASE("shortest_path_oracle breaks ties by lowest edge id sequence", "[graph][oracle]") {
    const std::array<EdgeSpec, 2> equal{{{"A", "B", 1.0}, {"A", "B", 1.0}}};
    CHECK(shortest_path_oracle(Graph::build(equal, "A", "B")).edges == std::vector<EdgeId>{0});

    // Two length-2 routes: via X uses edges (2, 3), via Y uses (0, 1).
    const std::array<EdgeSpec, 4> routes{{{"A", "Y", 1.0}, {"Y", "B", 1.0}, {"A", "X", 1.0}, {"X", "B", 1.0}}};
    CHECK(shortest_path_oracle(Graph::build(routes, "A", "B")).edges == std::vector<EdgeId>{0, 1});

    // Equal lengths: [0] sorts before [1, 2].
    const std::array<EdgeSpec, 3> mixed{{{"A", "B", 2.0}, {"A", "M", 1.0}, {"M", "B", 1.0}}};
    CHECK(shortest_path_oracle(Graph::build(mixed, "A", "B")).edges == std::vector<EdgeId>{0});
}

TEST_CASE("multi-path preset: left arm is the unique shortest path", "[graph][oracle]") {
    const Graph g = preset_multipath_graph();
    CHECK(g.edge_count() == 8);
    const Path p = shortest_path_oracle(g);
    CHECK(p.edges == std::vector<EdgeId>{0, 1});
    CHECK(p.total_length == 2.0);
    CHECK(g.node_name(g.edge(0).opposite(g.source())) == "C");
}

TEST_CASE("enumerate_simple_paths lists and sorts every path", "[graph][oracle]") {
    const auto two = enumerate_simple_paths(preset_two_path_graph(), 10);
    REQUIRE(two.size() == 2);
    CHECK(two[0].total_length == 1.0);
    CHECK(two[1].total_length == 2.0);

    const std::array<EdgeSpec, 1> single{{{"A", "B", 3.0}}};
    CHECK(enumerate_simple_paths(Graph::build(single, "A", "B"), 1).size() == 1);

    const Graph multi = preset_multipath_graph();
    const auto all = enumerate_simple_paths(multi, 10);
    REQUIRE(all.size() == 3);
    CHECK(all.front() == shortest_path_oracle(multi));
    CHECK(all[1].edges == std::vector<EdgeId>{2, 3, 4});
    CHECK(all[2].edges == std::vector<EdgeId>{5, 6, 7});
    for (const auto& p : all) CHECK(is_simple_terminal_path(multi, p));
}

TEST_CASE("enumerate_simple_paths enforces its budget", "[graph][errors]") {
    CHECK(code_of([] { enumerate_simple_paths(preset_multipath_graph(), 2); }) ==
          ErrorCode::PathBudgetExceeded);
}

TEST_CASE("path validator rejects broken paths", "[graph]") {
    const Graph g = preset_multipath_graph();
    CHECK_FALSE(is_simple_terminal_path(g, make_path(g, {0})));           // stops early
    CHECK_FALSE(is_simple_terminal_path(g, make_path(g, {1, 0})));        // starts at the wrong end
    CHECK_FALSE(is_simple_terminal_path(g, make_path(g, {0, 3, 4})));     // not contiguous
    CHECK_FALSE(is_simple_terminal_path(g, make_path(g, {})));
    CHECK(is_simple_terminal_path(g, make_path(g, {2, 3, 4})));
}

TEST_CASE("greedy and threshold readouts", "[graph][readout]") {
    const Graph two = preset_two_path_graph();
    const std::vector<double> equal{0.3, 0.3};
    CHECK(greedy_max_walk(two, equal).edges == std::vector<EdgeId>{0});
    CHECK(threshold_readout(two, equal, 0.5).edges == std::vector<EdgeId>{0});
    const std::vector<double> second{0.01, 0.9};
    CHECK(threshold_readout(two, second, 0.5).edges == std::vector<EdgeId>{1});

    const Graph multi = preset_multipath_graph();
    const std::vector<double> left{0.9, 0.9, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
    CHECK(threshold_readout(multi, left, 0.5).edges == std::vector<EdgeId>{0, 1});
    // C's only way on is B, so a tempting first edge does not dead-end.
    const std::vector<double> lure{0.9, 0.0, 0.5, 0.5, 0.5, 0.1, 0.1, 0.1};
    CHECK(greedy_max_walk(multi, lure).edges == std::vector<EdgeId>{0, 1});
}

TEST_CASE("greedy walk reports dead ends", "[graph][readout][errors]") {
    const std::array<EdgeSpec, 3> spur{{{"A", "D", 1.0}, {"A", "B", 1.0}, {"C", "B", 1.0}}};
    const Graph g = Graph::build(spur, "A", "B");
    const std::vector<double> values{1.0, 0.1, 0.1};
    CHECK(code_of([&] { greedy_max_walk(g, values); }) == ErrorCode::NoPathExtractable);
}

TEST_CASE("parallel path decomposition", "[graph]") {
    const auto multi = parallel_path_decomposition(preset_multipath_graph());
    REQUIRE(multi);
    REQUIRE(multi->size() == 3);
    CHECK((*multi)[0].total_length == 2.0);
    CHECK((*multi)[1].total_length == 3.0);

    const std::array<EdgeSpec, 5> bridge{
        {{"A", "C", 1.0}, {"A", "D", 1.0}, {"C", "D", 1.0}, {"C", "B", 1.0}, {"D", "B", 1.0}}};
    CHECK_FALSE(parallel_path_decomposition(Graph::build(bridge, "A", "B")));
}
