#pragma once

// Randomized invariant checks shared by the unit suite and the acceptance
// runner. Every check draws its own instance from `rng` and returns a failure
// description, or nothing when the invariant held.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "memswarm/aco.hpp"
#include "memswarm/errors.hpp"
#include "memswarm/graph.hpp"
#include "memswarm/memnet.hpp"
#include "oracles.hpp"

namespace properties {

using Failure = std::optional<std::string>;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline memswarm::DeviceParams random_device(std::mt19937_64& rng, double source_current) {
    memswarm::DeviceParams p;
    p.sigma_off = std::pow(10.0, uniform(rng, -6.0, -3.0));
    p.sigma_on = p.sigma_off * std::pow(10.0, uniform(rng, 0.3, 3.0));
    p.kappa = uniform(rng, 0.1, 10.0);
    p.relaxation = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.01, 1.0);
    p.threshold_current = uniform(rng, 0.0, 1.0) < 0.5 ? 0.0 : uniform(rng, 0.0, 0.5 * source_current);
    return p;
}

inline std::vector<double> random_states(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) {
        const double r = uniform(rng, 0.0, 1.0);
        v = r < 0.1 ? 0.0 : (r < 0.2 ? 1.0 : uniform(rng, 0.0, 1.0));
    }
    return x;
}

/// Normalization, nonnegativity and uniform-scaling invariance of the move
/// distribution, against a direct evaluation of the weights.
inline Failure check_transition(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 8, 8, 5);
    PheromoneState ph{std::vector<double>(g.edge_count())};
    for (auto& t : ph.tau) t = uniform(rng, 0.0, 1.0) < 0.15 ? 0.0 : uniform(rng, 0.0, 5.0);
    AcoParams params;
    params.pheromone_exponent = uniform(rng, 0.0, 3.0);
    params.visibility_exponent = uniform(rng, 0.0, 3.0);
    const NodeId current = std::uniform_int_distribution<NodeId>(0, g.node_count() - 1)(rng);
    std::vector<bool> forbidden(g.node_count());
    for (std::size_t n = 0; n < forbidden.size(); ++n) forbidden[n] = uniform(rng, 0.0, 1.0) < 0.3;
    forbidden[current] = true;

    std::vector<EdgeId> allowed;
    for (EdgeId e : g.incident_edges(current)) {
        if (!forbidden[g.edge(e).opposite(current)]) allowed.push_back(e);
    }
    if (allowed.empty()) {
        try {
            transition_probabilities(g, ph, params, current, forbidden);
        } catch (const Error& err) {
            if (err.code() == ErrorCode::NoAllowableMove) return std::nullopt;
            return std::string("wrong error code for a move with no allowable edge");
        }
        return std::string("no error for a move with no allowable edge");
    }

    const auto dist = transition_probabilities(g, ph, params, current, forbidden);
    if (dist.edges != allowed) return std::string("allowable edge set differs");
    std::vector<double> w(allowed.size());
    double total = 0.0;
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        const Edge& e = g.edge(allowed[i]);
        w[i] = std::pow(ph.tau[e.id], params.pheromone_exponent) *
               std::pow(1.0 / e.length, params.visibility_exponent);
        total += w[i];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        const double p = dist.probabilities[i];
        if (!(p >= 0.0)) return std::string("negative probability");
        const double expected = total > 0.0 ? w[i] / total : 1.0 / static_cast<double>(allowed.size());
        if (std::abs(p - expected) > 1e-12) return std::string("probability differs from weight ratio");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) return std::string("probabilities do not sum to one");

    const double c = std::pow(10.0, uniform(rng, -3.0, 3.0));
    PheromoneState scaled = ph;
    for (auto& t : scaled.tau) t *= c;
    const auto rescaled = transition_probabilities(g, scaled, params, current, forbidden);
    for (std::size_t i = 0; i < allowed.size(); ++i) {
        if (std::abs(rescaled.probabilities[i] - dist.probabilities[i]) > 1e-12) {
            return std::string("probabilities change under uniform pheromone scaling");
        }
    }
    return std::nullopt;
}

/// tau stays nonnegative and follows (1 - rho) tau + Q / L on the path.
inline Failure check_pheromone_update(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 8, 6, 5);
    AcoParams params;
    const double r = uniform(rng, 0.0, 1.0);
    params.evaporation = r < 0.1 ? 0.0 : (r < 0.2 ? 1.0 : uniform(rng, 0.0, 1.0));
    params.deposit = uniform(rng, 0.0, 1.0) < 0.1 ? 0.0 : uniform(rng, 0.0, 2.0);
    PheromoneState ph{std::vector<double>(g.edge_count())};
    for (auto& t : ph.tau) t = uniform(rng, 0.0, 1.0) < 0.2 ? 0.0 : uniform(rng, 0.0, 5.0);

    std::optional<Path> path;
    if (uniform(rng, 0.0, 1.0) < 0.8) path = shortest_path_oracle(g);
    const auto next = deposit_and_evaporate(ph, path, params);
    std::vector<double> expected(ph.tau.size());
    for (std::size_t e = 0; e < expected.size(); ++e) expected[e] = (1.0 - params.evaporation) * ph.tau[e];
    if (path) {
        for (EdgeId e : path->edges) expected[e] += params.deposit / path->total_length;
    }
    for (std::size_t e = 0; e < expected.size(); ++e) {
        if (!(next.tau[e] >= 0.0)) return std::string("negative pheromone");
        if (std::abs(next.tau[e] - expected[e]) > 1e-12 * (1.0 + expected[e])) {
            return std::string("pheromone update differs from the recursion");
        }
    }
    return std::nullopt;
}

/// KCL at every node and terminal, and power balance sum sigma dV^2 = I0 V_A.
inline Failure check_operating_point(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 9, 8, 3);
    const double i0 = uniform(rng, 1e-3, 0.2);
    const DeviceParams p = random_device(rng, i0);
    const CompileMode mode = uniform(rng, 0.0, 1.0) < 0.5 ? CompileMode::chain : CompileMode::lumped;
    const Network net = graph_to_network(g, p, mode, i0);
    const auto x = random_states(rng, net.branches.size());
    const OperatingPoint op = solve_dc(net, x);

    std::vector<double> net_out(net.node_count, 0.0);
    double power = 0.0;
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const Branch& br = net.branches[b];
        const double dv = op.node_voltages[br.from] - op.node_voltages[br.to];
        const double sigma = br.conductance(x[b]);
        if (std::abs(op.branch_currents[b] - sigma * dv) > 1e-12 * i0) return std::string("branch current is not sigma * dV");
        net_out[br.from] += op.branch_currents[b];
        net_out[br.to] -= op.branch_currents[b];
        power += sigma * dv * dv;
    }
    const double tol = 1e-10 * i0;
    for (std::size_t n = 0; n < net.node_count; ++n) {
        double expected = 0.0;
        if (n == net.terminal_a) expected = i0;
        if (n == net.terminal_b) expected = -i0;
        if (std::abs(net_out[n] - expected) >= tol) {
            std::ostringstream msg;
            msg << "KCL residual " << std::abs(net_out[n] - expected) << " at node " << n;
            return msg.str();
        }
    }
    const double delivered = i0 * op.node_voltages[net.terminal_a];
    if (!(power >= 0.0) || std::abs(power - delivered) > 1e-9 * std::abs(delivered)) {
        return std::string("dissipated power differs from I0 * V_A");
    }
    return std::nullopt;
}

/// 0 <= x <= 1 and sigma_off/n <= sigma <= sigma_on/n at every sample, with
/// drives strong enough to push states into both bounds.
inline Failure check_state_bounds(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 7, 6, 3);
    const double i0 = uniform(rng, 1e-3, 0.5);
    const DeviceParams p = random_device(rng, i0);
    const Network net = graph_to_network(g, p, CompileMode::lumped, i0);
    SimulationOptions options;
    options.t_end = 5.0;
    options.dt = 0.5;
    options.record_every = 1;
    options.initial_states = random_states(rng, net.branches.size());
    const auto sim = simulate(net, options);

    const auto& traj = sim.trajectory;
    const std::size_t edges = g.edge_count();
    const std::size_t branches = net.branches.size();
    for (const auto& row : traj.rows) {
        for (std::size_t e = 0; e < edges; ++e) {
            if (!(row[1 + e] >= 0.0 && row[1 + e] <= 1.0)) return std::string("state left [0, 1]");
        }
        for (std::size_t b = 0; b < branches; ++b) {
            const double sigma = row[1 + edges + branches + b];
            const Branch& br = net.branches[b];
            if (sigma < br.sigma_off() * (1.0 - 1e-12) || sigma > br.sigma_on() * (1.0 + 1e-12)) {
                return std::string("conductance outside its limits");
            }
        }
    }
    for (double v : sim.final_states) {
        if (!(v >= 0.0 && v <= 1.0)) return std::string("final state left [0, 1]");
    }
    return std::nullopt;
}

/// Series chains and their lumped equivalents evolve identically per edge.
/// Tied routes sit on an unstable symmetric solution whose growth rate is
/// roughly kappa * I0 * (sigma_on / sigma_off) / 4; the 1-ulp difference
/// between sigma/n and n series devices grows like exp(rate * t). The device
/// draw keeps rate * t_end small enough for a 1e-9 comparison to be meaningful.
inline Failure check_chain_lumped(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 6, 5, 3);
    const double i0 = uniform(rng, 1e-3, 0.2);
    DeviceParams p = random_device(rng, i0);
    p.kappa = uniform(rng, 0.1, 2.0);
    p.sigma_on = p.sigma_off * uniform(rng, 2.0, 30.0);
    const Network chain = graph_to_network(g, p, CompileMode::chain, i0);
    const Network lumped = graph_to_network(g, p, CompileMode::lumped, i0);
    SimulationOptions options;
    options.t_end = 2.0;
    options.dt = 0.2;
    options.record_every = 1;
    const auto a = simulate(chain, options);
    const auto b = simulate(lumped, options);
    if (a.trajectory.size() != b.trajectory.size()) return std::string("trajectory lengths differ");
    for (std::size_t row = 0; row < a.trajectory.size(); ++row) {
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            if (std::abs(a.trajectory.rows[row][1 + e] - b.trajectory.rows[row][1 + e]) >= 1e-9) {
                return std::string("chain and lumped states differ");
            }
        }
    }
    return std::nullopt;
}

/// Same seed gives bitwise-identical colony output whatever the thread count.
inline Failure check_seed_determinism(std::mt19937_64& rng) {
    using namespace memswarm;
    const Graph g = oracles::random_graph(rng, 6, 5, 4);
    AcoParams params;
    params.evaporation = uniform(rng, 0.0, 0.5);
    params.deposit = uniform(rng, 0.0, 2.0);
    params.initial_pheromone = uniform(rng, 0.1, 2.0);
    ColonyRunSpec spec;
    spec.n_ants = 6;
    spec.n_realizations = 3;
    spec.seed = rng();
    spec.record_every = 2;
    spec.threads = 1;
    const auto a = run_colony(g, params, spec);
    spec.threads = 2;
    const auto b = run_colony(g, params, spec);
    if (a.mean.rows != b.mean.rows || a.discarded_ants != b.discarded_ants) {
        return std::string("colony output depends on the thread count");
    }
    for (std::size_t r = 0; r < a.final_states.size(); ++r) {
        if (a.final_states[r].tau != b.final_states[r].tau) return std::string("final states differ");
        for (double t : a.final_states[r].tau) {
            if (!(t >= 0.0)) return std::string("negative pheromone in a colony run");
        }
    }
    return std::nullopt;
}

struct NamedCheck {
    const char* name;
    Failure (*run)(std::mt19937_64&);
};

inline const std::vector<NamedCheck>& all_checks() {
    static const std::vector<NamedCheck> checks{
        {"normalization", check_transition},
        {"pheromone nonnegativity", check_pheromone_update},
        {"KCL and passivity", check_operating_point},
        {"state and conductance bounds", check_state_bounds},
        {"chain/lumped equivalence", check_chain_lumped},
        {"seed determinism", check_seed_determinism},
    };
    return checks;
}

/// Oracle against exhaustive enumeration; nothing when the graph has more
/// than `max_paths` simple paths.
inline Failure check_oracle_equivalence(const memswarm::Graph& g, std::size_t max_paths, bool& counted) {
    using namespace memswarm;
    counted = false;
    std::vector<Path> all;
    try {
        all = enumerate_simple_paths(g, max_paths);
    } catch (const Error& err) {
        if (err.code() == ErrorCode::PathBudgetExceeded) return std::nullopt;
        throw;
    }
    counted = true;
    const Path oracle = shortest_path_oracle(g);
    if (!is_simple_terminal_path(g, oracle)) return std::string("oracle returned an invalid path");
    double best = all.front().total_length;
    for (const auto& p : all) {
        if (!is_simple_terminal_path(g, p)) return std::string("enumeration returned an invalid path");
        best = std::min(best, p.total_length);
    }
    if (oracle.total_length != best) return std::string("oracle length differs from the enumerated minimum");
    if (oracle.edges != all.front().edges) return std::string("oracle tie-break differs from the enumeration order");
    return std::nullopt;
}

/// Random instance for the oracle check; integer lengths make ties common.
inline memswarm::Graph random_oracle_graph(std::mt19937_64& rng) {
    if (uniform(rng, 0.0, 1.0) < 0.7) return oracles::random_graph(rng, 8, 6, 3);
    const memswarm::Graph base = oracles::random_graph(rng, 8, 6, 3);
    std::vector<memswarm::EdgeSpec> edges;
    for (const auto& e : base.edges()) {
        edges.push_back({base.node_name(e.u), base.node_name(e.v), uniform(rng, 0.1, 3.0)});
    }
    return memswarm::Graph::build(base.node_names(), edges, base.node_name(base.source()),
                                  base.node_name(base.target()));
}

}  // namespace properties
