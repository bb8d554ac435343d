#pragma once

// Memristive network engine: device model, graph-to-circuit compilation,
// nodal DC solves and the coupled state/circuit time stepping.

#include "memswarm/graph.hpp"
#include "memswarm/trajectory.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace memswarm {

/// Current-controlled memristive device with relaxation. A zero threshold
/// selects the threshold-free linear drive.
struct DeviceParams {
    double sigma_on = 0.01;           // S
    double sigma_off = 1e-5;          // S
    double kappa = 1.0;               // 1/(s*A)
    double relaxation = 0.1;          // Gamma, 1/s
    double threshold_current = 0.0;   // I_t, A

    void validate() const;
};

/// sigma(x) = sigma_on * x + sigma_off * (1 - x); throws StateOutOfRange
/// outside [0, 1].
double conductance(const DeviceParams& p, double x);

/// dx/dt for branch current I: -Gamma*x below threshold, otherwise
/// sgn(I)*kappa*(|I| - I_t) - Gamma*x.
double state_derivative(const DeviceParams& p, double x, double current);

enum class CompileMode { chain, lumped };

struct Branch {
    NodeId from = 0;  // current along from -> to is positive
    NodeId to = 0;
    DeviceParams device;
    /// Series length n: n unit devices in chain mode (always 1 per branch there),
    /// the edge length in lumped mode.
    double multiplicity = 1.0;
    EdgeId edge = 0;

    double sigma_on() const noexcept { return device.sigma_on / multiplicity; }
    double sigma_off() const noexcept { return device.sigma_off / multiplicity; }
    double conductance(double x) const { return memswarm::conductance(device, x) / multiplicity; }
};

/// Compiled circuit. Node ids below graph.node_count() are the graph's nodes;
/// chain mode appends internal nodes after them.
struct Network {
    Graph graph;
    CompileMode mode = CompileMode::lumped;
    std::vector<Branch> branches;
    std::size_t node_count = 0;
    NodeId terminal_a = 0;
    NodeId terminal_b = 0;
    double source_current = 0.0;  // I0, injected at A and extracted at B
    std::vector<std::vector<std::size_t>> edge_branches;
    /// Row in the reduced nodal system, or -1 for ground and floating nodes.
    std::vector<std::ptrdiff_t> unknown_index;
    std::size_t unknown_count = 0;
};

/// Chain mode turns an edge of integer length n into n series unit devices;
/// lumped mode uses one branch with limits scaled by 1/n and a shared state.
/// Branches are oriented from the A side to the B side.
Network graph_to_network(const Graph& g, const DeviceParams& p, CompileMode mode, double source_current);

struct OperatingPoint {
    std::vector<double> node_voltages;  // V, ground at terminal B
    std::vector<double> branch_currents;  // A, signed along branch orientation
    std::vector<double> branch_conductances;  // S
};

/// Nodal analysis on the conductance Laplacian with B eliminated. Nodes not
/// connected to B float at 0 V and carry no current.
OperatingPoint solve_dc(const Network& net, std::span<const double> branch_states);

/// Per-branch dx/dt at the operating point of `branch_states`, with the
/// outward component zeroed at the [0, 1] bounds.
std::vector<double> state_rates(const Network& net, std::span<const double> branch_states);

/// One RK4 step; every stage re-solves the circuit. Result is clamped to [0, 1].
std::vector<double> step(const Network& net, std::span<const double> branch_states, double dt);

struct SimulationOptions {
    double t_end = 200.0;
    double dt = 1e-3;
    std::size_t record_every = 1000;
    /// Stop once max |dx/dt| drops below steady_tolerance.
    bool stop_at_steady_state = false;
    double steady_tolerance = 1e-9;
    /// Empty means every device starts in the off state (x = 0).
    std::vector<double> initial_states;
};

struct SimulationResult {
    /// Columns: t, x_e*, I_b*, sigma_b*.
    Trajectory trajectory;
    std::vector<double> final_states;       // per branch
    std::vector<double> final_edge_states;  // per graph edge
    double final_time = 0.0;
    std::size_t steps_taken = 0;
    /// Times a state left [0, 1] and had to be clamped.
    std::size_t clamp_events = 0;
    bool reached_steady_state = false;
};

SimulationResult simulate(const Network& net, const SimulationOptions& options);

/// Mean state of each edge's branches.
std::vector<double> edge_states(const Network& net, std::span<const double> branch_states);

struct TwoPathSteadyState {
    double drive = 0.0;  // C = kappa * I0 * (sigma_on/sigma_off - 1)
    double sigma_tilde_1 = 0.0;
    double sigma_tilde_2 = 0.0;
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Closed-form steady state of the threshold-free two-path network with
/// L2 = 2 L1, in normalized conductance sigma / sigma_off.
TwoPathSteadyState memristive_two_path_steady_state(const DeviceParams& p, double source_current);

/// Normalized conductance back to the internal state.
double state_from_normalized_conductance(const DeviceParams& p, double sigma_tilde);

/// Path readout from final branch states: threshold selection at theta * max,
/// greedy max-state walk when the selection is not a unique path.
Path read_solution(const Network& net, std::span<const double> final_branch_states, double theta = 0.5);

/// A and B joined by two edges of length 1 and 2.
Graph preset_two_path_graph();

/// Unit-edge graph: left arm A-C-B, right arm made of two parallel chains
/// A-D-E-B and A-F-G-B. Edges 0 and 1 form the left arm.
Graph preset_multipath_graph();

}  // namespace memswarm
