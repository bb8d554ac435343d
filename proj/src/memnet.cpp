#include "memswarm/memnet.hpp"

#include "memswarm/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace memswarm {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, std::string(field) + " " + what);
}

void check_state_count(const Network& net, std::span<const double> states) {
    if (states.size() != net.branches.size()) {
        throw Error(ErrorCode::InvalidParameter, "expected " + std::to_string(net.branches.size()) +
                                                     " branch states, got " +
                                                     std::to_string(states.size()));
    }
}

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

// Nodes that share a connected component with the ground terminal.
std::vector<std::ptrdiff_t> number_unknowns(const Network& net, std::size_t& count) {
    std::vector<std::vector<std::size_t>> incident(net.node_count);
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        incident[net.branches[b].from].push_back(b);
        incident[net.branches[b].to].push_back(b);
    }
    std::vector<bool> grounded(net.node_count, false);
    std::queue<NodeId> queue;
    grounded[net.terminal_b] = true;
    queue.push(net.terminal_b);
    while (!queue.empty()) {
        const NodeId n = queue.front();
        queue.pop();
        for (std::size_t b : incident[n]) {
            const Branch& br = net.branches[b];
            const NodeId m = br.from == n ? br.to : br.from;
            if (!grounded[m]) {
                grounded[m] = true;
                queue.push(m);
            }
        }
    }
    std::vector<std::ptrdiff_t> index(net.node_count, -1);
    count = 0;
    for (NodeId n = 0; n < net.node_count; ++n) {
        if (grounded[n] && n != net.terminal_b) index[n] = static_cast<std::ptrdiff_t>(count++);
    }
    return index;
}

// Classical RK4 with a circuit solve per stage. `k1` may be supplied when the
// caller already evaluated the rates at `x`.
std::vector<double> rk4_step(const Network& net, std::span<const double> x, double dt,
                             std::vector<double> k1, std::size_t& clamp_events) {
    const std::size_t n = x.size();
    if (k1.empty()) k1 = state_rates(net, x);
    std::vector<double> stage(n);
    auto advance = [&](const std::vector<double>& k, double h) {
        for (std::size_t i = 0; i < n; ++i) stage[i] = clamp_unit(x[i] + h * k[i]);
        return state_rates(net, stage);
    };
    const auto k2 = advance(k1, 0.5 * dt);
    const auto k3 = advance(k2, 0.5 * dt);
    const auto k4 = advance(k3, dt);

    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double value = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::StateBlowup, "state of branch " + std::to_string(i) +
                                                    " became non-finite; reduce dt");
        }
        if (value < 0.0 || value > 1.0) ++clamp_events;
        next[i] = clamp_unit(value);
    }
    return next;
}

}  // namespace

void DeviceParams::validate() const {
    require(sigma_off > 0.0 && std::isfinite(sigma_off), "sigma_off", "must be positive");
    require(sigma_on > sigma_off && std::isfinite(sigma_on), "sigma_on", "must exceed sigma_off");
    require(kappa > 0.0 && std::isfinite(kappa), "kappa", "must be positive");
    require(relaxation >= 0.0 && std::isfinite(relaxation), "Gamma", "must be non-negative");
    require(threshold_current >= 0.0 && std::isfinite(threshold_current), "I_t",
            "must be non-negative");
}

double conductance(const DeviceParams& p, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw Error(ErrorCode::StateOutOfRange, "state " + std::to_string(x) + " outside [0, 1]");
    }
    return p.sigma_on * x + p.sigma_off * (1.0 - x);
}

double state_derivative(const DeviceParams& p, double x, double current) {
    const double magnitude = std::abs(current);
    if (magnitude < p.threshold_current) return -p.relaxation * x;
    const double sign = current > 0.0 ? 1.0 : (current < 0.0 ? -1.0 : 0.0);
    return sign * p.kappa * (magnitude - p.threshold_current) - p.relaxation * x;
}

Network graph_to_network(const Graph& g, const DeviceParams& p, CompileMode mode,
                         double source_current) {
    p.validate();
    if (!(source_current >= 0.0) || !std::isfinite(source_current)) {
        throw Error(ErrorCode::InvalidParameter, "I0 must be non-negative");
    }

    Network net{g, mode, {}, g.node_count(), g.source(), g.target(), source_current, {}, {}, 0};

    // Orientation key: hops from A minus hops from B, so branches point from
    // the A side toward the B side. Ties go to the lower node id.
    const auto from_a = hop_distances(g, g.source());
    const auto from_b = hop_distances(g, g.target());
    auto side = [&](NodeId n) -> long long {
        constexpr auto unreachable = std::numeric_limits<std::size_t>::max();
        if (from_a[n] == unreachable || from_b[n] == unreachable) return 0;
        return static_cast<long long>(from_a[n]) - static_cast<long long>(from_b[n]);
    };

    net.edge_branches.resize(g.edge_count());
    for (const Edge& edge : g.edges()) {
        NodeId tail = edge.u;
        NodeId head = edge.v;
        if (side(head) < side(tail) || (side(head) == side(tail) && head < tail)) std::swap(tail, head);

        if (mode == CompileMode::lumped) {
            net.edge_branches[edge.id].push_back(net.branches.size());
            net.branches.push_back(Branch{tail, head, p, edge.length, edge.id});
            continue;
        }
        if (edge.length != std::round(edge.length)) {
            throw Error(ErrorCode::NonIntegerLengthInChainMode,
                        "edge " + std::to_string(edge.id) + " has length " +
                            std::to_string(edge.length));
        }
        const auto units = static_cast<std::size_t>(edge.length);
        NodeId at = tail;
        for (std::size_t k = 0; k < units; ++k) {
            const NodeId next = k + 1 == units ? head : net.node_count++;
            net.edge_branches[edge.id].push_back(net.branches.size());
            net.branches.push_back(Branch{at, next, p, 1.0, edge.id});
            at = next;
        }
    }
    net.unknown_index = number_unknowns(net, net.unknown_count);
    return net;
}

OperatingPoint solve_dc(const Network& net, std::span<const double> branch_states) {
    check_state_count(net, branch_states);
    OperatingPoint op;
    op.branch_conductances.resize(net.branches.size());
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        op.branch_conductances[b] = net.branches[b].conductance(branch_states[b]);
    }

    const auto n = static_cast<Eigen::Index>(net.unknown_count);
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd injection = Eigen::VectorXd::Zero(n);
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const auto i = net.unknown_index[net.branches[b].from];
        const auto j = net.unknown_index[net.branches[b].to];
        const double g = op.branch_conductances[b];
        if (i >= 0) laplacian(i, i) += g;
        if (j >= 0) laplacian(j, j) += g;
        if (i >= 0 && j >= 0) {
            laplacian(i, j) -= g;
            laplacian(j, i) -= g;
        }
    }
    const auto a = net.unknown_index[net.terminal_a];
    if (a < 0) throw Error(ErrorCode::SingularSystem, "terminal A is not connected to ground");
    injection(a) = net.source_current;

    Eigen::LLT<Eigen::MatrixXd> factor(laplacian);
    if (factor.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularSystem, "nodal matrix is not positive definite");
    }
    const Eigen::VectorXd voltages = factor.solve(injection);
    if (!voltages.allFinite()) throw Error(ErrorCode::SingularSystem, "nodal solve produced non-finite voltages");

    op.node_voltages.assign(net.node_count, 0.0);
    for (NodeId node = 0; node < net.node_count; ++node) {
        if (net.unknown_index[node] >= 0) op.node_voltages[node] = voltages(net.unknown_index[node]);
    }
    op.branch_currents.resize(net.branches.size());
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const Branch& br = net.branches[b];
        op.branch_currents[b] =
            op.branch_conductances[b] * (op.node_voltages[br.from] - op.node_voltages[br.to]);
    }
    return op;
}

std::vector<double> state_rates(const Network& net, std::span<const double> branch_states) {
    const OperatingPoint op = solve_dc(net, branch_states);
    std::vector<double> rates(net.branches.size());
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const double x = branch_states[b];
        double rate = state_derivative(net.branches[b].device, x, op.branch_currents[b]);
        if ((x <= 0.0 && rate < 0.0) || (x >= 1.0 && rate > 0.0)) rate = 0.0;
        rates[b] = rate;
    }
    return rates;
}

std::vector<double> step(const Network& net, std::span<const double> branch_states, double dt) {
    check_state_count(net, branch_states);
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "time step must be positive");
    std::size_t clamped = 0;
    return rk4_step(net, branch_states, dt, {}, clamped);
}

std::vector<double> edge_states(const Network& net, std::span<const double> branch_states) {
    check_state_count(net, branch_states);
    std::vector<double> states(net.edge_branches.size(), 0.0);
    for (std::size_t e = 0; e < net.edge_branches.size(); ++e) {
        const auto& members = net.edge_branches[e];
        for (std::size_t b : members) states[e] += branch_states[b];
        states[e] /= static_cast<double>(members.size());
    }
    return states;
}

SimulationResult simulate(const Network& net, const SimulationOptions& options) {
    const std::size_t steps = step_count(options.t_end, options.dt);
    if (options.record_every < 1) throw Error(ErrorCode::InvalidParameter, "record_every must be at least 1");

    std::vector<double> x = options.initial_states;
    if (x.empty()) x.assign(net.branches.size(), 0.0);
    check_state_count(net, x);
    for (double value : x) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw Error(ErrorCode::StateOutOfRange, "initial state outside [0, 1]");
        }
    }

    SimulationResult result;
    auto& traj = result.trajectory;
    traj.columns.push_back("t");
    for (std::size_t e = 0; e < net.edge_branches.size(); ++e) traj.columns.push_back("x_e" + std::to_string(e));
    for (std::size_t b = 0; b < net.branches.size(); ++b) traj.columns.push_back("I_b" + std::to_string(b));
    for (std::size_t b = 0; b < net.branches.size(); ++b) traj.columns.push_back("sigma_b" + std::to_string(b));

    std::size_t last_recorded = 0;
    auto record = [&](std::size_t step_index) {
        const OperatingPoint op = solve_dc(net, x);
        std::vector<double> row{static_cast<double>(step_index) * options.dt};
        const auto per_edge = edge_states(net, x);
        row.insert(row.end(), per_edge.begin(), per_edge.end());
        row.insert(row.end(), op.branch_currents.begin(), op.branch_currents.end());
        row.insert(row.end(), op.branch_conductances.begin(), op.branch_conductances.end());
        traj.rows.push_back(std::move(row));
        last_recorded = step_index;
    };

    record(0);
    std::size_t taken = 0;
    for (std::size_t s = 1; s <= steps; ++s) {
        std::vector<double> k1;
        if (options.stop_at_steady_state) {
            k1 = state_rates(net, x);
            double fastest = 0.0;
            for (double r : k1) fastest = std::max(fastest, std::abs(r));
            if (fastest < options.steady_tolerance) {
                result.reached_steady_state = true;
                break;
            }
        }
        x = rk4_step(net, x, options.dt, std::move(k1), result.clamp_events);
        taken = s;
        if (s % options.record_every == 0) record(s);
    }
    if (result.reached_steady_state && last_recorded != taken) record(taken);

    result.steps_taken = taken;
    result.final_time = static_cast<double>(taken) * options.dt;
    result.final_edge_states = edge_states(net, x);
    result.final_states = std::move(x);
    return result;
}

TwoPathSteadyState memristive_two_path_steady_state(const DeviceParams& p, double source_current) {
    p.validate();
    if (p.relaxation == 0.0) throw Error(ErrorCode::ZeroRelaxation, "closed form requires Gamma > 0");
    if (p.threshold_current != 0.0) {
        throw Error(ErrorCode::InvalidParameter, "closed form holds for the threshold-free model only");
    }
    const double gamma = p.relaxation;
    const double ratio = p.sigma_on / p.sigma_off;
    TwoPathSteadyState s;
    s.drive = p.kappa * source_current * (ratio - 1.0);
    const double c = s.drive;
    const double root = std::sqrt(c * c + 2.0 * c * gamma + 9.0 * gamma * gamma);
    s.sigma_tilde_1 = (c - gamma + root) / (2.0 * gamma);
    // (C + 5G - root) / (2G) rewritten without the cancellation.
    s.sigma_tilde_2 = (4.0 * c + 8.0 * gamma) / (c + 5.0 * gamma + root);
    s.x1 = state_from_normalized_conductance(p, s.sigma_tilde_1);
    s.x2 = state_from_normalized_conductance(p, s.sigma_tilde_2);
    return s;
}

double state_from_normalized_conductance(const DeviceParams& p, double sigma_tilde) {
    return (sigma_tilde - 1.0) / (p.sigma_on / p.sigma_off - 1.0);
}

Path read_solution(const Network& net, std::span<const double> final_branch_states, double theta) {
    const auto per_edge = edge_states(net, final_branch_states);
    return threshold_readout(net.graph, per_edge, theta);
}

Graph preset_two_path_graph() {
    const std::array<EdgeSpec, 2> edges{{{"A", "B", 1.0}, {"A", "B", 2.0}}};
    return Graph::build(edges, "A", "B");
}

Graph preset_multipath_graph() {
    const std::array<EdgeSpec, 8> edges{{
        {"A", "C", 1.0},
        {"C", "B", 1.0},
        {"A", "D", 1.0},
        {"D", "E", 1.0},
        {"E", "B", 1.0},
        {"A", "F", 1.0},
        {"F", "G", 1.0},
        {"G", "B", 1.0},
    }};
    return Graph::build(edges, "A", "B");
}

}  // namespace memswarm
