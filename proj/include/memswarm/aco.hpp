#pragma once

// Ant colony optimization: the discrete stochastic colony on arbitrary graphs
// and the mean-field ODE form for bundles of parallel paths.

#include "memswarm/graph.hpp"
#include "memswarm/rng.hpp"
#include "memswarm/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace memswarm {

struct AcoParams {
    double pheromone_exponent = 1.0;   // alpha
    double visibility_exponent = 1.0;  // beta
    double evaporation = 0.1;          // rho, in [0, 1]
    double deposit = 1.0;              // Q, pheromone x length
    double injection_rate = 1.0;       // gamma, ants per unit time (ODE form only)
    double initial_pheromone = 0.5;    // tau0

    /// Throws InvalidParameter naming the offending field.
    void validate() const;
};

struct PheromoneState {
    std::vector<double> tau;  // indexed by edge id
};

struct ColonyRunSpec {
    std::size_t n_ants = 1000;
    std::size_t n_realizations = 1000;
    std::uint64_t seed = 0;
    std::size_t record_every = 1;
    /// 0 means one worker per hardware thread. Output does not depend on it.
    unsigned threads = 0;
};

struct MoveDistribution {
    std::vector<EdgeId> edges;
    std::vector<double> probabilities;
};

/// Move probabilities from `current` over incident edges whose far end is not
/// forbidden: proportional to tau^alpha * (1/L)^beta. Throws NoAllowableMove.
MoveDistribution transition_probabilities(const Graph& g, const PheromoneState& ph,
                                          const AcoParams& params, NodeId current,
                                          const std::vector<bool>& forbidden_nodes);

/// In-place per-ant update: evaporate every edge, then deposit Q/L on the
/// completed path. A discarded ant (nullptr) only evaporates.
void apply_ant_update(PheromoneState& ph, const Path* completed_path, const AcoParams& params);

PheromoneState deposit_and_evaporate(PheromoneState ph, const std::optional<Path>& completed_path,
                                     const AcoParams& params);

/// Node-tabu random walk from the source. Returns nullopt when the ant gets
/// stuck before reaching the target.
std::optional<Path> run_ant(const Graph& g, const PheromoneState& ph, const AcoParams& params,
                            CounterRng& rng);

struct ColonyResult {
    /// Columns: t_or_ant_index, tau_e0, tau_e1, ... averaged over realizations.
    Trajectory mean;
    /// Final pheromone of every realization, in realization order.
    std::vector<PheromoneState> final_states;
    std::size_t discarded_ants = 0;
};

/// Runs independent realizations, each seeded from (spec.seed, realization).
ColonyResult run_colony(const Graph& g, const AcoParams& params, const ColonyRunSpec& spec);

struct ParallelPathAcoResult {
    /// Columns: t_or_ant_index, tau_p0, tau_p1, ... (one per path).
    Trajectory trajectory;
    std::vector<double> final_tau;
};

/// Mean-field colony on K parallel paths, integrated with classical RK4 from
/// tau(0) = tau0. Rows are written every `record_every` steps starting at t=0.
ParallelPathAcoResult integrate_parallel_path_aco(std::span<const double> lengths,
                                                  const AcoParams& params, double t_end, double dt,
                                                  std::size_t record_every = 1);

/// Closed-form steady state of the two-path mean-field colony for alpha=beta=1:
/// (Q / (L1 * rho), 0).
std::pair<double, double> aco_steady_state_two_path(const AcoParams& params, double shorter_length);

}  // namespace memswarm
