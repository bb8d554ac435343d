#include "memswarm/aco.hpp"

#include "memswarm/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>
#include <thread>

namespace memswarm {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, std::string(field) + " " + what);
}

// Unnormalized weight tau^alpha * (1/L)^beta.
double move_weight(double tau, double length, const AcoParams& params) {
    return std::pow(tau, params.pheromone_exponent) *
           std::pow(1.0 / length, params.visibility_exponent);
}

// Normalizes in place; all-zero weights fall back to a uniform choice.
void normalize(std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(weights.size()));
        return;
    }
    for (double& w : weights) w /= total;
}

}  // namespace

void AcoParams::validate() const {
    require(std::isfinite(pheromone_exponent), "alpha", "must be finite");
    require(std::isfinite(visibility_exponent), "beta", "must be finite");
    require(evaporation >= 0.0 && evaporation <= 1.0, "rho", "must lie in [0, 1]");
    require(deposit >= 0.0 && std::isfinite(deposit), "Q", "must be non-negative");
    require(injection_rate >= 0.0 && std::isfinite(injection_rate), "gamma", "must be non-negative");
    require(initial_pheromone > 0.0 && std::isfinite(initial_pheromone), "tau0", "must be positive");
}

MoveDistribution transition_probabilities(const Graph& g, const PheromoneState& ph,
                                          const AcoParams& params, NodeId current,
                                          const std::vector<bool>& forbidden_nodes) {
    MoveDistribution dist;
    for (EdgeId e : g.incident_edges(current)) {
        const Edge& edge = g.edge(e);
        if (forbidden_nodes[edge.opposite(current)]) continue;
        dist.edges.push_back(e);
        dist.probabilities.push_back(move_weight(ph.tau[e], edge.length, params));
    }
    if (dist.edges.empty()) {
        throw Error(ErrorCode::NoAllowableMove,
                    "every neighbour of '" + g.node_name(current) + "' is forbidden");
    }
    normalize(dist.probabilities);
    return dist;
}

void apply_ant_update(PheromoneState& ph, const Path* completed_path, const AcoParams& params) {
    const double keep = 1.0 - params.evaporation;
    for (double& tau : ph.tau) tau *= keep;
    if (completed_path) {
        const double amount = params.deposit / completed_path->total_length;
        for (EdgeId e : completed_path->edges) ph.tau[e] += amount;
    }
    assert(std::all_of(ph.tau.begin(), ph.tau.end(), [](double t) { return t >= 0.0; }));
}

PheromoneState deposit_and_evaporate(PheromoneState ph, const std::optional<Path>& completed_path,
                                     const AcoParams& params) {
    apply_ant_update(ph, completed_path ? &*completed_path : nullptr, params);
    return ph;
}

std::optional<Path> run_ant(const Graph& g, const PheromoneState& ph, const AcoParams& params,
                            CounterRng& rng) {
    std::vector<bool> visited(g.node_count(), false);
    std::vector<EdgeId> edges;
    NodeId at = g.source();
    visited[at] = true;
    while (at != g.target()) {
        MoveDistribution moves;
        try {
            moves = transition_probabilities(g, ph, params, at, visited);
        } catch (const Error& err) {
            if (err.code() == ErrorCode::NoAllowableMove) return std::nullopt;
            throw;
        }
        const double u = rng.uniform();
        std::size_t pick = moves.edges.size() - 1;
        double cumulative = 0.0;
        for (std::size_t i = 0; i + 1 < moves.edges.size(); ++i) {
            cumulative += moves.probabilities[i];
            if (u < cumulative) {
                pick = i;
                break;
            }
        }
        // Rounding can leave u above the running sum; never land on a zero-probability tail.
        while (pick > 0 && moves.probabilities[pick] == 0.0) --pick;
        const EdgeId e = moves.edges[pick];
        edges.push_back(e);
        at = g.edge(e).opposite(at);
        visited[at] = true;
    }
    return make_path(g, std::move(edges));
}

ColonyResult run_colony(const Graph& g, const AcoParams& params, const ColonyRunSpec& spec) {
    params.validate();
    if (spec.n_ants < 1 || spec.n_realizations < 1 || spec.record_every < 1) {
        throw Error(ErrorCode::InvalidParameter, "colony counts must all be at least 1");
    }
    const std::size_t n_edges = g.edge_count();
    const std::size_t n_rows = spec.n_ants / spec.record_every + 1;

    struct Realization {
        std::vector<double> samples;  // n_rows x n_edges
        PheromoneState final_state;
        std::size_t discarded = 0;
    };
    std::vector<Realization> realizations(spec.n_realizations);

    auto simulate_one = [&](std::size_t r) {
        Realization& out = realizations[r];
        CounterRng rng(spec.seed, r);
        PheromoneState ph{std::vector<double>(n_edges, params.initial_pheromone)};
        out.samples.reserve(n_rows * n_edges);
        out.samples.insert(out.samples.end(), ph.tau.begin(), ph.tau.end());
        for (std::size_t ant = 1; ant <= spec.n_ants; ++ant) {
            auto path = run_ant(g, ph, params, rng);
            if (!path) ++out.discarded;
            apply_ant_update(ph, path ? &*path : nullptr, params);
            if (ant % spec.record_every == 0) {
                out.samples.insert(out.samples.end(), ph.tau.begin(), ph.tau.end());
            }
        }
        out.final_state = std::move(ph);
    };

    unsigned workers = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.n_realizations));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < spec.n_realizations; r += workers) simulate_one(r);
            });
        }
    }

    // Reduce in realization order so the mean does not depend on scheduling.
    ColonyResult result;
    result.mean.columns.push_back("t_or_ant_index");
    for (EdgeId e = 0; e < n_edges; ++e) result.mean.columns.push_back("tau_e" + std::to_string(e));
    std::vector<double> sums(n_rows * n_edges, 0.0);
    for (const auto& realization : realizations) {
        for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += realization.samples[i];
        result.discarded_ants += realization.discarded;
    }
    const double scale = 1.0 / static_cast<double>(spec.n_realizations);
    for (std::size_t row = 0; row < n_rows; ++row) {
        std::vector<double> values{static_cast<double>(row * spec.record_every)};
        for (EdgeId e = 0; e < n_edges; ++e) values.push_back(sums[row * n_edges + e] * scale);
        result.mean.rows.push_back(std::move(values));
    }
    result.final_states.reserve(spec.n_realizations);
    for (auto& realization : realizations) result.final_states.push_back(std::move(realization.final_state));
    return result;
}

ParallelPathAcoResult integrate_parallel_path_aco(std::span<const double> lengths,
                                                  const AcoParams& params, double t_end, double dt,
                                                  std::size_t record_every) {
    params.validate();
    if (lengths.empty()) throw Error(ErrorCode::InvalidParameter, "at least one path is required");
    for (double length : lengths) {
        if (!(length > 0.0) || !std::isfinite(length)) {
            throw Error(ErrorCode::NonPositiveLength, "path lengths must be positive");
        }
    }
    if (record_every < 1) throw Error(ErrorCode::InvalidParameter, "record_every must be at least 1");
    const std::size_t steps = step_count(t_end, dt);
    const std::size_t k = lengths.size();

    std::vector<double> weights(k);
    auto rhs = [&](const std::vector<double>& tau, std::vector<double>& out) {
        for (std::size_t i = 0; i < k; ++i) weights[i] = move_weight(tau[i], lengths[i], params);
        normalize(weights);
        const double gamma = params.injection_rate;
        for (std::size_t i = 0; i < k; ++i) {
            out[i] = -gamma * params.evaporation * tau[i] +
                     weights[i] * gamma * params.deposit / lengths[i];
        }
    };

    ParallelPathAcoResult result;
    result.trajectory.columns.push_back("t_or_ant_index");
    for (std::size_t i = 0; i < k; ++i) result.trajectory.columns.push_back("tau_p" + std::to_string(i));

    std::vector<double> tau(k, params.initial_pheromone);
    std::vector<double> k1(k), k2(k), k3(k), k4(k), stage(k);
    auto record = [&](std::size_t step) {
        std::vector<double> row{static_cast<double>(step) * dt};
        row.insert(row.end(), tau.begin(), tau.end());
        result.trajectory.rows.push_back(std::move(row));
    };
    record(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        rhs(tau, k1);
        for (std::size_t i = 0; i < k; ++i) stage[i] = tau[i] + 0.5 * dt * k1[i];
        rhs(stage, k2);
        for (std::size_t i = 0; i < k; ++i) stage[i] = tau[i] + 0.5 * dt * k2[i];
        rhs(stage, k3);
        for (std::size_t i = 0; i < k; ++i) stage[i] = tau[i] + dt * k3[i];
        rhs(stage, k4);
        for (std::size_t i = 0; i < k; ++i) {
            tau[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(tau[i])) {
                throw Error(ErrorCode::StateBlowup,
                            "pheromone became non-finite at t=" + std::to_string(step * dt) +
                                "; reduce dt");
            }
        }
        if (step % record_every == 0) record(step);
    }
    result.final_tau = tau;
    return result;
}

std::pair<double, double> aco_steady_state_two_path(const AcoParams& params, double shorter_length) {
    if (params.pheromone_exponent != 1.0 || params.visibility_exponent != 1.0) {
        throw Error(ErrorCode::UnsupportedExponents, "closed form requires alpha = beta = 1");
    }
    if (params.evaporation == 0.0) {
        throw Error(ErrorCode::ZeroEvaporation, "closed form requires rho > 0");
    }
    if (!(shorter_length > 0.0)) {
        throw Error(ErrorCode::NonPositiveLength, "path length must be positive");
    }
    return {params.deposit / (shorter_length * params.evaporation), 0.0};
}

}  // namespace memswarm
