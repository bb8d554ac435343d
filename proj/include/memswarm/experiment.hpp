#pragma once

// Experiment runner behind the command line tool: configs, built-in presets,
// engine orchestration and result summaries.

#include "memswarm/aco.hpp"
#include "memswarm/errors.hpp"
#include "memswarm/graph.hpp"
#include "memswarm/memnet.hpp"
#include "memswarm/trajectory.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memswarm {

enum class Engine { aco_discrete, aco_continuous, memnet, compare };

std::string_view to_string(Engine engine) noexcept;
std::optional<Engine> parse_engine(std::string_view name) noexcept;

struct AcoSettings {
    AcoParams params;
    ColonyRunSpec colony;
    // Mean-field integration (aco_continuous).
    double t_end = 200.0;
    double dt = 1e-2;
    std::size_t record_every_steps = 100;
};

struct MemnetSettings {
    DeviceParams device;
    /// One run per entry.
    std::vector<double> threshold_currents{0.0};
    double source_current = 0.0;
    CompileMode mode = CompileMode::lumped;
    double t_end = 200.0;
    double dt = 1e-3;
    std::size_t record_every = 1000;
    double theta = 0.5;
};

struct ExperimentConfig {
    std::string graph_label;  // preset name or "inline"
    Graph graph;
    Engine engine = Engine::compare;
    std::optional<AcoSettings> aco;
    std::optional<MemnetSettings> memnet;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 0;

    /// Throws ValidationError when a block required by the engine is missing
    /// or the graph does not suit it.
    void validate() const;
    /// Fully resolved form, defaults included; parse_config accepts it back.
    nlohmann::ordered_json to_json() const;
};

const std::vector<std::string>& preset_names();

/// Built-in configurations with the reference parameter sets.
ExperimentConfig preset_config(std::string_view name);

ExperimentConfig parse_config(const nlohmann::json& document);

/// A preset name or a path to a JSON config file.
ExperimentConfig load_config(std::string_view path_or_preset);

struct EngineOutcome {
    std::string label;  // summary key, also the CSV file stem
    Engine engine = Engine::memnet;
    std::vector<EdgeId> path;
    std::vector<double> final_state;  // per edge: tau or x
    bool agrees_with_oracle = false;
    Trajectory trajectory;
    std::optional<double> threshold_current;
    /// Discrete colony only: share of realizations whose own final state reads out the oracle path.
    std::optional<double> realization_agreement;
};

struct ResultSummary {
    std::vector<EngineOutcome> engines;
    std::vector<EdgeId> oracle_path;
    double oracle_length = 0.0;
    double duration_s = 0.0;

    bool all_agree() const;
    nlohmann::ordered_json to_json() const;
};

/// Runs the configured engines. When `write_files` is set, creates the output
/// directory and writes one CSV per engine run, summary.json and config.json.
ResultSummary run_experiment(const ExperimentConfig& cfg, bool write_files = true);

/// Process exit code for a failure: 2 config, 4 numerical, 5 readout.
int exit_code(ErrorCode code) noexcept;

inline constexpr int kExitAgree = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDisagree = 3;
inline constexpr int kExitNumericalFailure = 4;
inline constexpr int kExitReadoutFailure = 5;

}  // namespace memswarm
