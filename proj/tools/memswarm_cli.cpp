// memswarm: run shortest-path experiments with the ant colony and memristive
// network engines and check them against the classical oracle.

#include "memswarm/experiment.hpp"

#include "CLI11.hpp"

#include <iomanip>
#include <iostream>

namespace {

std::string join(const std::vector<memswarm::EdgeId>& edges) {
    std::string out = "[";
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(edges[i]);
    }
    return out + "]";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shortest paths by ant colony optimization and memristive network dynamics"};
    app.require_subcommand(1);

    std::string target;
    std::string engine;
    std::string out_dir;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double t_end = 0.0;

    auto* run = app.add_subcommand("run", "Run a preset or a JSON experiment config");
    run->add_option("config", target, "Preset name (fig2_two_path, fig4_multipath, fig6_threshold) or config.json")
        ->required();
    auto* engine_opt = run->add_option("--engine", engine, "aco_discrete | aco_continuous | memnet | compare");
    auto* out_opt = run->add_option("--out", out_dir, "Output directory");
    auto* seed_opt = run->add_option("--seed", seed, "Base random seed");
    auto* dt_opt = run->add_option("--dt", dt, "Time step for the ODE engines")->check(CLI::PositiveNumber);
    auto* t_end_opt = run->add_option("--t-end", t_end, "End time for the ODE engines")->check(CLI::NonNegativeNumber);

    auto* list = app.add_subcommand("presets", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : memswarm::kExitConfigError;
    }

    if (list->parsed()) {
        for (const auto& name : memswarm::preset_names()) std::cout << name << '\n';
        return 0;
    }

    std::optional<memswarm::ExperimentConfig> cfg;
    try {
        cfg = memswarm::load_config(target);
        if (*engine_opt) {
            auto parsed = memswarm::parse_engine(engine);
            if (!parsed) {
                throw memswarm::Error(memswarm::ErrorCode::ValidationError,
                                      "engine: unknown engine '" + engine + "'");
            }
            cfg->engine = *parsed;
        }
        if (*out_opt) cfg->output_dir = out_dir;
        if (*seed_opt) cfg->seed = seed;
        if (*dt_opt) {
            if (cfg->aco) cfg->aco->dt = dt;
            if (cfg->memnet) cfg->memnet->dt = dt;
        }
        if (*t_end_opt) {
            if (cfg->aco) cfg->aco->t_end = t_end;
            if (cfg->memnet) cfg->memnet->t_end = t_end;
        }
        cfg->validate();
    } catch (const memswarm::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return memswarm::exit_code(err.code());
    }

    std::cout << cfg->to_json().dump(2) << '\n';

    memswarm::ResultSummary summary;
    try {
        summary = memswarm::run_experiment(*cfg);
    } catch (const memswarm::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return memswarm::exit_code(err.code());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return memswarm::kExitConfigError;
    }

    std::cout << "oracle  " << join(summary.oracle_path) << "  length " << summary.oracle_length << '\n';
    for (const auto& e : summary.engines) {
        std::cout << std::left << std::setw(24) << e.label << join(e.path)
                  << (e.agrees_with_oracle ? "  agrees" : "  DISAGREES") << '\n';
    }
    std::cout << "wrote " << cfg->output_dir.string() << "/summary.json (" << std::fixed
              << std::setprecision(2) << summary.duration_s << " s)\n";
    return summary.all_agree() ? memswarm::kExitAgree : memswarm::kExitDisagree;
}
