#include "memswarm/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

namespace memswarm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kAcoDiscreteSalt = 1;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ValidationError, field + ": " + what);
}

// Typed field access that reports the full field path on failure.
class Fields {
public:
    Fields(const json& object, std::string prefix) : object_(object), prefix_(std::move(prefix)) {
        if (!object_.is_object()) invalid(prefix_.empty() ? "<root>" : prefix_, "expected an object");
    }

    std::string path(std::string_view key) const {
        return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key);
    }

    bool has(std::string_view key) const { return object_.contains(std::string(key)); }

    const json& raw(std::string_view key) const {
        seen_.insert(std::string(key));
        return object_.at(std::string(key));
    }

    double number(std::string_view key) const {
        if (!has(key)) invalid(path(key), "required field is missing");
        const json& v = raw(key);
        if (!v.is_number()) invalid(path(key), "expected a number");
        return v.get<double>();
    }

    double number_or(std::string_view key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t count_or(std::string_view key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            invalid(path(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string text_or(std::string_view key, std::string fallback) const {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_string()) invalid(path(key), "expected a string");
        return v.get<std::string>();
    }

    void reject_unknown() const {
        for (const auto& item : object_.items()) {
            if (!seen_.contains(item.key())) invalid(path(item.key()), "unknown field");
        }
    }

private:
    const json& object_;
    std::string prefix_;
    mutable std::set<std::string> seen_;
};

std::string node_label(const json& v, const std::string& field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    invalid(field, "node identifiers must be strings or integers");
}

Graph parse_graph(const json& document) {
    Fields f(document, "graph");
    std::vector<EdgeSpec> edges;
    if (!f.has("edges")) invalid("graph.edges", "required field is missing");
    const json& list = f.raw("edges");
    if (!list.is_array()) invalid("graph.edges", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string field = "graph.edges[" + std::to_string(i) + "]";
        const json& item = list[i];
        if (!item.is_array() || item.size() != 3 || !item[2].is_number()) {
            invalid(field, "expected [u, v, length]");
        }
        edges.push_back({node_label(item[0], field), node_label(item[1], field), item[2].get<double>()});
    }
    if (!f.has("source")) invalid("graph.source", "required field is missing");
    if (!f.has("target")) invalid("graph.target", "required field is missing");
    const std::string source = node_label(f.raw("source"), "graph.source");
    const std::string target = node_label(f.raw("target"), "graph.target");

    std::optional<std::vector<std::string>> nodes;
    if (f.has("nodes")) {
        const json& names = f.raw("nodes");
        if (!names.is_array()) invalid("graph.nodes", "expected an array");
        nodes.emplace();
        for (const auto& n : names) nodes->push_back(node_label(n, "graph.nodes"));
    }
    f.reject_unknown();
    return nodes ? Graph::build(*nodes, edges, source, target) : Graph::build(edges, source, target);
}

Graph preset_graph(std::string_view name) {
    if (name == "fig2_two_path") return preset_two_path_graph();
    if (name == "fig4_multipath" || name == "fig6_threshold") return preset_multipath_graph();
    throw Error(ErrorCode::UnknownPreset, "no preset named '" + std::string(name) + "'");
}

AcoSettings parse_aco(const json& document) {
    Fields f(document, "aco");
    AcoSettings s;
    s.params.pheromone_exponent = f.number_or("alpha", 1.0);
    s.params.visibility_exponent = f.number_or("beta", 1.0);
    s.params.evaporation = f.number("rho");
    s.params.deposit = f.number("Q");
    s.params.injection_rate = f.number_or("gamma", 1.0);
    s.params.initial_pheromone = f.number("tau0");
    s.colony.n_ants = f.count_or("n_ants", 1000);
    s.colony.n_realizations = f.count_or("n_realizations", 1000);
    s.colony.record_every = f.count_or("record_every", 10);
    s.t_end = f.number_or("t_end", 200.0);
    s.dt = f.number_or("dt", 1e-2);
    s.record_every_steps = f.count_or("record_every_steps", 100);
    f.reject_unknown();
    return s;
}

MemnetSettings parse_memnet(const json& document) {
    Fields f(document, "memnet");
    MemnetSettings s;
    s.device.sigma_on = f.number("sigma_on");
    s.device.sigma_off = f.number("sigma_off");
    s.device.kappa = f.number("kappa");
    s.device.relaxation = f.number("Gamma");
    s.source_current = f.number("I0");
    if (f.has("I_t")) {
        const json& thresholds = f.raw("I_t");
        s.threshold_currents.clear();
        if (thresholds.is_number()) {
            s.threshold_currents.push_back(thresholds.get<double>());
        } else if (thresholds.is_array() && !thresholds.empty()) {
            for (const auto& t : thresholds) {
                if (!t.is_number()) invalid("memnet.I_t", "expected numbers");
                s.threshold_currents.push_back(t.get<double>());
            }
        } else {
            invalid("memnet.I_t", "expected a number or a non-empty array of numbers");
        }
    }
    const std::string mode = f.text_or("mode", "lumped");
    if (mode == "lumped") {
        s.mode = CompileMode::lumped;
    } else if (mode == "chain") {
        s.mode = CompileMode::chain;
    } else {
        invalid("memnet.mode", "expected \"lumped\" or \"chain\"");
    }
    s.t_end = f.number_or("t_end", 200.0);
    s.dt = f.number_or("dt", 1e-3);
    s.record_every = f.count_or("record_every", 1000);
    s.theta = f.number_or("theta", 0.5);
    f.reject_unknown();
    return s;
}

void check_parameter(const std::string& block, auto&& check) {
    try {
        check();
    } catch (const Error& err) {
        if (err.code() != ErrorCode::InvalidParameter) throw;
        throw Error(ErrorCode::ValidationError, block + "." + err.detail());
    }
}

std::string threshold_label(double threshold) {
    return "memnet[I_t=" + format_double(threshold) + "]";
}

EngineOutcome run_aco_discrete(const ExperimentConfig& cfg, const std::vector<EdgeId>& oracle) {
    ColonyRunSpec spec = cfg.aco->colony;
    spec.seed = derive_seed(cfg.seed, kAcoDiscreteSalt);
    ColonyResult colony = run_colony(cfg.graph, cfg.aco->params, spec);

    EngineOutcome out;
    out.label = "aco_discrete";
    out.engine = Engine::aco_discrete;
    out.final_state.assign(cfg.graph.edge_count(), 0.0);
    for (const auto& state : colony.final_states) {
        for (EdgeId e = 0; e < cfg.graph.edge_count(); ++e) out.final_state[e] += state.tau[e];
    }
    for (double& tau : out.final_state) tau /= static_cast<double>(colony.final_states.size());
    out.path = greedy_max_walk(cfg.graph, out.final_state).edges;
    out.agrees_with_oracle = out.path == oracle;
    std::size_t agreeing = 0;
    for (const auto& state : colony.final_states) {
        if (greedy_max_walk(cfg.graph, state.tau).edges == oracle) ++agreeing;
    }
    out.realization_agreement =
        static_cast<double>(agreeing) / static_cast<double>(colony.final_states.size());
    out.trajectory = std::move(colony.mean);
    return out;
}

EngineOutcome run_aco_continuous(const ExperimentConfig& cfg, const std::vector<EdgeId>& oracle) {
    const auto paths = parallel_path_decomposition(cfg.graph);
    std::vector<double> lengths;
    for (const auto& p : *paths) lengths.push_back(p.total_length);
    const AcoSettings& s = *cfg.aco;
    auto solved = integrate_parallel_path_aco(lengths, s.params, s.t_end, s.dt, s.record_every_steps);

    // Spread per-path pheromone onto member edges.
    std::vector<std::size_t> path_of_edge(cfg.graph.edge_count());
    for (std::size_t k = 0; k < paths->size(); ++k) {
        for (EdgeId e : (*paths)[k].edges) path_of_edge[e] = k;
    }
    EngineOutcome out;
    out.label = "aco_continuous";
    out.engine = Engine::aco_continuous;
    out.trajectory.columns.push_back("t_or_ant_index");
    for (EdgeId e = 0; e < cfg.graph.edge_count(); ++e) {
        out.trajectory.columns.push_back("tau_e" + std::to_string(e));
    }
    for (const auto& row : solved.trajectory.rows) {
        std::vector<double> expanded{row[0]};
        for (EdgeId e = 0; e < cfg.graph.edge_count(); ++e) expanded.push_back(row[1 + path_of_edge[e]]);
        out.trajectory.rows.push_back(std::move(expanded));
    }
    for (EdgeId e = 0; e < cfg.graph.edge_count(); ++e) {
        out.final_state.push_back(solved.final_tau[path_of_edge[e]]);
    }
    out.path = greedy_max_walk(cfg.graph, out.final_state).edges;
    out.agrees_with_oracle = out.path == oracle;
    return out;
}

EngineOutcome run_memnet(const ExperimentConfig& cfg, double threshold, bool sweep,
                         const std::vector<EdgeId>& oracle) {
    const MemnetSettings& s = *cfg.memnet;
    DeviceParams device = s.device;
    device.threshold_current = threshold;
    const Network net = graph_to_network(cfg.graph, device, s.mode, s.source_current);
    SimulationOptions options;
    options.t_end = s.t_end;
    options.dt = s.dt;
    options.record_every = s.record_every;
    SimulationResult sim = simulate(net, options);

    EngineOutcome out;
    out.label = sweep ? threshold_label(threshold) : "memnet";
    out.engine = Engine::memnet;
    out.threshold_current = threshold;
    out.final_state = sim.final_edge_states;
    out.path = read_solution(net, sim.final_states, s.theta).edges;
    out.agrees_with_oracle = out.path == oracle;
    out.trajectory = std::move(sim.trajectory);
    return out;
}

std::string csv_file_name(const std::string& label) {
    std::string name;
    for (char c : label) {
        if (c == '[' || c == '=') {
            name += '_';
        } else if (c != ']') {
            name += c;
        }
    }
    return name + ".csv";
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCode::ValidationError, "cannot write " + file.string());
    out << text;
}

}  // namespace

std::string_view to_string(Engine engine) noexcept {
    switch (engine) {
        case Engine::aco_discrete: return "aco_discrete";
        case Engine::aco_continuous: return "aco_continuous";
        case Engine::memnet: return "memnet";
        case Engine::compare: return "compare";
    }
    return "unknown";
}

std::optional<Engine> parse_engine(std::string_view name) noexcept {
    for (Engine e : {Engine::aco_discrete, Engine::aco_continuous, Engine::memnet, Engine::compare}) {
        if (to_string(e) == name) return e;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    const bool wants_aco = engine != Engine::memnet;
    const bool wants_memnet = engine == Engine::memnet || engine == Engine::compare;
    if (wants_aco && !aco) invalid("aco", "required for engine " + std::string(to_string(engine)));
    if (wants_memnet && !memnet) invalid("memnet", "required for engine " + std::string(to_string(engine)));
    if (aco) {
        check_parameter("aco", [&] { aco->params.validate(); });
        if (aco->colony.n_ants < 1) invalid("aco.n_ants", "must be at least 1");
        if (aco->colony.n_realizations < 1) invalid("aco.n_realizations", "must be at least 1");
        if (aco->colony.record_every < 1) invalid("aco.record_every", "must be at least 1");
        if (aco->record_every_steps < 1) invalid("aco.record_every_steps", "must be at least 1");
        if (!(aco->dt > 0.0)) invalid("aco.dt", "must be positive");
        if (!(aco->t_end >= 0.0)) invalid("aco.t_end", "must be non-negative");
    }
    if (engine == Engine::aco_continuous && !parallel_path_decomposition(graph)) {
        invalid("graph", "aco_continuous needs a bundle of parallel source-target paths");
    }
    if (memnet) {
        for (double threshold : memnet->threshold_currents) {
            DeviceParams device = memnet->device;
            device.threshold_current = threshold;
            check_parameter("memnet", [&] { device.validate(); });
        }
        if (!(memnet->source_current >= 0.0)) invalid("memnet.I0", "must be non-negative");
        if (!(memnet->dt > 0.0)) invalid("memnet.dt", "must be positive");
        if (!(memnet->t_end >= 0.0)) invalid("memnet.t_end", "must be non-negative");
        if (memnet->record_every < 1) invalid("memnet.record_every", "must be at least 1");
        if (!(memnet->theta > 0.0 && memnet->theta < 1.0)) invalid("memnet.theta", "must lie in (0, 1)");
        if (memnet->mode == CompileMode::chain) {
            for (const Edge& e : graph.edges()) {
                if (e.length != std::round(e.length)) {
                    invalid("memnet.mode", "chain mode needs integer edge lengths");
                }
            }
        }
    }
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json doc;
    ordered_json g;
    g["nodes"] = graph.node_names();
    g["edges"] = ordered_json::array();
    for (const Edge& e : graph.edges()) {
        g["edges"].push_back({graph.node_name(e.u), graph.node_name(e.v), e.length});
    }
    g["source"] = graph.node_name(graph.source());
    g["target"] = graph.node_name(graph.target());
    doc["graph_label"] = graph_label;
    doc["graph"] = g;
    doc["engine"] = to_string(engine);
    doc["seed"] = seed;
    doc["output_dir"] = output_dir.string();
    if (aco) {
        const auto& p = aco->params;
        doc["aco"] = {{"alpha", p.pheromone_exponent},
                      {"beta", p.visibility_exponent},
                      {"rho", p.evaporation},
                      {"Q", p.deposit},
                      {"gamma", p.injection_rate},
                      {"tau0", p.initial_pheromone},
                      {"n_ants", aco->colony.n_ants},
                      {"n_realizations", aco->colony.n_realizations},
                      {"record_every", aco->colony.record_every},
                      {"t_end", aco->t_end},
                      {"dt", aco->dt},
                      {"record_every_steps", aco->record_every_steps}};
    }
    if (memnet) {
        const auto& d = memnet->device;
        doc["memnet"] = {{"sigma_on", d.sigma_on},
                         {"sigma_off", d.sigma_off},
                         {"kappa", d.kappa},
                         {"Gamma", d.relaxation},
                         {"I_t", memnet->threshold_currents},
                         {"I0", memnet->source_current},
                         {"mode", memnet->mode == CompileMode::chain ? "chain" : "lumped"},
                         {"t_end", memnet->t_end},
                         {"dt", memnet->dt},
                         {"record_every", memnet->record_every},
                         {"theta", memnet->theta}};
    }
    return doc;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2_two_path", "fig4_multipath", "fig6_threshold"};
    return names;
}

ExperimentConfig preset_config(std::string_view name) {
    ExperimentConfig cfg{std::string(name), preset_graph(name)};

    // Shared device constants: sigma_on = 0.01 S, sigma_off = 1e-5 S,
    // Gamma = 0.1 1/s, kappa = 1 1/(s*A).
    MemnetSettings memnet;
    memnet.device = DeviceParams{0.01, 1e-5, 1.0, 0.1, 0.0};

    AcoSettings aco;
    aco.params.pheromone_exponent = 1.0;
    aco.params.visibility_exponent = 1.0;
    aco.params.injection_rate = 1.0;
    aco.params.initial_pheromone = 0.5;
    aco.colony = ColonyRunSpec{1000, 1000, 0, 10, 0};

    if (name == "fig2_two_path") {
        // Two-path problem: rho = 0.1, gamma = 1, Q = 1; I0 = 0.09 A.
        aco.params.evaporation = 0.1;
        aco.params.deposit = 1.0;
        memnet.source_current = 0.09;
        cfg.engine = Engine::compare;
    } else {
        // Multi-path problem: rho = 0.05, Q = 0.1, 1e3 realizations of 1e3
        // ants; I0 = 0.1 A.
        aco.params.evaporation = 0.05;
        aco.params.deposit = 0.1;
        memnet.source_current = 0.1;
        cfg.engine = Engine::compare;
        if (name == "fig6_threshold") {
            // Threshold devices at I_t = 0.005 A and 0.03 A.
            memnet.threshold_currents = {0.005, 0.03};
            cfg.engine = Engine::memnet;
        }
    }
    cfg.aco = aco;
    cfg.memnet = memnet;
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const json& document) {
    Fields f(document, "");
    if (!f.has("graph")) invalid("graph", "required field is missing");
    const json& graph_doc = f.raw("graph");
    std::string label = "inline";
    std::optional<Graph> graph;
    if (graph_doc.is_string()) {
        label = graph_doc.get<std::string>();
        graph = preset_graph(label);
    } else {
        graph = parse_graph(graph_doc);
    }
    if (f.has("graph_label")) label = f.text_or("graph_label", label);

    ExperimentConfig cfg{label, *graph};
    const std::string engine = f.text_or("engine", "");
    if (engine.empty()) invalid("engine", "required field is missing");
    auto parsed = parse_engine(engine);
    if (!parsed) invalid("engine", "unknown engine '" + engine + "'");
    cfg.engine = *parsed;
    cfg.seed = f.count_or("seed", 0);
    cfg.output_dir = f.text_or("output_dir", "out");
    if (f.has("aco")) cfg.aco = parse_aco(f.raw("aco"));
    if (f.has("memnet")) cfg.memnet = parse_memnet(f.raw("memnet"));
    f.reject_unknown();
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(std::string_view path_or_preset) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), path_or_preset) != names.end()) {
        return preset_config(path_or_preset);
    }
    const std::filesystem::path file{std::string(path_or_preset)};
    std::ifstream in(file);
    if (!in) {
        if (file.extension() != ".json") {
            throw Error(ErrorCode::UnknownPreset, "'" + file.string() + "' is neither a preset nor a readable file");
        }
        throw Error(ErrorCode::ParseError, "cannot open " + file.string());
    }
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& err) {
        throw Error(ErrorCode::ParseError, file.string() + ": " + err.what());
    }
    return parse_config(document);
}

bool ResultSummary::all_agree() const {
    return std::all_of(engines.begin(), engines.end(),
                       [](const EngineOutcome& e) { return e.agrees_with_oracle; });
}

ordered_json ResultSummary::to_json() const {
    ordered_json doc;
    for (const auto& e : engines) {
        ordered_json entry{{"path", e.path}, {"final_state", e.final_state},
                           {"agrees_with_oracle", e.agrees_with_oracle}};
        if (e.threshold_current) entry["I_t"] = *e.threshold_current;
        if (e.realization_agreement) entry["realization_agreement"] = *e.realization_agreement;
        doc[e.label] = std::move(entry);
    }
    doc["oracle_path"] = oracle_path;
    doc["oracle_length"] = oracle_length;
    doc["duration_s"] = duration_s;
    return doc;
}

ResultSummary run_experiment(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    ResultSummary summary;
    const Path oracle = shortest_path_oracle(cfg.graph);
    summary.oracle_path = oracle.edges;
    summary.oracle_length = oracle.total_length;

    const bool compare = cfg.engine == Engine::compare;
    if (cfg.engine == Engine::aco_discrete || compare) {
        summary.engines.push_back(run_aco_discrete(cfg, oracle.edges));
    }
    if (cfg.engine == Engine::aco_continuous ||
        (compare && parallel_path_decomposition(cfg.graph))) {
        summary.engines.push_back(run_aco_continuous(cfg, oracle.edges));
    }
    if (cfg.engine == Engine::memnet || compare) {
        const auto& thresholds = cfg.memnet->threshold_currents;
        const bool sweep = thresholds.size() > 1;
        std::vector<std::future<EngineOutcome>> runs;
        for (double threshold : thresholds) {
            runs.push_back(std::async(std::launch::async, [&, threshold] {
                return run_memnet(cfg, threshold, sweep, oracle.edges);
            }));
        }
        for (auto& run : runs) summary.engines.push_back(run.get());
    }

    summary.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    if (write_files) {
        std::filesystem::create_directories(cfg.output_dir);
        for (const auto& e : summary.engines) {
            std::ostringstream csv;
            write_csv(csv, e.trajectory);
            write_text(cfg.output_dir / csv_file_name(e.label), csv.str());
        }
        write_text(cfg.output_dir / "summary.json", summary.to_json().dump(2) + "\n");
        write_text(cfg.output_dir / "config.json", cfg.to_json().dump(2) + "\n");
    }
    return summary;
}

int exit_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::StateBlowup:
        case ErrorCode::SingularSystem:
        case ErrorCode::StateOutOfRange:
            return kExitNumericalFailure;
        case ErrorCode::NoPathExtractable:
            return kExitReadoutFailure;
        default:
            return kExitConfigError;
    }
}

}  // namespace memswarm
