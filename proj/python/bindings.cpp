#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memswarm/aco.hpp"
#include "memswarm/errors.hpp"
#include "memswarm/experiment.hpp"
#include "memswarm/graph.hpp"
#include "memswarm/memnet.hpp"

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace memswarm;

namespace {

py::object json_to_python(const std::string& text) {
    return py::module_::import("json").attr("loads")(text);
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict out;
    out["columns"] = t.columns;
    out["rows"] = t.rows;
    return out;
}

Graph graph_from_edges(const std::vector<std::tuple<std::string, std::string, double>>& edges,
                       const std::string& source, const std::string& target,
                       const std::optional<std::vector<std::string>>& nodes) {
    std::vector<EdgeSpec> specs;
    for (const auto& [u, v, length] : edges) specs.push_back({u, v, length});
    if (nodes) return Graph::build(*nodes, specs, source, target);
    return Graph::build(specs, source, target);
}

std::vector<bool> forbidden_mask(const Graph& g, const std::vector<NodeId>& forbidden) {
    std::vector<bool> mask(g.node_count(), false);
    for (NodeId n : forbidden) mask.at(n) = true;
    return mask;
}

}  // namespace

PYBIND11_MODULE(memswarm, m) {
    m.doc() = "Shortest paths by memristive network dynamics and ant colony optimization.";

    // Raised for every library error; `code` holds the error code name.
    static PyObject* error_type = PyErr_NewException("memswarm.MemswarmError", PyExc_RuntimeError, nullptr);
    m.attr("MemswarmError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& err) {
            const std::string code(to_string(err.code()));
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(code + ": " + err.detail());
            exc.attr("code") = code;
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<Edge>(m, "Edge")
        .def_readonly("u", &Edge::u)
        .def_readonly("v", &Edge::v)
        .def_readonly("length", &Edge::length)
        .def_readonly("id", &Edge::id);

    py::class_<Graph>(m, "Graph")
        .def(py::init(&graph_from_edges), py::arg("edges"), py::arg("source"), py::arg("target"),
             py::arg("nodes") = py::none())
        .def_property_readonly("node_count", &Graph::node_count)
        .def_property_readonly("edge_count", &Graph::edge_count)
        .def_property_readonly("node_names", &Graph::node_names)
        .def_property_readonly("edges", [](const Graph& g) { return std::vector<Edge>(g.edges().begin(), g.edges().end()); })
        .def_property_readonly("source", &Graph::source)
        .def_property_readonly("target", &Graph::target)
        .def("find_node", &Graph::find_node);

    py::class_<Path>(m, "Path")
        .def_readonly("edges", &Path::edges)
        .def_readonly("total_length", &Path::total_length)
        .def("__eq__", [](const Path& a, const Path& b) { return a == b; })
        .def("__repr__", [](const Path& p) {
            return "Path(edges=" + py::repr(py::cast(p.edges)).cast<std::string>() +
                   ", total_length=" + std::to_string(p.total_length) + ")";
        });

    m.def("shortest_path_oracle", &shortest_path_oracle, py::arg("graph"));
    m.def("enumerate_simple_paths", &enumerate_simple_paths, py::arg("graph"), py::arg("max_paths"));
    m.def("is_simple_terminal_path", &is_simple_terminal_path, py::arg("graph"), py::arg("path"));
    m.def("make_path", &make_path, py::arg("graph"), py::arg("edges"));
    m.def("greedy_max_walk",
          [](const Graph& g, const std::vector<double>& values) { return greedy_max_walk(g, values); },
          py::arg("graph"), py::arg("edge_values"));

    py::class_<AcoParams>(m, "AcoParams")
        .def(py::init([](double alpha, double beta, double rho, double q, double gamma, double tau0) {
                 AcoParams p{alpha, beta, rho, q, gamma, tau0};
                 p.validate();
                 return p;
             }),
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("rho") = 0.1, py::arg("Q") = 1.0,
             py::arg("gamma") = 1.0, py::arg("tau0") = 0.5)
        .def_readwrite("alpha", &AcoParams::pheromone_exponent)
        .def_readwrite("beta", &AcoParams::visibility_exponent)
        .def_readwrite("rho", &AcoParams::evaporation)
        .def_readwrite("Q", &AcoParams::deposit)
        .def_readwrite("gamma", &AcoParams::injection_rate)
        .def_readwrite("tau0", &AcoParams::initial_pheromone);

    m.def(
        "transition_probabilities",
        [](const Graph& g, const std::vector<double>& tau, const AcoParams& params, NodeId current,
           const std::vector<NodeId>& forbidden) {
            const auto dist = transition_probabilities(g, PheromoneState{tau}, params, current,
                                                       forbidden_mask(g, forbidden));
            return std::make_pair(dist.edges, dist.probabilities);
        },
        py::arg("graph"), py::arg("tau"), py::arg("params"), py::arg("current"), py::arg("forbidden") = std::vector<NodeId>{},
        "Allowable edges and their move probabilities.");
    m.def(
        "deposit_and_evaporate",
        [](const std::vector<double>& tau, const std::optional<Path>& path, const AcoParams& params) {
            return deposit_and_evaporate(PheromoneState{tau}, path, params).tau;
        },
        py::arg("tau"), py::arg("path"), py::arg("params"));
    m.def(
        "run_colony",
        [](const Graph& g, const AcoParams& params, std::size_t n_ants, std::size_t n_realizations,
           std::uint64_t seed, std::size_t record_every, unsigned threads) {
            ColonyResult result;
            {
                py::gil_scoped_release release;
                result = run_colony(g, params, {n_ants, n_realizations, seed, record_every, threads});
            }
            py::dict out;
            out["mean"] = trajectory_dict(result.mean);
            std::vector<std::vector<double>> finals;
            for (auto& s : result.final_states) finals.push_back(std::move(s.tau));
            out["final_states"] = finals;
            out["discarded_ants"] = result.discarded_ants;
            return out;
        },
        py::arg("graph"), py::arg("params"), py::arg("n_ants"), py::arg("n_realizations"), py::arg("seed") = 0,
        py::arg("record_every") = 1, py::arg("threads") = 0);
    m.def(
        "integrate_parallel_path_aco",
        [](const std::vector<double>& lengths, const AcoParams& params, double t_end, double dt,
           std::size_t record_every) {
            const auto result = integrate_parallel_path_aco(lengths, params, t_end, dt, record_every);
            return py::make_tuple(trajectory_dict(result.trajectory), result.final_tau);
        },
        py::arg("lengths"), py::arg("params"), py::arg("t_end"), py::arg("dt"), py::arg("record_every") = 1);
    m.def("aco_steady_state_two_path", &aco_steady_state_two_path, py::arg("params"), py::arg("L1"));

    py::class_<DeviceParams>(m, "DeviceParams")
        .def(py::init([](double sigma_on, double sigma_off, double kappa, double gamma, double threshold) {
                 DeviceParams p{sigma_on, sigma_off, kappa, gamma, threshold};
                 p.validate();
                 return p;
             }),
             py::arg("sigma_on") = 0.01, py::arg("sigma_off") = 1e-5, py::arg("kappa") = 1.0,
             py::arg("Gamma") = 0.1, py::arg("I_t") = 0.0)
        .def_readwrite("sigma_on", &DeviceParams::sigma_on)
        .def_readwrite("sigma_off", &DeviceParams::sigma_off)
        .def_readwrite("kappa", &DeviceParams::kappa)
        .def_readwrite("Gamma", &DeviceParams::relaxation)
        .def_readwrite("I_t", &DeviceParams::threshold_current);

    m.def("conductance", &conductance, py::arg("params"), py::arg("x"));
    m.def("state_derivative", &state_derivative, py::arg("params"), py::arg("x"), py::arg("current"));

    py::enum_<CompileMode>(m, "CompileMode")
        .value("chain", CompileMode::chain)
        .value("lumped", CompileMode::lumped);

    py::class_<Branch>(m, "Branch")
        .def_readonly("from_node", &Branch::from)
        .def_readonly("to_node", &Branch::to)
        .def_readonly("multiplicity", &Branch::multiplicity)
        .def_readonly("edge", &Branch::edge);

    py::class_<Network>(m, "Network")
        .def_readonly("branches", &Network::branches)
        .def_readonly("node_count", &Network::node_count)
        .def_readonly("source_current", &Network::source_current)
        .def_readonly("mode", &Network::mode);

    m.def("graph_to_network", &graph_to_network, py::arg("graph"), py::arg("params"),
          py::arg("mode") = CompileMode::lumped, py::arg("I0"));

    py::class_<OperatingPoint>(m, "OperatingPoint")
        .def_readonly("node_voltages", &OperatingPoint::node_voltages)
        .def_readonly("branch_currents", &OperatingPoint::branch_currents)
        .def_readonly("branch_conductances", &OperatingPoint::branch_conductances);

    m.def(
        "solve_dc", [](const Network& net, const std::vector<double>& x) { return solve_dc(net, x); },
        py::arg("network"), py::arg("states"));
    m.def(
        "step", [](const Network& net, const std::vector<double>& x, double dt) { return step(net, x, dt); },
        py::arg("network"), py::arg("states"), py::arg("dt"));
    m.def(
        "simulate",
        [](const Network& net, double t_end, double dt, std::size_t record_every, bool stop_at_steady_state,
           std::vector<double> initial_states) {
            SimulationOptions options;
            options.t_end = t_end;
            options.dt = dt;
            options.record_every = record_every;
            options.stop_at_steady_state = stop_at_steady_state;
            options.initial_states = std::move(initial_states);
            SimulationResult result;
            {
                py::gil_scoped_release release;
                result = simulate(net, options);
            }
            py::dict out;
            out["trajectory"] = trajectory_dict(result.trajectory);
            out["final_states"] = result.final_states;
            out["final_edge_states"] = result.final_edge_states;
            out["final_time"] = result.final_time;
            out["steps_taken"] = result.steps_taken;
            out["clamp_events"] = result.clamp_events;
            out["reached_steady_state"] = result.reached_steady_state;
            return out;
        },
        py::arg("network"), py::arg("t_end") = 200.0, py::arg("dt") = 1e-3, py::arg("record_every") = 1000,
        py::arg("stop_at_steady_state") = false, py::arg("initial_states") = std::vector<double>{});

    py::class_<TwoPathSteadyState>(m, "TwoPathSteadyState")
        .def_readonly("C", &TwoPathSteadyState::drive)
        .def_readonly("sigma_tilde_1", &TwoPathSteadyState::sigma_tilde_1)
        .def_readonly("sigma_tilde_2", &TwoPathSteadyState::sigma_tilde_2)
        .def_readonly("x1", &TwoPathSteadyState::x1)
        .def_readonly("x2", &TwoPathSteadyState::x2);

    m.def("memristive_two_path_steady_state", &memristive_two_path_steady_state, py::arg("params"),
          py::arg("I0"));
    m.def(
        "read_solution",
        [](const Network& net, const std::vector<double>& x, double theta) { return read_solution(net, x, theta); },
        py::arg("network"), py::arg("final_states"), py::arg("theta") = 0.5);
    m.def("preset_two_path_graph", &preset_two_path_graph);
    m.def("preset_multipath_graph", &preset_multipath_graph);

    m.def("preset_names", &preset_names);
    m.def(
        "load_config", [](const std::string& name) { return json_to_python(load_config(name).to_json().dump()); },
        py::arg("path_or_preset"), "Fully resolved config as a dict.");
    m.def(
        "run_experiment",
        [](const py::object& config, const std::optional<std::string>& output_dir, bool write_files) {
            ExperimentConfig cfg = py::isinstance<py::str>(config)
                                       ? load_config(config.cast<std::string>())
                                       : parse_config(nlohmann::json::parse(
                                             py::module_::import("json").attr("dumps")(config).cast<std::string>()));
            if (output_dir) cfg.output_dir = *output_dir;
            ResultSummary summary;
            {
                py::gil_scoped_release release;
                summary = run_experiment(cfg, write_files);
            }
            return json_to_python(summary.to_json().dump());
        },
        py::arg("config"), py::arg("output_dir") = py::none(), py::arg("write_files") = false,
        "Runs a preset name or config dict; returns the summary dict.");
}
