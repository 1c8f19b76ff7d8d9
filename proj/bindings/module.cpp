// Python surface: file loading, query solving, property checking,
// invariant search and the brute-force oracles. Results cross the boundary
// as plain dicts and lists so the module works without numpy.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drlcheck/checker.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "drlcheck/invariants.hpp"
#include "drlcheck/network.hpp"
#include "drlcheck/oracle.hpp"
#include "drlcheck/solver.hpp"
#include "drlcheck/transition.hpp"

namespace py = pybind11;
using namespace drlcheck;

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

py::object witness_to_py(const std::optional<Witness>& w) {
    if (!w)
        return py::none();
    py::list rows;
    for (long copy = 0; copy < w->inputs.rows(); ++copy) {
        py::list row;
        for (long i = 0; i < w->inputs.cols(); ++i)
            row.append(w->inputs(copy, i));
        rows.append(std::move(row));
    }
    return rows;
}

py::dict stats_to_py(const SolveStats& s) {
    py::dict d;
    d["nodes"] = s.nodes;
    d["lp_calls"] = s.lp_calls;
    d["simplex_iterations"] = s.simplex_iterations;
    d["wall_seconds"] = s.wall_seconds;
    d["reason"] = s.reason;
    return d;
}

py::dict verdict_to_py(const Verdict& v) {
    py::dict d;
    d["status"] = to_string(v.status);
    d["witness"] = witness_to_py(v.witness);
    d["stats"] = stats_to_py(v.stats);
    return d;
}

py::object trace_to_py(const std::optional<Trace>& t) {
    if (!t)
        return py::none();
    py::dict d;
    d["lasso"] = t->lasso;
    py::list steps;
    for (const TraceStep& s : t->steps) {
        py::dict step;
        step["window"] = s.window;
        step["outputs"] = s.outputs;
        steps.append(std::move(step));
    }
    d["steps"] = std::move(steps);
    return d;
}

py::dict check_result_to_py(const CheckResult& r) {
    py::dict d;
    d["outcome"] = to_string(r.outcome);
    d["method"] = to_string(r.method);
    d["k"] = r.k;
    d["conclusive"] = r.conclusive;
    d["note"] = r.note;
    d["trace"] = trace_to_py(r.trace);
    d["queries"] = r.stats.queries;
    d["stats"] = stats_to_py(r.stats.solver);
    return d;
}

py::dict invariant_result_to_py(const InvariantResult& r,
                                const std::string& template_name) {
    py::dict d;
    d["template"] = template_name;
    d["found"] = r.found;
    d["degenerate"] = r.degenerate;
    d["proved_bound"] = r.proved_bound;
    d["has_bracket"] = r.has_bracket;
    d["bracketing_sat"] =
        r.has_bracket ? py::object(py::float_(r.bracketing_sat)) : py::none();
    d["precision_achieved"] = r.precision_achieved;
    d["iterations"] = r.iterations;
    d["note"] = r.note;
    py::list log;
    for (const InvariantQuery& q : r.query_log) {
        py::dict entry;
        entry["phase"] = q.phase;
        entry["bound"] = q.bound;
        entry["verdict"] = to_string(q.verdict);
        log.append(std::move(entry));
    }
    d["query_log"] = std::move(log);
    return d;
}

SolverConfig solver_config(std::uint64_t max_nodes, double time_limit) {
    SolverConfig cfg;
    cfg.max_nodes = max_nodes;
    cfg.time_limit_seconds = time_limit;
    return cfg;
}

}

PYBIND11_MODULE(drlcheck, m) {
    m.doc() = "Verification of ReLU policy networks and sliding-window "
              "transition systems";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ModelError>(m, "ModelError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());

    py::class_<Network, std::shared_ptr<Network>>(m, "Network")
        .def_property_readonly("input_size", &Network::input_size)
        .def_property_readonly("output_size", &Network::output_size)
        .def("evaluate", [](const Network& n, const std::vector<double>& input) {
            Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(
                input.data(), static_cast<long>(input.size()));
            return to_vector(n.evaluate(v));
        });

    m.def("load_network", [](const std::string& path) {
        return std::make_shared<Network>(load_network(path));
    });
    m.def("parse_network", [](const std::string& text) {
        return std::make_shared<Network>(parse_network(text));
    });
    m.def("format_network",
          [](std::shared_ptr<Network> net) { return format_network(*net); });
    m.def("save_network", [](std::shared_ptr<Network> net,
                             const std::string& path) { save_network(*net, path); });

    py::class_<Query>(m, "Query")
        .def_property_readonly("copies", &Query::copies);
    m.def("load_query", [](const std::string& path, std::shared_ptr<Network> net) {
        return load_query(path, net);
    });
    m.def("parse_query",
          [](const std::string& text, std::shared_ptr<Network> net) {
              return parse_query(text, net);
          });

    m.def(
        "solve",
        [](const Query& q, std::uint64_t max_nodes, double time_limit) {
            return verdict_to_py(solve(q, solver_config(max_nodes, time_limit)));
        },
        py::arg("query"), py::arg("max_nodes") = 200000,
        py::arg("time_limit") = 0.0);

    m.def(
        "validate_witness",
        [](const Query& q, const std::vector<std::vector<double>>& rows,
           double tau) {
            Witness w;
            w.inputs.resize(static_cast<long>(rows.size()),
                            rows.empty() ? 0
                                         : static_cast<long>(rows[0].size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows[0].size())
                    throw ModelError("witness rows have unequal lengths");
                for (std::size_t c = 0; c < rows[r].size(); ++c)
                    w.inputs(static_cast<long>(r), static_cast<long>(c)) =
                        rows[r][c];
            }
            return validate_witness(q, w, tau);
        },
        py::arg("query"), py::arg("inputs"), py::arg("tau") = 1e-6);

    py::class_<TransitionSpec>(m, "TransitionSpec")
        .def_readonly("window", &TransitionSpec::window)
        .def_readonly("fields_per_step", &TransitionSpec::fields_per_step)
        .def_readonly("field_roles", &TransitionSpec::field_roles);
    m.def("load_transition_spec",
          [](const std::string& path) { return load_transition_spec(path); });

    py::class_<Property>(m, "Property")
        .def_readonly("name", &Property::name)
        .def_property_readonly("kind", [](const Property& p) {
            return p.kind == Property::Kind::Safety ? "safety" : "liveness";
        });
    m.def("load_property",
          [](const std::string& path) { return load_property(path); });

    m.def(
        "unroll",
        [](const TransitionSpec& spec, std::size_t k, bool from_initial) {
            return unroll(spec, k,
                          from_initial ? UnrollMode::FromInitial
                                       : UnrollMode::FromAnywhere);
        },
        py::arg("spec"), py::arg("k"), py::arg("from_initial") = true);

    m.def(
        "check",
        [](const TransitionSpec& spec, const Property& prop,
           const std::string& method, std::size_t k, std::size_t k_max,
           unsigned threads, std::uint64_t max_nodes, double timeout) {
            CheckerConfig cfg;
            cfg.solver = solver_config(max_nodes, 0.0);
            cfg.threads = threads;
            cfg.timeout_seconds = timeout;
            const bool safety = prop.kind == Property::Kind::Safety;
            CheckResult r;
            if (method == "portfolio")
                r = portfolio(spec, prop, k_max, cfg);
            else if (method == "bmc")
                r = safety ? bmc(spec, prop.predicate, k, cfg)
                           : liveness_bmc(spec, prop.predicate, k, cfg);
            else if (method == "kind")
                r = safety ? k_induction_safety(spec, prop.predicate, k, cfg)
                           : k_induction_liveness(spec, prop.predicate, k, cfg);
            else
                throw ParseError("unknown method \"" + method +
                                 "\", expected portfolio, bmc or kind");
            return check_result_to_py(r);
        },
        py::arg("spec"), py::arg("property"), py::arg("method") = "portfolio",
        py::arg("k") = 1, py::arg("k_max") = 8, py::arg("threads") = 1,
        py::arg("max_nodes") = 200000, py::arg("timeout") = 0.0);

    m.def(
        "find_invariant",
        [](const TransitionSpec& spec, const std::string& config_path,
           std::uint64_t max_nodes) {
            const InvariantConfig cfg = load_invariant_config(config_path);
            const SolverConfig solver = solver_config(max_nodes, 0.0);
            if (cfg.tmpl == InvariantConfig::Template::Output)
                return invariant_result_to_py(
                    find_output_invariant(spec, cfg.output, solver), "output");
            return invariant_result_to_py(
                find_input_invariant(spec, cfg.input, solver), "input");
        },
        py::arg("spec"), py::arg("config_path"), py::arg("max_nodes") = 200000);

    m.def("evaluate_naive",
          [](std::shared_ptr<Network> net, const std::vector<double>& input) {
              return evaluate_naive(*net, input);
          });
    m.def("lipschitz_bound",
          [](std::shared_ptr<Network> net) { return lipschitz_bound(*net); });
    m.def(
        "grid_sat",
        [](const Query& q, double pitch, std::uint64_t cap, double tol) {
            const GridResult r = grid_sat(q, pitch, cap, tol);
            py::dict d;
            d["found"] = r.found;
            d["point"] = r.found ? py::cast(r.point) : py::object(py::none());
            d["points_tested"] = r.points_tested;
            return d;
        },
        py::arg("query"), py::arg("pitch"), py::arg("cap") = 10000000,
        py::arg("tol") = 0.0);
    m.def(
        "generate_trace",
        [](const TransitionSpec& spec, std::size_t length, std::uint64_t seed) {
            return generate_trace(spec, length, seed);
        },
        py::arg("spec"), py::arg("length"), py::arg("seed") = 0);
}
