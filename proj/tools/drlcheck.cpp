// Command-line front end. Subcommands:
//   solve      satisfiability of one query file against one network
//   check      temporal property of a sliding-window transition system
//   invariant  bound search from an invariant config
//   oracle     brute-force ground-truth helpers (grid-sat, trace, reach)
// Exit codes: 0 proved/unsat, 1 refuted/sat, 2 exhausted/unknown or solver
// give-up, 3 bad usage or malformed input.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "drlcheck/abstraction.hpp"
#include "drlcheck/checker.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "drlcheck/invariants.hpp"
#include "drlcheck/network.hpp"
#include "drlcheck/oracle.hpp"
#include "drlcheck/report.hpp"
#include "drlcheck/solver.hpp"

namespace {

using namespace drlcheck;

struct CommonOpts {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string report_path;
    std::uint64_t max_nodes = 200000;
    double time_limit = 0.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Random seed echoed into reports");
    cmd->add_option("--threads", opts.threads, "Worker threads for query batches")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--report", opts.report_path,
                    "Write a machine-readable JSON report here");
    cmd->add_option("--max-nodes", opts.max_nodes,
                    "Branch-and-bound node budget per solver call");
    cmd->add_option("--time-limit", opts.time_limit,
                    "Wall-clock budget per solver call in seconds");
}

SolverConfig solver_config(const CommonOpts& opts) {
    SolverConfig cfg;
    cfg.max_nodes = opts.max_nodes;
    cfg.time_limit_seconds = opts.time_limit;
    return cfg;
}

ReportContext report_context(const std::string& command, const CommonOpts& opts,
                             const SolverConfig& solver) {
    ReportContext ctx;
    ctx.command = command;
    ctx.seed = opts.seed;
    ctx.threads = opts.threads;
    ctx.tau_lp = solver.tau_lp;
    ctx.tau_val = solver.tau_val;
    return ctx;
}

// Mask entries are "step,field" pairs or "older-than:<step>"; the latter
// frees every field of every step before <step>.
AbstractionMask parse_mask(const TransitionSpec& spec,
                           const std::vector<std::string>& entries) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const std::string& e : entries) {
        const std::string prefix = "older-than:";
        if (e.rfind(prefix, 0) == 0) {
            const std::size_t before = std::stoul(e.substr(prefix.size()));
            for (std::size_t step = 0; step < before; ++step)
                for (std::size_t field = 0; field < spec.fields_per_step; ++field)
                    pairs.emplace_back(step, field);
            continue;
        }
        const std::size_t comma = e.find(',');
        if (comma == std::string::npos)
            throw ParseError("bad --abstract-fields entry \"" + e +
                             "\", expected step,field or older-than:<step>");
        pairs.emplace_back(std::stoul(e.substr(0, comma)),
                           std::stoul(e.substr(comma + 1)));
    }
    return mask_from_fields(spec, pairs);
}

int run_solve(const std::string& net_path, const std::string& query_path,
              const std::string& spec_path,
              const std::vector<std::string>& mask_entries,
              const CommonOpts& opts) {
    const SolverConfig cfg = solver_config(opts);
    AbstractVerdict v;
    if (mask_entries.empty()) {
        auto net = std::make_shared<const Network>(load_network(net_path));
        const Query q = load_query(query_path, net);
        v.verdict = solve(q, cfg);
        v.provenance = Provenance::Direct;
    } else {
        if (spec_path.empty())
            throw ParseError("--abstract-fields needs --spec for the window "
                             "layout and global boxes");
        const TransitionSpec spec = load_transition_spec(spec_path);
        const Query q = load_query(query_path, spec.net);
        v = solve_with_abstraction(q, parse_mask(spec, mask_entries),
                                   global_boxes(spec), cfg);
    }
    std::cout << render_text(v);
    if (!opts.report_path.empty())
        write_report(machine_report(report_context("solve", opts, cfg), v),
                     opts.report_path);
    return exit_code_for(v.verdict.status);
}

int run_check(const std::string& spec_path, const std::string& property_path,
              const std::string& method, std::size_t k, std::size_t k_max,
              double timeout, const CommonOpts& opts) {
    const TransitionSpec spec = load_transition_spec(spec_path);
    const Property prop = load_property(property_path);

    CheckerConfig cfg;
    cfg.solver = solver_config(opts);
    cfg.threads = opts.threads;
    cfg.timeout_seconds = timeout;

    const bool safety = prop.kind == Property::Kind::Safety;
    CheckResult r;
    if (method == "portfolio") {
        r = portfolio(spec, prop, k_max, cfg);
    } else if (method == "bmc") {
        r = safety ? bmc(spec, prop.predicate, k, cfg)
                   : liveness_bmc(spec, prop.predicate, k, cfg);
    } else {
        r = safety ? k_induction_safety(spec, prop.predicate, k, cfg)
                   : k_induction_liveness(spec, prop.predicate, k, cfg);
    }

    std::cout << render_text(r, prop.name);
    if (!opts.report_path.empty())
        write_report(
            machine_report(report_context("check", opts, cfg.solver), r, prop.name),
            opts.report_path);
    return exit_code_for(r.outcome);
}

int run_invariant(const std::string& spec_path, const std::string& config_path,
                  double epsilon, bool have_epsilon, const CommonOpts& opts) {
    const TransitionSpec spec = load_transition_spec(spec_path);
    InvariantConfig cfg = load_invariant_config(config_path);
    if (have_epsilon) {
        cfg.output.epsilon = epsilon;
        cfg.input.epsilon = epsilon;
    }
    const SolverConfig solver = solver_config(opts);

    InvariantResult r;
    std::string template_name;
    if (cfg.tmpl == InvariantConfig::Template::Output) {
        r = find_output_invariant(spec, cfg.output, solver);
        template_name = "output";
    } else {
        r = find_input_invariant(spec, cfg.input, solver);
        template_name = "input";
    }

    std::cout << render_text(r, template_name);
    if (!opts.report_path.empty())
        write_report(machine_report(report_context("invariant", opts, solver), r,
                                    template_name),
                     opts.report_path);
    return r.found ? 0 : 2;
}

int run_grid_sat(const std::string& net_path, const std::string& query_path,
                 double pitch, std::uint64_t cap, double tol) {
    auto net = std::make_shared<const Network>(load_network(net_path));
    const Query q = load_query(query_path, net);
    const GridResult r = grid_sat(q, pitch, cap, tol);
    if (r.found) {
        std::cout << "satisfiable (" << r.points_tested << " points tested)\n";
        for (std::size_t copy = 0; copy < r.point.size(); ++copy) {
            std::cout << "  copy " << copy << ":";
            for (double v : r.point[copy])
                std::cout << " " << v;
            std::cout << "\n";
        }
        return 1;
    }
    std::cout << "no grid point satisfies the query (" << r.points_tested
              << " points tested)\n";
    return 0;
}

int run_trace(const std::string& spec_path, std::size_t length,
              std::uint64_t seed) {
    const TransitionSpec spec = load_transition_spec(spec_path);
    const auto trace = generate_trace(spec, length, seed);
    for (std::size_t step = 0; step < trace.size(); ++step) {
        std::cout << "step " << step << ":";
        for (double v : trace[step])
            std::cout << " " << v;
        std::cout << "\n";
    }
    return 0;
}

int run_reach(const std::string& spec_path, const std::string& property_path,
              std::size_t max_depth, double pitch, std::uint64_t state_cap) {
    const TransitionSpec spec = load_transition_spec(spec_path);
    const Property prop = load_property(property_path);
    const ReachResult r =
        reach_oracle(spec, prop.predicate, max_depth, pitch, state_cap);
    if (r.violation_depth) {
        std::cout << "predicate reachable at depth " << *r.violation_depth
                  << " (" << r.states_visited << " states visited)\n";
        return 1;
    }
    std::cout << "predicate unreachable within depth " << max_depth << " ("
              << r.states_visited << " states visited)\n";
    return 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Verification of ReLU policy networks and the sliding-window "
                 "transition systems built from them"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string net_path, query_path, spec_path, property_path, config_path;
    std::vector<std::string> mask_entries;
    std::string method = "portfolio";
    std::size_t k = 1, k_max = 8, length = 5, max_depth = 8;
    double timeout = 0.0, epsilon = 0.0, pitch = 0.1, tol = 0.0;
    std::uint64_t cap = 10000000, state_cap = 20000000;

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Decide satisfiability of a query file");
    solve_cmd->add_option("--net", net_path, "Network model file")->required();
    solve_cmd->add_option("--query", query_path, "Query file")->required();
    solve_cmd->add_option("--spec", spec_path,
                          "Transition spec, needed by --abstract-fields");
    solve_cmd->add_option("--abstract-fields", mask_entries,
                          "Free input fields: step,field pairs or "
                          "older-than:<step>");
    add_common(solve_cmd, opts);

    CLI::App* check_cmd =
        app.add_subcommand("check", "Check a temporal property");
    check_cmd->add_option("--spec", spec_path, "Transition spec file")
        ->required();
    check_cmd->add_option("--property", property_path, "Property file")
        ->required();
    check_cmd->add_option("--method", method, "portfolio, bmc or kind")
        ->check(CLI::IsMember({"portfolio", "bmc", "kind"}));
    check_cmd->add_option("--k", k, "Depth for bmc or kind");
    check_cmd->add_option("--k-max", k_max, "Portfolio depth ceiling");
    check_cmd->add_option("--timeout", timeout,
                          "Portfolio wall-clock budget in seconds");
    add_common(check_cmd, opts);

    CLI::App* inv_cmd =
        app.add_subcommand("invariant", "Search for an invariant bound");
    inv_cmd->add_option("--spec", spec_path, "Transition spec file")->required();
    inv_cmd->add_option("--config", config_path, "Invariant config file")
        ->required();
    CLI::Option* eps_opt =
        inv_cmd->add_option("--epsilon", epsilon, "Override the config epsilon");
    add_common(inv_cmd, opts);

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "Brute-force ground-truth helpers");
    oracle_cmd->require_subcommand(1);

    CLI::App* grid_cmd = oracle_cmd->add_subcommand(
        "grid-sat", "Search a grid over the input boxes for a witness");
    grid_cmd->add_option("--net", net_path, "Network model file")->required();
    grid_cmd->add_option("--query", query_path, "Query file")->required();
    grid_cmd->add_option("--pitch", pitch, "Grid spacing")->required();
    grid_cmd->add_option("--cap", cap, "Largest grid size to attempt");
    grid_cmd->add_option("--tol", tol, "Constraint slack");

    CLI::App* trace_cmd =
        oracle_cmd->add_subcommand("trace", "Sample a random concrete run");
    trace_cmd->add_option("--spec", spec_path, "Transition spec file")
        ->required();
    trace_cmd->add_option("--length", length, "Steps to generate");
    trace_cmd->add_option("--seed", opts.seed, "Random seed");

    CLI::App* reach_cmd = oracle_cmd->add_subcommand(
        "reach", "Breadth-first search over the discretized state space");
    reach_cmd->add_option("--spec", spec_path, "Transition spec file")
        ->required();
    reach_cmd->add_option("--property", property_path, "Property file")
        ->required();
    reach_cmd->add_option("--max-depth", max_depth, "Search depth");
    reach_cmd->add_option("--pitch", pitch, "Field grid spacing");
    reach_cmd->add_option("--state-cap", state_cap,
                          "Largest state count to attempt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Keep --help's exit 0, map every usage error onto the bad-input code.
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (solve_cmd->parsed())
            return run_solve(net_path, query_path, spec_path, mask_entries, opts);
        if (check_cmd->parsed())
            return run_check(spec_path, property_path, method, k, k_max, timeout,
                             opts);
        if (inv_cmd->parsed())
            return run_invariant(spec_path, config_path, epsilon,
                                 eps_opt->count() > 0, opts);
        if (grid_cmd->parsed())
            return run_grid_sat(net_path, query_path, pitch, cap, tol);
        if (trace_cmd->parsed())
            return run_trace(spec_path, length, opts.seed);
        if (reach_cmd->parsed())
            return run_reach(spec_path, property_path, max_depth, pitch,
                             state_cap);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 2;
    }
    return 3;
}
