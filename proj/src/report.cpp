#include "drlcheck/report.hpp"

#include <cstdio>
#include <sstream>

#include "json_util.hpp"

namespace drlcheck {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0)
            out += ", ";
        out += fmt(values[i]);
    }
    return out + "]";
}

Json json_header(const ReportContext& ctx) {
    Json j;
    j["command"] = ctx.command;
    j["seed"] = ctx.seed;
    j["threads"] = ctx.threads;
    j["tolerances"] = {{"tau_lp", ctx.tau_lp},
                       {"tau_val", ctx.tau_val},
                       {"delta_strict", ctx.delta_strict}};
    return j;
}

Json json_solve_stats(const SolveStats& s, std::uint64_t queries) {
    Json j;
    j["queries"] = queries;
    j["nodes"] = s.nodes;
    j["lp_calls"] = s.lp_calls;
    j["simplex_iterations"] = s.simplex_iterations;
    j["reason"] = s.reason;
    return j;
}

Json json_witness(const Witness& w) {
    Json rows = Json::array();
    for (long copy = 0; copy < w.inputs.rows(); ++copy) {
        Json row = Json::array();
        for (long i = 0; i < w.inputs.cols(); ++i)
            row.push_back(w.inputs(copy, i));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json json_trace(const Trace& t) {
    Json j;
    j["lasso"] = t.lasso;
    Json steps = Json::array();
    for (const TraceStep& s : t.steps) {
        Json step;
        step["window"] = s.window;
        step["outputs"] = s.outputs;
        steps.push_back(std::move(step));
    }
    j["steps"] = std::move(steps);
    return j;
}

std::string stats_line(const SolveStats& s, std::uint64_t queries,
                       double wall_seconds) {
    std::ostringstream out;
    if (queries != 0)
        out << queries << " queries, ";
    out << s.nodes << " nodes, " << s.lp_calls << " LP solves, "
        << s.simplex_iterations << " simplex iterations, "
        << fmt(wall_seconds) << " s";
    return out.str();
}

}

int exit_code_for(Status s) {
    switch (s) {
    case Status::Unsat: return 0;
    case Status::Sat: return 1;
    case Status::Unknown: return 2;
    }
    return 2;
}

int exit_code_for(CheckOutcome o) {
    switch (o) {
    case CheckOutcome::Proved: return 0;
    case CheckOutcome::Refuted: return 1;
    case CheckOutcome::Exhausted: return 2;
    }
    return 2;
}

Json machine_report(const ReportContext& ctx, const AbstractVerdict& v) {
    Json j = json_header(ctx);
    j["status"] = to_string(v.verdict.status);
    j["provenance"] = to_string(v.provenance);
    j["witness"] =
        v.verdict.witness ? json_witness(*v.verdict.witness) : Json(nullptr);
    j["stats"] = json_solve_stats(v.verdict.stats, 0);
    j["exit_code"] = exit_code_for(v.verdict.status);
    return j;
}

Json machine_report(const ReportContext& ctx, const CheckResult& r,
                    const std::string& property_name) {
    Json j = json_header(ctx);
    j["property"] = property_name;
    j["outcome"] = to_string(r.outcome);
    j["method"] = to_string(r.method);
    j["k"] = r.k;
    j["conclusive"] = r.conclusive;
    j["note"] = r.note;
    j["trace"] = r.trace ? json_trace(*r.trace) : Json(nullptr);
    j["stats"] = json_solve_stats(r.stats.solver, r.stats.queries);
    j["exit_code"] = exit_code_for(r.outcome);
    return j;
}

Json machine_report(const ReportContext& ctx, const InvariantResult& r,
                    const std::string& template_name) {
    Json j = json_header(ctx);
    j["template"] = template_name;
    j["found"] = r.found;
    j["degenerate"] = r.degenerate;
    j["proved_bound"] = r.proved_bound;
    j["has_bracket"] = r.has_bracket;
    j["bracketing_sat"] = r.has_bracket ? Json(r.bracketing_sat) : Json(nullptr);
    j["precision_achieved"] = r.precision_achieved;
    j["iterations"] = r.iterations;
    j["note"] = r.note;
    Json log = Json::array();
    for (const InvariantQuery& q : r.query_log) {
        Json entry;
        entry["phase"] = q.phase;
        entry["bound"] = q.bound;
        entry["verdict"] = to_string(q.verdict);
        log.push_back(std::move(entry));
    }
    j["query_log"] = std::move(log);
    j["stats"] = json_solve_stats(r.total_stats, r.query_log.size());
    j["exit_code"] = r.found ? 0 : 2;
    return j;
}

std::string render_text(const AbstractVerdict& v) {
    std::ostringstream out;
    out << "status: " << to_string(v.verdict.status);
    if (v.provenance != Provenance::Direct)
        out << " (" << to_string(v.provenance) << ")";
    out << "\n";
    if (v.verdict.witness) {
        out << "witness:\n";
        const Eigen::MatrixXd& m = v.verdict.witness->inputs;
        for (long copy = 0; copy < m.rows(); ++copy) {
            std::vector<double> row(m.cols());
            for (long i = 0; i < m.cols(); ++i)
                row[static_cast<std::size_t>(i)] = m(copy, i);
            out << "  copy " << copy << ": " << fmt_list(row) << "\n";
        }
    }
    if (!v.verdict.stats.reason.empty())
        out << "reason: " << v.verdict.stats.reason << "\n";
    out << "stats: "
        << stats_line(v.verdict.stats, 0, v.verdict.stats.wall_seconds) << "\n";
    return out.str();
}

std::string render_text(const CheckResult& r, const std::string& property_name) {
    std::ostringstream out;
    out << "property \"" << property_name << "\": " << to_string(r.outcome)
        << " by " << to_string(r.method) << " at k = " << r.k;
    if (!r.conclusive)
        out << " (inconclusive)";
    out << "\n";
    if (!r.note.empty())
        out << "note: " << r.note << "\n";
    if (r.trace) {
        out << "trace (" << r.trace->steps.size() << " steps"
            << (r.trace->lasso ? ", lasso" : "") << "):\n";
        for (std::size_t i = 0; i < r.trace->steps.size(); ++i) {
            const TraceStep& s = r.trace->steps[i];
            out << "  step " << i << ": window " << fmt_list(s.window)
                << " -> outputs " << fmt_list(s.outputs) << "\n";
        }
    }
    out << "stats: "
        << stats_line(r.stats.solver, r.stats.queries, r.stats.wall_seconds)
        << "\n";
    return out.str();
}

std::string render_text(const InvariantResult& r,
                        const std::string& template_name) {
    std::ostringstream out;
    out << template_name << "-bound search: ";
    if (r.found)
        out << "proved bound " << fmt(r.proved_bound);
    else
        out << "no invariant found";
    if (r.degenerate)
        out << " (degenerate)";
    out << "\n";
    if (r.has_bracket)
        out << "bracket: still satisfiable at " << fmt(r.bracketing_sat)
            << ", gap " << fmt(r.precision_achieved) << " after "
            << r.iterations << " search probes\n";
    if (!r.note.empty())
        out << "note: " << r.note << "\n";
    out << "stats: "
        << stats_line(r.total_stats, r.query_log.size(),
                      r.total_stats.wall_seconds)
        << "\n";
    return out.str();
}

void write_report(const Json& report, const std::string& path) {
    write_text_file(path, report.dump(2) + "\n");
}

}
