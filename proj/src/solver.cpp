#include "drlcheck/solver.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <utility>
#include <vector>

#include "compile.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/log.hpp"
#include "drlcheck/simplex.hpp"

namespace drlcheck {

std::string to_string(Status s) {
    switch (s) {
    case Status::Sat: return "sat";
    case Status::Unsat: return "unsat";
    default: return "unknown";
    }
}

void SolveStats::absorb(const SolveStats& other) {
    nodes += other.nodes;
    lp_calls += other.lp_calls;
    simplex_iterations += other.simplex_iterations;
    wall_seconds += other.wall_seconds;
    if (reason.empty())
        reason = other.reason;
}

namespace {

constexpr std::size_t kNoBranch = static_cast<std::size_t>(-1);

void add_row(LpProblem& lp, std::vector<std::pair<std::size_t, double>> terms,
             Relation rel, double rhs) {
    std::sort(terms.begin(), terms.end());
    LpProblem::Row row;
    row.rel = rel;
    row.rhs = rhs;
    for (const auto& [var, coef] : terms) {
        if (!row.terms.empty() && row.terms.back().first == var)
            row.terms.back().second += coef;
        else
            row.terms.emplace_back(var, coef);
    }
    std::erase_if(row.terms, [](const auto& t) { return t.second == 0.0; });
    lp.rows.push_back(std::move(row));
}

// One LP variable per input class, then one per computed neuron of every
// copy. Variable bounds come from the node's propagated intervals, so a
// fixed or stable ReLU needs no row beyond the weighted-sum equations.
LpProblem build_node_lp(const Query& q, const CompiledQuery& cq,
                        const ReluIndex& ri, const std::vector<ReluPhase>& phases,
                        const QueryBounds& b) {
    const auto& layers = q.net().layers();
    std::vector<std::size_t> layer_off(layers.size());
    std::size_t per_copy = 0;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        layer_off[li] = per_copy;
        per_copy += layers[li].size;
    }
    const std::size_t nclasses = cq.class_range.size();

    LpProblem lp;
    lp.num_vars = nclasses + q.copies() * per_copy;
    lp.lower.resize(lp.num_vars);
    lp.upper.resize(lp.num_vars);

    auto nvar = [&](std::size_t copy, std::size_t li, std::size_t r) {
        return nclasses + copy * per_copy + layer_off[li] + r;
    };
    // Value feeding cell `cell` of a copy: the input class for cell 0,
    // the producing neuron otherwise.
    auto cell_var = [&](std::size_t copy, std::size_t cell, std::size_t r) {
        return cell == 0 ? cq.class_of[cq.flat(copy, r)] : nvar(copy, cell - 1, r);
    };

    for (std::size_t c = 0; c < nclasses; ++c) {
        lp.lower[c] = cq.class_range[c].lo;
        lp.upper[c] = cq.class_range[c].hi;
    }
    for (std::size_t copy = 0; copy < q.copies(); ++copy)
        for (std::size_t li = 0; li < layers.size(); ++li)
            for (std::size_t r = 0; r < layers[li].size; ++r) {
                const Interval& iv = b.at(copy, li + 1, r);
                lp.lower[nvar(copy, li, r)] = iv.lo;
                lp.upper[nvar(copy, li, r)] = iv.hi;
            }

    for (std::size_t copy = 0; copy < q.copies(); ++copy) {
        std::size_t relu_pos = 0;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const Layer& l = layers[li];
            if (l.kind == LayerKind::WeightedSum) {
                for (std::size_t r = 0; r < l.size; ++r) {
                    std::vector<std::pair<std::size_t, double>> terms;
                    for (long c = 0; c < l.weights.cols(); ++c) {
                        const double w = l.weights(static_cast<long>(r), c);
                        if (w != 0.0)
                            terms.emplace_back(
                                cell_var(copy, li, static_cast<std::size_t>(c)), w);
                    }
                    terms.emplace_back(nvar(copy, li, r), -1.0);
                    add_row(lp, std::move(terms), Relation::Eq,
                            -l.biases(static_cast<long>(r)));
                }
            } else {
                for (std::size_t j = 0; j < l.size; ++j) {
                    const ReluPhase phase = phases[ri.id(copy, relu_pos, j)];
                    const Interval& pre = b.at(copy, li, j);
                    const std::size_t x = cell_var(copy, li, j);
                    const std::size_t y = nvar(copy, li, j);
                    if (phase == ReluPhase::Inactive)
                        continue;  // y is pinned to [0, 0] by its bounds
                    if (phase == ReluPhase::Active || pre.lo >= 0.0) {
                        add_row(lp, {{y, 1.0}, {x, -1.0}}, Relation::Eq, 0.0);
                    } else if (pre.hi <= 0.0) {
                        continue;  // stable inactive, bounds give y = 0
                    } else {
                        // Triangle relaxation of a straddling ReLU.
                        add_row(lp, {{y, 1.0}, {x, -1.0}}, Relation::Ge, 0.0);
                        add_row(lp, {{y, pre.hi - pre.lo}, {x, -pre.hi}},
                                Relation::Le, -pre.hi * pre.lo);
                    }
                }
                ++relu_pos;
            }
        }
    }

    const std::size_t last = layers.size() - 1;
    for (const LinearConstraint* c : cq.rows) {
        std::vector<std::pair<std::size_t, double>> terms;
        terms.reserve(c->terms.size());
        for (const LinearTerm& t : c->terms)
            terms.emplace_back(t.var.site == Site::Input
                                   ? cq.class_of[cq.flat(t.var.copy, t.var.index)]
                                   : nvar(t.var.copy, last, t.var.index),
                               t.coef);
        add_row(lp, std::move(terms), c->rel, c->constant);
    }
    return lp;
}

// Widest straddling unknown ReLU, ties on the lowest id.
std::size_t pick_branch(const ReluIndex& ri, const std::vector<ReluPhase>& phases,
                        const QueryBounds& b, std::size_t copies) {
    std::size_t best = kNoBranch;
    double best_width = 0.0;
    for (std::size_t copy = 0; copy < copies; ++copy)
        for (std::size_t pos = 0; pos < ri.relu_layers.size(); ++pos)
            for (std::size_t j = 0; j < ri.layer_sizes[pos]; ++j) {
                const std::size_t id = ri.id(copy, pos, j);
                if (phases[id] != ReluPhase::Unknown)
                    continue;
                const Interval& pre = b.at(copy, ri.relu_layers[pos], j);
                if (pre.empty() || pre.lo >= 0.0 || pre.hi <= 0.0)
                    continue;
                if (best == kNoBranch || pre.width() > best_width) {
                    best = id;
                    best_width = pre.width();
                }
            }
    return best;
}

Witness witness_from_point(const Query& q, const CompiledQuery& cq,
                           const std::vector<double>& point) {
    Witness w;
    w.inputs.resize(static_cast<long>(q.copies()),
                    static_cast<long>(q.net().input_size()));
    for (std::size_t copy = 0; copy < q.copies(); ++copy)
        for (std::size_t i = 0; i < q.net().input_size(); ++i)
            w.inputs(static_cast<long>(copy), static_cast<long>(i)) =
                point[cq.class_of[cq.flat(copy, i)]];
    return w;
}

}

Verdict solve(const Query& q, const SolverConfig& cfg) {
    const auto started = std::chrono::steady_clock::now();
    Verdict v;
    auto finish = [&](Status s, std::string reason = {}) {
        v.status = s;
        v.stats.reason = std::move(reason);
        v.stats.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        return v;
    };

    const CompiledQuery cq = compile_query(q);
    if (cq.infeasible)
        return finish(Status::Unsat);

    for (std::size_t copy = 0; copy < q.copies(); ++copy)
        for (std::size_t i = 0; i < q.net().input_size(); ++i) {
            const Interval& r = cq.class_range[cq.class_of[cq.flat(copy, i)]];
            if (!r.finite())
                throw ModelError("input " +
                                 to_string(VarRef{copy, Site::Input, i}) +
                                 " has an unbounded effective range; the solver "
                                 "needs finite input boxes");
        }

    const ReluIndex ri(q.net());
    LpConfig lp_cfg;
    lp_cfg.tau = cfg.tau_lp;

    std::vector<std::vector<ReluPhase>> stack;
    stack.emplace_back(ri.count(q.copies()), ReluPhase::Unknown);
    bool unresolved = false;
    std::string unresolved_reason;

    while (!stack.empty()) {
        if (v.stats.nodes >= cfg.max_nodes)
            return finish(Status::Unknown, "node budget exhausted");
        if (cfg.time_limit_seconds > 0.0) {
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              started)
                    .count();
            if (elapsed > cfg.time_limit_seconds)
                return finish(Status::Unknown, "time limit exceeded");
        }

        std::vector<ReluPhase> phases = std::move(stack.back());
        stack.pop_back();
        ++v.stats.nodes;

        const QueryBounds b = propagate_with_phases(q, cq, ri, phases);
        if (b.any_empty())
            continue;

        const LpProblem lp = build_node_lp(q, cq, ri, phases, b);
        const LpResult r = lp_feasible(lp, lp_cfg);
        ++v.stats.lp_calls;
        v.stats.simplex_iterations += r.iterations;
        if (r.status == LpStatus::Infeasible)
            continue;

        const std::size_t branch = pick_branch(ri, phases, b, q.copies());
        if (r.status == LpStatus::Feasible) {
            Witness w = witness_from_point(q, cq, r.point);
            if (validate_witness(q, w, cfg.tau_val)) {
                v.witness = std::move(w);
                return finish(Status::Sat);
            }
            if (branch == kNoBranch) {
                unresolved = true;
                unresolved_reason =
                    "relaxation feasible on a fully split node but the witness "
                    "failed validation";
                continue;
            }
        } else if (branch == kNoBranch) {
            unresolved = true;
            unresolved_reason = "simplex stalled on a fully split node";
            continue;
        }

        log_debug("node ", v.stats.nodes, ": branching on relu ", branch);
        std::vector<ReluPhase> active = phases;
        active[branch] = ReluPhase::Active;
        phases[branch] = ReluPhase::Inactive;
        stack.push_back(std::move(active));
        stack.push_back(std::move(phases));
    }

    if (unresolved)
        return finish(Status::Unknown, unresolved_reason);
    return finish(Status::Unsat);
}

bool validate_witness(const Query& q, const Witness& w, double tau_val) {
    const std::size_t copies = q.copies();
    const std::size_t in = q.net().input_size();
    if (w.inputs.rows() != static_cast<long>(copies) ||
        w.inputs.cols() != static_cast<long>(in))
        throw ModelError("witness shape " + std::to_string(w.inputs.rows()) + "x" +
                         std::to_string(w.inputs.cols()) + " does not match " +
                         std::to_string(copies) + " copies of " +
                         std::to_string(in) + " inputs");

    Eigen::MatrixXd outputs(static_cast<long>(copies),
                            static_cast<long>(q.net().output_size()));
    if (!w.inputs.allFinite())
        return false;
    for (std::size_t copy = 0; copy < copies; ++copy) {
        for (std::size_t i = 0; i < in; ++i)
            if (!q.box(copy, i).contains(
                    w.inputs(static_cast<long>(copy), static_cast<long>(i)),
                    tau_val))
                return false;
        outputs.row(static_cast<long>(copy)) =
            q.net()
                .evaluate(w.inputs.row(static_cast<long>(copy)).transpose())
                .transpose();
    }

    auto value_of = [&](const VarRef& var) {
        return var.site == Site::Input
                   ? w.inputs(static_cast<long>(var.copy),
                              static_cast<long>(var.index))
                   : outputs(static_cast<long>(var.copy),
                             static_cast<long>(var.index));
    };
    for (const LinearConstraint& c : q.constraints())
        if (!relation_holds(constraint_lhs(c, value_of), c.rel, c.constant, tau_val))
            return false;
    for (const LinearConstraint& c : q.couplings())
        if (!relation_holds(constraint_lhs(c, value_of), c.rel, c.constant, tau_val))
            return false;
    return true;
}

}
