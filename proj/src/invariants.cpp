#include "drlcheck/invariants.hpp"

#include <cmath>
#include <limits>

#include "drlcheck/bounds.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/log.hpp"

namespace drlcheck {

Box RoleBox::at(double epsilon) const {
    return Box(base_lo + eps_lo * epsilon, base_hi + eps_hi * epsilon);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-copy query whose input boxes come from the role table, falling
// back to the field's global box for roles without an entry.
Query role_query(const TransitionSpec& spec, double epsilon,
                 const std::map<std::string, RoleBox>& role_boxes) {
    Query q(spec.net, 1);
    for (std::size_t field = 0; field < spec.fields_per_step; ++field) {
        const std::string role =
            field < spec.field_roles.size() ? spec.field_roles[field] : "";
        const auto it = role_boxes.find(role);
        const Box box =
            it != role_boxes.end() ? it->second.at(epsilon) : spec.field_boxes[field];
        for (std::size_t step = 0; step < spec.window; ++step)
            q.set_box(0, spec.position(step, field), box);
    }
    return q;
}

std::vector<std::size_t> searched_positions(const TransitionSpec& spec,
                                            const std::string& role) {
    std::vector<std::size_t> out;
    for (std::size_t field = 0; field < spec.field_roles.size(); ++field)
        if (spec.field_roles[field] == role)
            for (std::size_t step = 0; step < spec.window; ++step)
                out.push_back(spec.position(step, field));
    if (out.empty())
        throw ModelError("searched role \"" + role +
                         "\" does not appear in the field layout");
    return out;
}

// Runs the probe queries of one search, logging every verdict and aborting
// on a verdict that breaks Boolean monotonicity along the searched axis.
class ProbeDriver {
public:
    // grows_with_bound: raising the bound can only enlarge the feasible set
    // (the output template); false for the input template, where raising
    // the lower bound shrinks it.
    ProbeDriver(InvariantResult& res, const SolverConfig& solver,
                bool grows_with_bound)
        : res_(res), solver_(solver), grows_(grows_with_bound) {}

    Status operator()(const char* phase, double bound, const Query& q) {
        const Verdict v = solve(q, solver_);
        res_.total_stats.absorb(v.stats);
        res_.query_log.push_back({phase, bound, v.status});
        log_debug("invariant probe ", phase, " at ", bound, ": ",
                  to_string(v.status));
        if (v.status == Status::Unknown)
            throw SolverError("invariant search gave up at bound " +
                              std::to_string(bound) + ": " + v.stats.reason);
        if (v.status == Status::Sat) {
            any_sat_ = true;
            if (grows_)
                min_sat_ = std::min(min_sat_, bound);
            else
                max_sat_ = std::max(max_sat_, bound);
        } else {
            if (grows_)
                max_unsat_ = std::max(max_unsat_, bound);
            else
                min_unsat_ = std::min(min_unsat_, bound);
        }
        const bool violated =
            grows_ ? max_unsat_ >= min_sat_ : min_unsat_ <= max_sat_;
        if (violated)
            throw SolverError(
                "monotonicity violation along the searched axis: satisfiable at " +
                std::to_string(grows_ ? min_sat_ : max_sat_) +
                " yet unsatisfiable at " +
                std::to_string(grows_ ? max_unsat_ : min_unsat_));
        return v.status;
    }

    bool any_sat() const { return any_sat_; }
    double best_sat() const { return grows_ ? min_sat_ : max_sat_; }

private:
    InvariantResult& res_;
    const SolverConfig& solver_;
    bool grows_;
    bool any_sat_ = false;
    double min_sat_ = kInf;
    double max_sat_ = -kInf;
    double max_unsat_ = -kInf;
    double min_unsat_ = kInf;
};

}

InvariantResult find_output_invariant(const TransitionSpec& spec,
                                      const OutputBoundSearch& cfg,
                                      const SolverConfig& solver) {
    if (cfg.eta <= 0.0)
        throw ModelError("eta must be positive");
    spec.validate();
    if (cfg.output_index >= spec.net->output_size())
        throw ModelError("output index " + std::to_string(cfg.output_index) +
                         " is out of range");

    const Query base = role_query(spec, cfg.epsilon, cfg.role_boxes);
    InvariantResult res;
    ProbeDriver probe(res, solver, true);
    auto at_most = [&](double bound) {
        return conjoin(base, output_at_most(cfg.output_index, bound));
    };

    if (probe("init", 0.0, at_most(0.0)) == Status::Unsat) {
        res.found = true;
        res.degenerate = true;
        res.proved_bound = 0.0;
        res.note = "output <= 0 is already unsatisfiable; the property holds "
                   "with no search";
        return res;
    }

    double m = cfg.big_m;
    if (m <= 0.0) {
        const QueryBounds b = propagate_bounds(base);
        const Interval& out = b.output(0, cfg.output_index);
        m = 1.0 + std::max(std::abs(out.lo), std::abs(out.hi));
    }
    if (probe("floor", -m, at_most(-m)) == Status::Sat)
        throw SolverError("search floor too high, increase M");

    double o_first = -m;  // unsatisfiable bracket
    double o_next = 0.0;  // satisfiable bracket
    while (std::abs(o_next - o_first) >= cfg.eta) {
        const double mid = 0.5 * (o_first + o_next);
        if (mid <= o_first || mid >= o_next) {
            res.note = "brackets reached floating-point resolution";
            break;
        }
        ++res.iterations;
        if (probe("search", mid, at_most(mid)) == Status::Sat)
            o_next = mid;
        else
            o_first = mid;
    }

    res.found = true;
    res.proved_bound = o_first;
    res.has_bracket = true;
    res.bracketing_sat = o_next;
    res.precision_achieved = std::abs(o_next - o_first);
    return res;
}

InvariantResult find_input_invariant(const TransitionSpec& spec,
                                     const InputBoundSearch& cfg,
                                     const SolverConfig& solver) {
    if (cfg.pkt < 2.0)
        throw ModelError("pkt must be at least 2");
    if (cfg.precision <= 0.0)
        throw ModelError("precision must be positive");
    spec.validate();
    if (cfg.output_index >= spec.net->output_size())
        throw ModelError("output index " + std::to_string(cfg.output_index) +
                         " is out of range");
    const std::vector<std::size_t> searched =
        searched_positions(spec, cfg.searched_role);

    auto query_at = [&](double lower) {
        Query q = role_query(spec, cfg.epsilon, cfg.role_boxes);
        for (std::size_t pos : searched)
            q.set_box(0, pos, Box(lower, cfg.pkt));
        LinearConstraint fixed;
        fixed.terms.push_back({1.0, {0, Site::Output, cfg.output_index}});
        fixed.rel = cfg.output_rel;
        fixed.constant = cfg.output_constant;
        q.add_constraint(fixed);
        return q;
    };

    InvariantResult res;
    ProbeDriver probe(res, solver, false);

    double sr_first = 1.0;
    double sr_next = cfg.pkt;
    probe("init", sr_first, query_at(sr_first));
    while (sr_first + cfg.precision < sr_next) {
        const double mid = 0.5 * (sr_first + sr_next);
        if (mid <= sr_first || mid >= sr_next) {
            res.note = "brackets reached floating-point resolution";
            break;
        }
        ++res.iterations;
        if (probe("search", mid, query_at(mid)) == Status::Sat)
            sr_first = mid;
        else
            sr_next = mid;
    }
    res.precision_achieved = sr_next - sr_first;

    if (sr_next == cfg.pkt) {
        // The search never saw an unsatisfiable restriction; only the
        // degenerate top of the range can still prove a bound.
        if (probe("confirm", cfg.pkt, query_at(cfg.pkt)) == Status::Sat) {
            res.found = false;
            res.proved_bound = cfg.pkt;
            res.has_bracket = probe.any_sat();
            if (res.has_bracket)
                res.bracketing_sat = probe.best_sat();
            res.note = "no invariant at this PKT (pick a larger PKT)";
            return res;
        }
    }

    res.found = true;
    res.proved_bound = sr_next;
    res.has_bracket = probe.any_sat();
    if (res.has_bracket)
        res.bracketing_sat = probe.best_sat();
    else
        res.note = "unsatisfiable even at the weakest restriction; the bound "
                   "collapsed toward the lower end of the range";
    return res;
}

StatePredicate invariant_predicate(const InvariantResult& r,
                                   const OutputBoundSearch& cfg) {
    if (!r.found)
        throw ModelError("no proved bound to export");
    StatePredicate p;
    p.kind = PredicateKind::Good;
    LinearConstraint c;
    c.terms.push_back({1.0, {0, Site::Output, cfg.output_index}});
    c.rel = Relation::Ge;
    c.constant = r.proved_bound;
    p.constraints.push_back(std::move(c));
    return p;
}

StatePredicate invariant_predicate(const InvariantResult& r,
                                   const InputBoundSearch& cfg,
                                   const TransitionSpec& spec) {
    if (!r.found)
        throw ModelError("no proved bound to export");
    StatePredicate p;
    p.kind = PredicateKind::Bad;
    for (std::size_t pos : searched_positions(spec, cfg.searched_role)) {
        LinearConstraint c;
        c.terms.push_back({1.0, {0, Site::Input, pos}});
        c.rel = Relation::Ge;
        c.constant = r.proved_bound;
        p.constraints.push_back(std::move(c));
    }
    LinearConstraint fixed;
    fixed.terms.push_back({1.0, {0, Site::Output, cfg.output_index}});
    fixed.rel = cfg.output_rel;
    fixed.constant = cfg.output_constant;
    p.constraints.push_back(std::move(fixed));
    return p;
}

}
