#include "drlcheck/checker.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <utility>

#include "drlcheck/errors.hpp"
#include "drlcheck/log.hpp"

namespace drlcheck {

std::string to_string(CheckOutcome o) {
    switch (o) {
    case CheckOutcome::Proved: return "proved";
    case CheckOutcome::Refuted: return "refuted";
    default: return "exhausted";
    }
}

std::string to_string(CheckMethod m) {
    switch (m) {
    case CheckMethod::Bmc: return "bmc";
    case CheckMethod::KInduction: return "k-induction";
    default: return "portfolio";
    }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void absorb(CheckStats& into, const CheckStats& other) {
    into.queries += other.queries;
    into.solver.absorb(other.solver);
    into.wall_seconds += other.wall_seconds;
}

// One disjunct choice per listed copy, most significant digit first, so
// combo index order is lexicographic over (copy list, disjunct index).
Query combo_query(const Query& base, const std::vector<StatePredicate>& disjuncts,
                  const std::vector<std::size_t>& copies, std::size_t index) {
    Query q = base;
    const std::size_t d = disjuncts.size();
    std::size_t scale = 1;
    for (std::size_t p = 1; p < copies.size(); ++p)
        scale *= d;
    for (std::size_t p = 0; p < copies.size(); ++p) {
        const std::size_t digit = (index / scale) % d;
        q = constrain_predicate(q, disjuncts[digit], {copies[p]});
        if (scale > 1)
            scale /= d;
    }
    return q;
}

struct BatchResult {
    Status status = Status::Unsat;
    std::optional<Witness> witness;
    std::string reason;
    CheckStats stats;
};

// Solve base with every combination of one disjunct per copy. The merged
// verdict scans combination order: the first satisfiable combination wins
// and contributes the witness; otherwise any unresolved combination makes
// the batch Unknown.
BatchResult solve_batch(const Query& base,
                        const std::vector<StatePredicate>& disjuncts,
                        const std::vector<std::size_t>& copies,
                        const CheckerConfig& cfg) {
    BatchResult out;
    std::size_t total = 1;
    if (!copies.empty()) {
        total = disjuncts.empty() ? 0 : 1;
        for (std::size_t p = 0; p < copies.size() && total > 0; ++p) {
            if (total > cfg.disjunct_budget / disjuncts.size() &&
                total * disjuncts.size() > cfg.disjunct_budget) {
                out.status = Status::Unknown;
                out.reason = "disjunct combinations exceed the budget of " +
                             std::to_string(cfg.disjunct_budget);
                return out;
            }
            total *= disjuncts.size();
        }
    }
    if (total == 0)
        return out;  // empty disjunction: every combination vacuously unsatisfiable
    if (total > cfg.disjunct_budget) {
        out.status = Status::Unknown;
        out.reason = "disjunct combinations exceed the budget of " +
                     std::to_string(cfg.disjunct_budget);
        return out;
    }

    const unsigned workers =
        cfg.threads > 1 ? std::min<std::size_t>(cfg.threads, total) : 1;

    if (workers <= 1) {
        std::string first_unknown;
        for (std::size_t i = 0; i < total; ++i) {
            const Verdict v = solve(combo_query(base, disjuncts, copies, i),
                                    cfg.solver);
            ++out.stats.queries;
            out.stats.solver.absorb(v.stats);
            if (v.status == Status::Sat) {
                out.status = Status::Sat;
                out.witness = v.witness;
                return out;
            }
            if (v.status == Status::Unknown && first_unknown.empty())
                first_unknown = v.stats.reason;
        }
        if (!first_unknown.empty()) {
            out.status = Status::Unknown;
            out.reason = first_unknown;
        }
        return out;
    }

    std::vector<std::optional<Verdict>> results(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> stop_at{total};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || i > stop_at.load())
                return;
            Verdict v = solve(combo_query(base, disjuncts, copies, i), cfg.solver);
            if (v.status == Status::Sat) {
                std::size_t cur = stop_at.load();
                while (i < cur && !stop_at.compare_exchange_weak(cur, i)) {
                }
            }
            results[i] = std::move(v);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back(work);
    for (std::thread& t : pool)
        t.join();

    std::string first_unknown;
    for (std::size_t i = 0; i < total; ++i) {
        if (!results[i])
            break;  // nothing past the first satisfiable combination matters
        ++out.stats.queries;
        out.stats.solver.absorb(results[i]->stats);
        if (results[i]->status == Status::Sat) {
            out.status = Status::Sat;
            out.witness = std::move(results[i]->witness);
            return out;
        }
        if (results[i]->status == Status::Unknown && first_unknown.empty())
            first_unknown = results[i]->stats.reason;
    }
    if (!first_unknown.empty()) {
        out.status = Status::Unknown;
        out.reason = first_unknown;
    }
    return out;
}

std::vector<std::size_t> copy_range(std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = i;
    return out;
}

Trace build_trace(const TransitionSpec& spec, const Witness& w, bool lasso) {
    Trace t;
    t.lasso = lasso;
    for (long copy = 0; copy < w.inputs.rows(); ++copy) {
        TraceStep step;
        const Eigen::VectorXd in = w.inputs.row(copy).transpose();
        step.window.assign(in.data(), in.data() + in.size());
        const Eigen::VectorXd out = spec.net->evaluate(in);
        step.outputs.assign(out.data(), out.data() + out.size());
        t.steps.push_back(std::move(step));
    }
    return t;
}

bool initial_constraints_hold(const TransitionSpec& spec, const TraceStep& step,
                              double tau) {
    StatePredicate init;
    init.constraints = spec.initial_constraints;
    return predicate_holds(init, step, tau);
}

}

bool predicate_holds(const StatePredicate& p, const TraceStep& step, double tol) {
    auto value_of = [&](const VarRef& v) {
        const std::vector<double>& src =
            v.site == Site::Input ? step.window : step.outputs;
        if (v.copy != 0 || v.index >= src.size())
            throw ModelError("predicate variable " + to_string(v) +
                             " does not fit the trace step");
        return src[v.index];
    };
    for (const LinearConstraint& c : p.constraints)
        if (!relation_holds(constraint_lhs(c, value_of), c.rel, c.constant, tol))
            return false;
    return true;
}

bool validate_trace(const TransitionSpec& spec, const Trace& trace, double tau) {
    if (trace.steps.empty())
        return false;
    const std::size_t t = spec.window;
    const std::size_t f = spec.fields_per_step;
    for (const TraceStep& step : trace.steps) {
        if (step.window.size() != t * f ||
            step.outputs.size() != spec.net->output_size())
            return false;
        for (std::size_t s = 0; s < t; ++s)
            for (std::size_t field = 0; field < f; ++field)
                if (!spec.field_boxes[field].contains(
                        step.window[spec.position(s, field)], tau))
                    return false;
        const Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(
            step.window.data(), static_cast<long>(step.window.size()));
        const Eigen::VectorXd out = spec.net->evaluate(in);
        for (std::size_t j = 0; j < step.outputs.size(); ++j)
            if (std::abs(out(static_cast<long>(j)) - step.outputs[j]) > tau)
                return false;
    }
    auto shifted = [&](const TraceStep& from, const TraceStep& to) {
        for (std::size_t s = 0; s + 1 < t; ++s)
            for (std::size_t field = 0; field < f; ++field)
                if (to.window[spec.position(s, field)] !=
                    from.window[spec.position(s + 1, field)])
                    return false;
        return true;
    };
    for (std::size_t i = 0; i + 1 < trace.steps.size(); ++i)
        if (!shifted(trace.steps[i], trace.steps[i + 1]))
            return false;
    if (trace.lasso && !shifted(trace.steps.back(), trace.steps.front()))
        return false;
    return true;
}

CheckResult bmc(const TransitionSpec& spec, const StatePredicate& bad,
                std::size_t k, const CheckerConfig& cfg) {
    const auto started = Clock::now();
    CheckResult out;
    out.method = CheckMethod::Bmc;
    out.k = k;

    Query q = unroll(spec, k, UnrollMode::FromInitial);
    q = constrain_predicate(q, bad, {k - 1});
    const Verdict v = solve(q, cfg.solver);
    ++out.stats.queries;
    out.stats.solver.absorb(v.stats);

    if (v.status == Status::Sat) {
        Trace trace = build_trace(spec, *v.witness, false);
        if (!validate_trace(spec, trace, cfg.solver.tau_val) ||
            !predicate_holds(bad, trace.steps.back(), cfg.solver.tau_val) ||
            !initial_constraints_hold(spec, trace.steps.front(),
                                      cfg.solver.tau_val))
            throw SolverError("refutation trace failed concrete replay");
        out.outcome = CheckOutcome::Refuted;
        out.trace = std::move(trace);
    } else if (v.status == Status::Unsat) {
        out.outcome = CheckOutcome::Exhausted;
        out.note = "no violation within " + std::to_string(k) + " steps";
    } else {
        out.outcome = CheckOutcome::Exhausted;
        out.conclusive = false;
        out.note = "refutation attempt inconclusive: " + v.stats.reason;
    }
    out.stats.wall_seconds = seconds_since(started);
    return out;
}

CheckResult liveness_bmc(const TransitionSpec& spec, const StatePredicate& good,
                         std::size_t k, const CheckerConfig& cfg) {
    const auto started = Clock::now();
    CheckResult out;
    out.method = CheckMethod::Bmc;
    out.k = k;

    Query base = unroll(spec, k, UnrollMode::FromInitial);
    for (LinearConstraint& c : successor_couplings(spec, k - 1, 0))
        base.add_coupling(std::move(c));
    const std::vector<StatePredicate> disjuncts = negate_predicate(good);
    BatchResult r = solve_batch(base, disjuncts, copy_range(k), cfg);
    absorb(out.stats, r.stats);

    if (r.status == Status::Sat) {
        Trace trace = build_trace(spec, *r.witness, true);
        bool all_avoid_good = true;
        for (const TraceStep& step : trace.steps)
            all_avoid_good = all_avoid_good && !predicate_holds(good, step, 0.0);
        if (!validate_trace(spec, trace, cfg.solver.tau_val) || !all_avoid_good ||
            !initial_constraints_hold(spec, trace.steps.front(),
                                      cfg.solver.tau_val))
            throw SolverError("lasso trace failed concrete replay");
        out.outcome = CheckOutcome::Refuted;
        out.trace = std::move(trace);
    } else if (r.status == Status::Unsat) {
        out.outcome = CheckOutcome::Exhausted;
        out.note = "no lasso of length " + std::to_string(k) +
                   " avoiding good states";
    } else {
        out.outcome = CheckOutcome::Exhausted;
        out.conclusive = false;
        out.note = "lasso search inconclusive: " + r.reason;
    }
    out.stats.wall_seconds = seconds_since(started);
    return out;
}

CheckResult k_induction_safety(const TransitionSpec& spec,
                               const StatePredicate& bad, std::size_t k,
                               const CheckerConfig& cfg) {
    const auto started = Clock::now();
    CheckResult out;
    out.method = CheckMethod::KInduction;
    out.k = k;

    Query base = unroll(spec, k, UnrollMode::FromAnywhere);
    base = constrain_predicate(base, bad, {k - 1});
    const std::vector<StatePredicate> disjuncts = negate_predicate(bad);
    BatchResult r = solve_batch(base, disjuncts, copy_range(k - 1), cfg);
    absorb(out.stats, r.stats);

    if (r.status == Status::Unsat) {
        out.outcome = CheckOutcome::Proved;
    } else if (r.status == Status::Sat) {
        out.outcome = CheckOutcome::Exhausted;
        out.note = "consecution step satisfiable at k = " + std::to_string(k);
    } else {
        out.outcome = CheckOutcome::Exhausted;
        out.conclusive = false;
        out.note = "consecution step inconclusive: " + r.reason;
    }
    out.stats.wall_seconds = seconds_since(started);
    return out;
}

CheckResult k_induction_liveness(const TransitionSpec& spec,
                                 const StatePredicate& good, std::size_t k,
                                 const CheckerConfig& cfg) {
    const auto started = Clock::now();
    CheckResult out;
    out.method = CheckMethod::KInduction;
    out.k = k;

    const Query base = unroll(spec, k, UnrollMode::FromAnywhere);
    const std::vector<StatePredicate> disjuncts = negate_predicate(good);
    BatchResult r = solve_batch(base, disjuncts, copy_range(k), cfg);
    absorb(out.stats, r.stats);

    if (r.status == Status::Unsat) {
        out.outcome = CheckOutcome::Proved;
    } else if (r.status == Status::Sat) {
        out.outcome = CheckOutcome::Exhausted;
        out.note = "a run of " + std::to_string(k) +
                   " consecutive non-good states exists";
    } else {
        out.outcome = CheckOutcome::Exhausted;
        out.conclusive = false;
        out.note = "persistence step inconclusive: " + r.reason;
    }
    out.stats.wall_seconds = seconds_since(started);
    return out;
}

CheckResult portfolio(const TransitionSpec& spec, const Property& property,
                      std::size_t k_max, const CheckerConfig& cfg) {
    const auto started = Clock::now();
    const bool safety = property.kind == Property::Kind::Safety;
    CheckResult out;
    out.method = CheckMethod::Portfolio;
    out.k = k_max;
    bool base_covered = true;
    bool all_conclusive = true;

    for (std::size_t k = 1; k <= k_max; ++k) {
        if (cfg.timeout_seconds > 0.0 &&
            seconds_since(started) > cfg.timeout_seconds) {
            out.outcome = CheckOutcome::Exhausted;
            out.conclusive = false;
            out.note = "timeout reached at k = " + std::to_string(k);
            out.stats.wall_seconds = seconds_since(started);
            return out;
        }

        CheckResult refute = safety
                                 ? bmc(spec, property.predicate, k, cfg)
                                 : liveness_bmc(spec, property.predicate, k, cfg);
        absorb(out.stats, refute.stats);
        if (refute.outcome == CheckOutcome::Refuted) {
            refute.stats = out.stats;
            refute.stats.wall_seconds = seconds_since(started);
            return refute;
        }
        base_covered = base_covered && refute.conclusive;
        all_conclusive = all_conclusive && refute.conclusive;
        log_info("portfolio k = ", k, ": ", refute.note);

        CheckResult prove =
            safety ? k_induction_safety(spec, property.predicate, k, cfg)
                   : k_induction_liveness(spec, property.predicate, k, cfg);
        absorb(out.stats, prove.stats);
        if (prove.outcome == CheckOutcome::Proved) {
            if (safety && !base_covered) {
                out.outcome = CheckOutcome::Exhausted;
                out.conclusive = false;
                out.k = k;
                out.note = "consecution closed at k = " + std::to_string(k) +
                           " but an earlier bounded check was inconclusive";
                out.stats.wall_seconds = seconds_since(started);
                return out;
            }
            prove.stats = out.stats;
            prove.stats.wall_seconds = seconds_since(started);
            return prove;
        }
        all_conclusive = all_conclusive && prove.conclusive;
        log_info("portfolio k = ", k, ": ", prove.note);
    }

    out.outcome = CheckOutcome::Exhausted;
    out.conclusive = all_conclusive;
    out.note = "no proof or refutation up to k_max = " + std::to_string(k_max);
    out.stats.wall_seconds = seconds_since(started);
    return out;
}

}
