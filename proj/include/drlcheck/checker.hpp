#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drlcheck/formats.hpp"
#include "drlcheck/solver.hpp"
#include "drlcheck/transition.hpp"

// Bounded model checking and k-induction over sliding-window transition
// systems. Refutations return concrete validated traces; proofs come from
// unsatisfiable induction queries. Disjunctive negated predicates expand
// into one query per choice of disjunct per copy, merged in fixed order so
// verdicts and witnesses do not depend on thread scheduling.

namespace drlcheck {

enum class CheckOutcome { Proved, Refuted, Exhausted };
enum class CheckMethod { Bmc, KInduction, Portfolio };

std::string to_string(CheckOutcome o);
std::string to_string(CheckMethod m);

struct TraceStep {
    std::vector<double> window;   // one state, laid out by input position
    std::vector<double> outputs;  // network outputs for this state
};

struct Trace {
    std::vector<TraceStep> steps;
    // True when the last step's successor is the first step (an infinite
    // run witnessed by a loop).
    bool lasso = false;
};

struct CheckStats {
    std::uint64_t queries = 0;  // solver invocations
    SolveStats solver;          // summed over all invocations
    double wall_seconds = 0.0;
};

struct CheckResult {
    CheckOutcome outcome = CheckOutcome::Exhausted;
    CheckMethod method = CheckMethod::Portfolio;
    std::size_t k = 0;
    std::optional<Trace> trace;  // present on Refuted
    // False when an Exhausted outcome reflects a solver give-up rather
    // than a fully covered search; the portfolio refuses to build a
    // safety proof on top of an inconclusive bounded check.
    bool conclusive = true;
    std::string note;
    CheckStats stats;
};

struct CheckerConfig {
    SolverConfig solver;
    // Cap on disjunct combinations per induction or lasso query batch.
    std::size_t disjunct_budget = 4096;
    unsigned threads = 1;
    double timeout_seconds = 0.0;  // portfolio wall-clock budget, 0 = none
};

// Safety refutation: is a bad state reachable in exactly k steps from an
// initial state? Refuted carries the k-step trace; otherwise Exhausted(k)
// with a note saying whether the depth was fully covered or the solver
// gave up.
CheckResult bmc(const TransitionSpec& spec, const StatePredicate& bad,
                std::size_t k, const CheckerConfig& cfg = {});

// Liveness refutation: an initial-anchored k-step lasso visiting no good
// state, which witnesses a run with finitely many good states.
CheckResult liveness_bmc(const TransitionSpec& spec, const StatePredicate& good,
                         std::size_t k, const CheckerConfig& cfg = {});

// Consecution step: no k-window anywhere has k-1 non-bad states followed
// by a bad one. Proved requires every disjunct combination unsatisfiable;
// callers must have covered depths < k by bmc for a full safety proof.
CheckResult k_induction_safety(const TransitionSpec& spec,
                               const StatePredicate& bad, std::size_t k,
                               const CheckerConfig& cfg = {});

// Persistence step: no k consecutive non-good states anywhere, hence every
// infinite run sees good states infinitely often. Needs no base case.
CheckResult k_induction_liveness(const TransitionSpec& spec,
                                 const StatePredicate& good, std::size_t k,
                                 const CheckerConfig& cfg = {});

// Alternate refutation and induction for k = 1..k_max, returning the first
// Refuted or Proved, else Exhausted(k_max).
CheckResult portfolio(const TransitionSpec& spec, const Property& property,
                      std::size_t k_max, const CheckerConfig& cfg = {});

// Concrete replay of a trace: window sizes, field boxes, the sliding-window
// shift between consecutive steps (and the loop closure for lassos), and
// recorded outputs against re-evaluation. Shared positions must agree
// exactly; outputs and boxes are checked within tau.
bool validate_trace(const TransitionSpec& spec, const Trace& trace, double tau);

// p's constraints evaluated on one concrete step (as copy 0), all within
// slack tol.
bool predicate_holds(const StatePredicate& p, const TraceStep& step, double tol);

}
