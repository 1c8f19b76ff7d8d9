#pragma once

#include <map>
#include <string>
#include <vector>

#include "drlcheck/solver.hpp"
#include "drlcheck/transition.hpp"

// Invariant inference by binary search over a monotone query family. Both
// templates fix the inputs of a single network copy to role-derived boxes
// and bisect one bound until the SAT/UNSAT brackets meet:
//   - output template: largest floor b with (inputs in boxes, out <= b)
//     unsatisfiable, so the output provably stays above b.
//   - input template: smallest lower bound r on the searched role with
//     (searched inputs in [r, pkt], fixed output constraint) unsatisfiable.

namespace drlcheck {

// Box affine in epsilon: [base_lo + eps_lo * e, base_hi + eps_hi * e].
struct RoleBox {
    double base_lo = 0.0;
    double base_hi = 0.0;
    double eps_lo = 0.0;
    double eps_hi = 0.0;

    Box at(double epsilon) const;
};

struct OutputBoundSearch {
    double epsilon = 0.0;
    double eta = 0.01;  // bracket width at which the search stops
    std::size_t output_index = 0;
    std::map<std::string, RoleBox> role_boxes;  // by field role
    // Search floor magnitude M; 0 picks 1 + the analytic output bound.
    double big_m = 0.0;
};

struct InputBoundSearch {
    double epsilon = 0.0;
    double pkt = 2.0;  // upper end of the searched range, >= 2
    std::string searched_role;
    std::size_t output_index = 0;
    Relation output_rel = Relation::Ge;  // fixed output constraint
    double output_constant = 0.0;
    std::map<std::string, RoleBox> role_boxes;
    // Bracket gap at which the search stops; 1 gives unit granularity.
    double precision = 1.0;
};

struct InvariantQuery {
    std::string phase;  // "init", "floor", "search" or "confirm"
    double bound = 0.0;
    Status verdict = Status::Unknown;
};

struct InvariantResult {
    bool found = false;
    bool degenerate = false;  // entry query already unsatisfiable
    double proved_bound = 0.0;
    bool has_bracket = false;
    double bracketing_sat = 0.0;  // last satisfiable bound, when bracketed
    double precision_achieved = 0.0;
    std::size_t iterations = 0;  // search-phase solver calls
    std::string note;
    std::vector<InvariantQuery> query_log;
    SolveStats total_stats;
};

// Output floor search: O_first <- -M, O_next <- 0, bisect while the
// brackets are eta or more apart. The entry query (out <= 0) being
// unsatisfiable short-circuits to the degenerate bound 0; a satisfiable
// floor query (out <= -M) raises "search floor too high, increase M".
InvariantResult find_output_invariant(const TransitionSpec& spec,
                                      const OutputBoundSearch& cfg,
                                      const SolverConfig& solver = {});

// Input lower-bound search: SR_first <- 1, SR_next <- pkt, bisect while
// SR_first + precision < SR_next; satisfiable mids raise SR_first,
// unsatisfiable mids lower SR_next. A search that never leaves pkt is
// confirmed at [pkt, pkt]; if even that is satisfiable there is no
// invariant at this pkt.
InvariantResult find_input_invariant(const TransitionSpec& spec,
                                     const InputBoundSearch& cfg,
                                     const SolverConfig& solver = {});

// The proved fact as a predicate. Output template: Good, out >= bound.
// Input template: Bad, searched inputs >= bound conjoined with the fixed
// output constraint (a region the search proved empty). Both are relative
// to the search's input restriction.
StatePredicate invariant_predicate(const InvariantResult& r,
                                   const OutputBoundSearch& cfg);
StatePredicate invariant_predicate(const InvariantResult& r,
                                   const InputBoundSearch& cfg,
                                   const TransitionSpec& spec);

}
