#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "drlcheck/constraints.hpp"
#include "drlcheck/transition.hpp"

// Brute-force ground truth for tests: straight-line evaluation, dense-grid
// satisfiability, discretized reachability and a seeded execution sampler.
// Everything here is written independently of the solver modules so the
// two sides can disagree meaningfully.

namespace drlcheck {

// Plain-loop forward pass; shares no code with Network::evaluate.
std::vector<double> evaluate_naive(const Network& net,
                                   const std::vector<double>& input);

// Product over weighted-sum layers of the largest absolute row sum: a
// Lipschitz bound for the network in the infinity norm. Grid oracles treat
// disagreements within pitch * bound of a decision surface as inconclusive.
double lipschitz_bound(const Network& net);

struct GridResult {
    bool found = false;
    std::vector<std::vector<double>> point;  // inputs per copy, when found
    std::uint64_t points_tested = 0;
};

// Lexicographically first point of the pitch-h grid satisfying every
// constraint of q. Pure equality couplings are substituted away first so
// coupled positions share one grid dimension. Finding nothing is not an
// unsatisfiability proof. Grids larger than cap raise an error. tol loosens
// the constraint checks (the default demands them exactly).
GridResult grid_sat(const Query& q, double pitch, std::uint64_t cap = 10000000,
                    double tol = 0.0);

// Smallest value of one output over the grid of pitch h on a box.
double grid_min_output(const Network& net, const std::vector<Box>& boxes,
                       std::size_t output_index, double pitch,
                       std::uint64_t cap = 10000000);

struct ReachResult {
    // Depth counts states along the run, so depth 1 is an initial state.
    std::optional<std::size_t> violation_depth;
    std::uint64_t states_visited = 0;
};

// BFS over the discretized sliding-window system from its discretized
// initial states, reporting the earliest depth at which a state satisfies
// the bad predicate.
ReachResult reach_oracle(const TransitionSpec& spec, const StatePredicate& bad,
                         std::size_t max_depth, double pitch,
                         std::uint64_t state_cap = 20000000);

struct RunLengthResult {
    bool unbounded = false;   // the non-good state graph has a cycle
    std::size_t longest = 0;  // states in the longest all-non-good run
    std::uint64_t states_considered = 0;
};

// Longest chain of discretized states that all falsify the good predicate.
// Persistence k-induction for that predicate closes exactly at longest + 1
// when this is finite.
RunLengthResult longest_nongood_run(const TransitionSpec& spec,
                                    const StatePredicate& good, double pitch,
                                    std::uint64_t state_cap = 20000000);

// Seeded concrete execution: one window per step. Single-variable equality
// initial constraints are applied directly, the rest by rejection
// sampling; each later step shifts the window and samples fresh fields.
std::vector<std::vector<double>> generate_trace(const TransitionSpec& spec,
                                                std::size_t length,
                                                std::uint64_t seed);

}
