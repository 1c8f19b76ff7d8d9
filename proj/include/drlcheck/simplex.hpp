#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "drlcheck/constraints.hpp"

namespace drlcheck {

// A feasibility LP: find x with l <= x <= u satisfying every row
// sum(coef * x_j) rel rhs. Bounds may be infinite; rows are sparse.
struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<double> lower;
    std::vector<double> upper;

    struct Row {
        std::vector<std::pair<std::size_t, double>> terms;
        Relation rel = Relation::Le;
        double rhs = 0.0;
    };
    std::vector<Row> rows;
};

enum class LpStatus { Feasible, Infeasible, Stalled };

struct LpResult {
    LpStatus status = LpStatus::Stalled;
    std::vector<double> point;  // structural values, set when Feasible
    std::uint64_t iterations = 0;
    double infeasibility = 0.0;  // phase-1 objective at exit
};

struct LpConfig {
    double tau = 1e-7;  // feasibility tolerance
    // Iterations of Dantzig pricing before switching to Bland's rule;
    // 0 picks 5 * (rows + cols).
    std::uint64_t bland_after = 0;
    // Hard iteration cap; 0 picks 50 * (rows + cols) + 10000.
    std::uint64_t max_iterations = 0;
};

// Phase-1 bounded-variable revised simplex with an explicit basis inverse.
// Fully deterministic: pricing ties break on the lowest column index.
LpResult lp_feasible(const LpProblem& p, const LpConfig& cfg = {});

}
