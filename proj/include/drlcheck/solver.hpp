#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "drlcheck/bounds.hpp"
#include "drlcheck/constraints.hpp"

namespace drlcheck {

enum class Status { Sat, Unsat, Unknown };

std::string to_string(Status s);

// Branch-and-bound case split for one ReLU neuron: Active pins y = x with
// x >= 0, Inactive pins y = 0 with x <= 0, Unknown keeps the relaxation.
enum class ReluPhase : std::uint8_t { Unknown, Active, Inactive };

// A satisfying assignment: one row of input values per network copy.
// Positions coupled by pure equality couplings carry identical values.
struct Witness {
    Eigen::MatrixXd inputs;  // copies x input_size
};

struct SolveStats {
    std::uint64_t nodes = 0;
    std::uint64_t lp_calls = 0;
    std::uint64_t simplex_iterations = 0;
    double wall_seconds = 0.0;
    std::string reason;  // filled for Unknown verdicts

    void absorb(const SolveStats& other);
};

struct Verdict {
    Status status = Status::Unknown;
    std::optional<Witness> witness;
    SolveStats stats;
};

struct SolverConfig {
    double tau_lp = 1e-7;   // LP feasibility tolerance
    double tau_val = 1e-6;  // witness validation tolerance
    std::uint64_t max_nodes = 200000;
    double time_limit_seconds = 0.0;  // 0 disables the clock
};

// Complete search over ReLU phases: interval pruning, LP relaxation at
// every node, splitting on the widest straddling pre-activation (ties on
// the lowest (copy, layer, index)), Inactive child explored first. Sat
// verdicts always carry a witness that passed validate_witness; verdicts
// and witnesses depend only on the query and the budget, and growing the
// budget can only turn Unknown into Sat or Unsat.
Verdict solve(const Query& q, const SolverConfig& cfg = {});

// Concrete check of a witness against q: boxes, every constraint and every
// coupling, with outputs recomputed through the network, all within
// tau_val. Dimension mismatches throw; everything else returns false.
bool validate_witness(const Query& q, const Witness& w, double tau_val = 1e-6);

}
