#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drlcheck/solver.hpp"
#include "drlcheck/transition.hpp"

// Input-field abstraction: freed input positions get their boxes widened
// to a declared global range and every constraint or coupling touching
// them is dropped, in every copy. The result over-approximates the
// original query, so its UNSAT verdicts carry over; its witnesses may be
// spurious and fall back to the concrete query.

namespace drlcheck {

struct AbstractionMask {
    // Flattened input positions, sorted and deduplicated by the builders.
    std::vector<std::size_t> freed_positions;

    bool empty() const { return freed_positions.empty(); }
    bool freed(std::size_t position) const;
};

// Mask from explicit (step, field) pairs of a window layout.
AbstractionMask mask_from_fields(
    const TransitionSpec& spec,
    const std::vector<std::pair<std::size_t, std::size_t>>& step_fields);

// Mask freeing every step older than `step` (steps 0..step-1; step 0 is
// the oldest).
AbstractionMask mask_older_than(const TransitionSpec& spec, std::size_t step);

// Per-input-position boxes to widen freed positions to: each position's
// declared global field box.
std::vector<Box> global_boxes(const TransitionSpec& spec);

// The over-approximation of q under the mask. widen_to must have one box
// per input position.
Query abstract_query(const Query& q, const AbstractionMask& mask,
                     const std::vector<Box>& widen_to);

enum class Provenance {
    Direct,
    ProvedViaAbstraction,
    WitnessFromAbstraction,
    AbstractionRefutedSpurious,
    AbstractionInconclusive,
};

std::string to_string(Provenance p);

struct AbstractVerdict {
    Verdict verdict;
    Provenance provenance = Provenance::Direct;
};

// Empty mask: plain solve. Otherwise solve the abstract query; UNSAT
// carries over, a witness that also satisfies q is genuine, and a spurious
// witness falls back to solving q itself. An inconclusive abstract solve
// propagates as Unknown rather than silently retrying.
AbstractVerdict solve_with_abstraction(const Query& q, const AbstractionMask& mask,
                                       const std::vector<Box>& widen_to,
                                       const SolverConfig& cfg = {});

}
