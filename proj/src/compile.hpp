#pragma once

#include <cstddef>
#include <vector>

#include "drlcheck/bounds.hpp"
#include "drlcheck/constraints.hpp"
#include "drlcheck/solver.hpp"

// Internal query compilation shared by bound propagation and the solver.
// Pure two-term equality couplings (x = y) are unified into variable
// classes so coupled positions are literally the same unknown; everything
// else stays a linear row.

namespace drlcheck {

struct CompiledQuery {
    const Query* query = nullptr;
    std::size_t input_size = 0;
    std::size_t copies = 0;

    // flat input variable (copy * input_size + i) -> class id
    std::vector<std::size_t> class_of;
    // class id -> sorted flat members; members[0] is the representative
    std::vector<std::vector<std::size_t>> class_members;
    // intersected box of all members, tightened by single-term input
    // constraints; an empty range proves the query infeasible
    std::vector<Interval> class_range;

    // remaining constraints and couplings, in query order (constraints
    // first). Single-term input constraints are folded into class_range
    // and do not appear here.
    std::vector<const LinearConstraint*> rows;

    bool infeasible = false;

    std::size_t flat(std::size_t copy, std::size_t input) const {
        return copy * input_size + input;
    }
};

CompiledQuery compile_query(const Query& q);

// Stable numbering of every ReLU neuron of an unrolled query, ordered by
// (copy, layer, index). Branch tie-breaking uses this order directly.
struct ReluIndex {
    std::vector<std::size_t> relu_layers;  // computed-layer indices of kind Relu
    std::vector<std::size_t> layer_base;   // id offset of each relu layer in one copy
    std::vector<std::size_t> layer_sizes;  // neuron count of each relu layer
    std::size_t per_copy = 0;

    explicit ReluIndex(const Network& net);

    std::size_t count(std::size_t copies) const { return per_copy * copies; }
    std::size_t id(std::size_t copy, std::size_t relu_pos, std::size_t j) const {
        return copy * per_copy + layer_base[relu_pos] + j;
    }

    struct Ref {
        std::size_t copy;
        std::size_t relu_pos;  // index into relu_layers
        std::size_t j;
    };
    Ref decode(std::size_t id) const;
};

// Interval propagation with per-ReLU phase restrictions; phases must have
// ri.count(q.copies()) entries. Tightens pre-activation cells in place and
// fixes Inactive outputs at zero. propagate_bounds is this with every
// phase Unknown.
QueryBounds propagate_with_phases(const Query& q, const CompiledQuery& cq,
                                  const ReluIndex& ri,
                                  const std::vector<ReluPhase>& phases);

}
