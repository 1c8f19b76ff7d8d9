#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "drlcheck/constraints.hpp"

namespace drlcheck {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool empty() const { return lo > hi; }
    double width() const { return hi - lo; }
    bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
    Interval intersect(const Interval& other) const {
        return {lo > other.lo ? lo : other.lo, hi < other.hi ? hi : other.hi};
    }
    bool contains(double v, double tol = 0.0) const {
        return v >= lo - tol && v <= hi + tol;
    }
};

// Sound per-neuron value intervals for one query: every feasible assignment
// keeps every neuron inside its interval. layer(copy, 0) is the input
// layer; layer(copy, i) for i >= 1 is computed layer i-1 of the network.
class QueryBounds {
public:
    QueryBounds(std::size_t copies, std::vector<std::size_t> layer_sizes);

    Interval& at(std::size_t copy, std::size_t layer, std::size_t neuron);
    const Interval& at(std::size_t copy, std::size_t layer, std::size_t neuron) const;

    std::size_t copies() const { return copies_; }
    std::size_t layer_count() const { return layer_sizes_.size(); }
    std::size_t layer_size(std::size_t layer) const { return layer_sizes_[layer]; }

    const Interval& output(std::size_t copy, std::size_t j) const;

    // True once any interval is empty; an empty interval proves the query
    // infeasible without touching the LP.
    bool any_empty() const;

private:
    std::size_t copies_;
    std::vector<std::size_t> layer_sizes_;
    std::vector<std::size_t> layer_offsets_;
    std::size_t per_copy_ = 0;
    std::vector<Interval> cells_;
};

// Interval propagation through every copy: boxes (tightened by
// single-variable constraints and intersected across coupled positions)
// are pushed through weighted sums by interval arithmetic and through
// ReLUs by clamping at zero. Single-variable output constraints intersect
// the final intervals. Multi-term constraints are not interpreted here.
QueryBounds propagate_bounds(const Query& q);

}
