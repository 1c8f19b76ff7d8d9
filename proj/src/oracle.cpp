#include "drlcheck/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "drlcheck/errors.hpp"
#include "drlcheck/log.hpp"

namespace drlcheck {

std::vector<double> evaluate_naive(const Network& net,
                                   const std::vector<double>& input) {
    if (input.size() != net.input_size())
        throw ModelError("oracle input has " + std::to_string(input.size()) +
                         " values, expected " + std::to_string(net.input_size()));
    std::vector<double> values = input;
    for (const Layer& l : net.layers()) {
        if (l.kind == LayerKind::WeightedSum) {
            std::vector<double> next(l.size, 0.0);
            for (std::size_t r = 0; r < l.size; ++r) {
                double acc = l.biases(static_cast<long>(r));
                for (std::size_t c = 0; c < values.size(); ++c)
                    acc += l.weights(static_cast<long>(r), static_cast<long>(c)) *
                           values[c];
                next[r] = acc;
            }
            values = std::move(next);
        } else {
            for (double& v : values)
                if (v < 0.0)
                    v = 0.0;
        }
    }
    return values;
}

double lipschitz_bound(const Network& net) {
    double bound = 1.0;
    for (const Layer& l : net.layers()) {
        if (l.kind != LayerKind::WeightedSum)
            continue;
        double worst_row = 0.0;
        for (long r = 0; r < l.weights.rows(); ++r) {
            double row = 0.0;
            for (long c = 0; c < l.weights.cols(); ++c)
                row += std::abs(l.weights(r, c));
            worst_row = std::max(worst_row, row);
        }
        bound *= worst_row;
    }
    return bound;
}

namespace {

// Number of grid points lo, lo + pitch, ... not exceeding hi (with a hair
// of slack so hi itself is included when it is a whole number of steps).
std::uint64_t grid_count(double lo, double hi, double pitch) {
    return static_cast<std::uint64_t>(std::floor((hi - lo) / pitch + 1e-9)) + 1;
}

// Minimal union-find over flat input variables, independent of the
// solver's query compilation.
class Merge {
public:
    explicit Merge(std::size_t n) : parent_(n) {
        for (std::size_t i = 0; i < n; ++i)
            parent_[i] = i;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

bool substitutable_coupling(const LinearConstraint& c) {
    return c.rel == Relation::Eq && c.constant == 0.0 && c.terms.size() == 2 &&
           c.terms[0].var.site == Site::Input &&
           c.terms[1].var.site == Site::Input && c.terms[0].coef != 0.0 &&
           c.terms[0].coef == -c.terms[1].coef;
}

bool window_finite(const TransitionSpec& spec) {
    for (const Box& b : spec.field_boxes)
        if (!b.finite())
            return false;
    return true;
}

// Constraints evaluated on one concrete window, computing outputs only
// when some term needs them.
bool constraints_hold_on_window(const TransitionSpec& spec,
                                const std::vector<LinearConstraint>& cs,
                                const std::vector<double>& window, double tol) {
    std::vector<double> outputs;
    bool have_outputs = false;
    for (const LinearConstraint& c : cs) {
        for (const LinearTerm& t : c.terms)
            if (t.var.site == Site::Output && !have_outputs) {
                outputs = evaluate_naive(*spec.net, window);
                have_outputs = true;
            }
        auto value_of = [&](const VarRef& v) {
            return v.site == Site::Input ? window[v.index] : outputs[v.index];
        };
        if (!relation_holds(constraint_lhs(c, value_of), c.rel, c.constant, tol))
            return false;
    }
    return true;
}

constexpr double kWindowTol = 1e-9;  // absorbs grid-coordinate arithmetic

// Discretized sliding-window state space: one digit per input position,
// each field quantized to its own value list.
struct StateGrid {
    const TransitionSpec* spec = nullptr;
    std::vector<std::vector<double>> field_values;  // per field
    std::vector<std::size_t> radix;                 // per input position
    std::vector<std::uint64_t> place;               // mixed-radix weights
    std::uint64_t total = 0;

    StateGrid(const TransitionSpec& s, double pitch, std::uint64_t cap)
        : spec(&s) {
        if (!window_finite(s))
            throw ModelError("discretization needs finite field boxes");
        for (const Box& b : s.field_boxes) {
            std::vector<double> values;
            const std::uint64_t n = grid_count(b.lower, b.upper, pitch);
            for (std::uint64_t i = 0; i < n; ++i)
                values.push_back(b.lower + static_cast<double>(i) * pitch);
            field_values.push_back(std::move(values));
        }
        const std::size_t positions = s.window * s.fields_per_step;
        radix.assign(positions, 0);
        for (std::size_t step = 0; step < s.window; ++step)
            for (std::size_t field = 0; field < s.fields_per_step; ++field)
                radix[s.position(step, field)] = field_values[field].size();
        place.assign(positions, 1);
        total = 1;
        for (std::size_t p = 0; p < positions; ++p) {
            place[p] = total;
            if (radix[p] != 0 && total > cap / radix[p] + 1)
                throw ModelError("state space exceeds the cap of " +
                                 std::to_string(cap) + " states");
            total *= radix[p];
        }
        if (total > cap)
            throw ModelError("state space exceeds the cap of " +
                             std::to_string(cap) + " states");
    }

    std::size_t field_of(std::size_t position) const {
        for (std::size_t step = 0; step < spec->window; ++step)
            for (std::size_t field = 0; field < spec->fields_per_step; ++field)
                if (spec->position(step, field) == position)
                    return field;
        throw ModelError("position outside the window layout");
    }

    void decode(std::uint64_t id, std::vector<std::size_t>& digits) const {
        digits.resize(radix.size());
        for (std::size_t p = 0; p < radix.size(); ++p) {
            digits[p] = static_cast<std::size_t>(id % radix[p]);
            id /= radix[p];
        }
    }

    std::uint64_t encode(const std::vector<std::size_t>& digits) const {
        std::uint64_t id = 0;
        for (std::size_t p = 0; p < radix.size(); ++p)
            id += static_cast<std::uint64_t>(digits[p]) * place[p];
        return id;
    }

    void window_of(const std::vector<std::size_t>& digits,
                   std::vector<double>& window) const {
        window.resize(digits.size());
        for (std::size_t step = 0; step < spec->window; ++step)
            for (std::size_t field = 0; field < spec->fields_per_step; ++field) {
                const std::size_t pos = spec->position(step, field);
                window[pos] = field_values[field][digits[pos]];
            }
    }

    // All successors of `digits` under the window shift, one per choice of
    // fresh newest step.
    template <typename Fn>
    void each_successor(const std::vector<std::size_t>& digits, Fn&& fn) const {
        const std::size_t t = spec->window;
        const std::size_t f = spec->fields_per_step;
        std::vector<std::size_t> next(digits.size());
        for (std::size_t step = 0; step + 1 < t; ++step)
            for (std::size_t field = 0; field < f; ++field)
                next[spec->position(step, field)] =
                    digits[spec->position(step + 1, field)];
        std::vector<std::size_t> fresh(f, 0);
        while (true) {
            for (std::size_t field = 0; field < f; ++field)
                next[spec->position(t - 1, field)] = fresh[field];
            fn(next);
            std::size_t field = 0;
            while (field < f) {
                if (++fresh[field] < field_values[field].size())
                    break;
                fresh[field] = 0;
                ++field;
            }
            if (field == f)
                return;
        }
    }
};

}

GridResult grid_sat(const Query& q, double pitch, std::uint64_t cap, double tol) {
    if (pitch <= 0.0)
        throw ModelError("grid pitch must be positive");
    const std::size_t in = q.net().input_size();
    const std::size_t copies = q.copies();
    const std::size_t flats = copies * in;

    Merge merge(flats);
    std::vector<const LinearConstraint*> rows;
    for (const LinearConstraint& c : q.constraints())
        rows.push_back(&c);
    for (const LinearConstraint& c : q.couplings()) {
        if (substitutable_coupling(c))
            merge.unite(c.terms[0].var.copy * in + c.terms[0].var.index,
                        c.terms[1].var.copy * in + c.terms[1].var.index);
        else
            rows.push_back(&c);
    }

    // Free dimensions in flat-variable order, each the intersection of its
    // members' boxes.
    std::vector<std::size_t> rep_of(flats);
    std::vector<std::size_t> dims;  // representative flat index per dimension
    std::unordered_map<std::size_t, std::size_t> dim_of;
    std::vector<double> lo, hi;
    for (std::size_t flat = 0; flat < flats; ++flat) {
        const std::size_t rep = merge.find(flat);
        rep_of[flat] = rep;
        const Box& b = q.box(flat / in, flat % in);
        if (!b.finite())
            throw ModelError("grid enumeration needs finite boxes");
        const auto it = dim_of.find(rep);
        if (it == dim_of.end()) {
            dim_of.emplace(rep, dims.size());
            dims.push_back(rep);
            lo.push_back(b.lower);
            hi.push_back(b.upper);
        } else {
            lo[it->second] = std::max(lo[it->second], b.lower);
            hi[it->second] = std::min(hi[it->second], b.upper);
        }
    }

    GridResult result;
    std::uint64_t total = 1;
    std::vector<std::uint64_t> counts(dims.size());
    for (std::size_t d = 0; d < dims.size(); ++d) {
        if (lo[d] > hi[d])
            return result;  // some coupled class has an empty range
        counts[d] = grid_count(lo[d], hi[d], pitch);
        if (total > cap / counts[d] + 1 || total * counts[d] > cap)
            throw ModelError("grid of more than " + std::to_string(cap) +
                             " points exceeds the cap");
        total *= counts[d];
    }

    std::vector<std::uint64_t> index(dims.size(), 0);
    std::vector<double> flat_values(flats);
    std::vector<std::vector<double>> inputs(copies, std::vector<double>(in));
    std::vector<std::vector<double>> outputs(copies);
    for (std::uint64_t n = 0; n < total; ++n) {
        ++result.points_tested;
        for (std::size_t flat = 0; flat < flats; ++flat) {
            const std::size_t d = dim_of[rep_of[flat]];
            flat_values[flat] =
                lo[d] + static_cast<double>(index[d]) * pitch;
        }
        bool ok = true;
        for (std::size_t copy = 0; copy < copies && ok; ++copy) {
            for (std::size_t i = 0; i < in; ++i) {
                inputs[copy][i] = flat_values[copy * in + i];
                if (!q.box(copy, i).contains(inputs[copy][i], tol))
                    ok = false;
            }
            if (ok)
                outputs[copy] = evaluate_naive(q.net(), inputs[copy]);
        }
        if (ok) {
            auto value_of = [&](const VarRef& v) {
                return v.site == Site::Input ? inputs[v.copy][v.index]
                                             : outputs[v.copy][v.index];
            };
            for (const LinearConstraint* c : rows)
                if (!relation_holds(constraint_lhs(*c, value_of), c->rel,
                                    c->constant, tol)) {
                    ok = false;
                    break;
                }
        }
        if (ok) {
            result.found = true;
            result.point = inputs;
            return result;
        }
        // lexicographic odometer, last dimension fastest
        std::size_t d = dims.size();
        while (d > 0) {
            --d;
            if (++index[d] < counts[d])
                break;
            index[d] = 0;
        }
    }
    return result;
}

double grid_min_output(const Network& net, const std::vector<Box>& boxes,
                       std::size_t output_index, double pitch,
                       std::uint64_t cap) {
    if (boxes.size() != net.input_size())
        throw ModelError("box count does not match the input layer");
    std::uint64_t total = 1;
    std::vector<std::uint64_t> counts(boxes.size());
    for (std::size_t d = 0; d < boxes.size(); ++d) {
        if (!boxes[d].finite())
            throw ModelError("grid enumeration needs finite boxes");
        counts[d] = grid_count(boxes[d].lower, boxes[d].upper, pitch);
        if (total > cap / counts[d] + 1 || total * counts[d] > cap)
            throw ModelError("grid of more than " + std::to_string(cap) +
                             " points exceeds the cap");
        total *= counts[d];
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> index(boxes.size(), 0);
    std::vector<double> input(boxes.size());
    for (std::uint64_t n = 0; n < total; ++n) {
        for (std::size_t d = 0; d < boxes.size(); ++d)
            input[d] = boxes[d].lower + static_cast<double>(index[d]) * pitch;
        best = std::min(best, evaluate_naive(net, input)[output_index]);
        std::size_t d = boxes.size();
        while (d > 0) {
            --d;
            if (++index[d] < counts[d])
                break;
            index[d] = 0;
        }
    }
    return best;
}

ReachResult reach_oracle(const TransitionSpec& spec, const StatePredicate& bad,
                         std::size_t max_depth, double pitch,
                         std::uint64_t state_cap) {
    spec.validate();
    const StateGrid grid(spec, pitch, state_cap);
    ReachResult result;
    std::vector<bool> visited(grid.total, false);

    std::vector<std::uint64_t> frontier;
    std::vector<std::size_t> digits;
    std::vector<double> window;
    for (std::uint64_t id = 0; id < grid.total; ++id) {
        grid.decode(id, digits);
        grid.window_of(digits, window);
        if (constraints_hold_on_window(spec, spec.initial_constraints, window,
                                       kWindowTol)) {
            frontier.push_back(id);
            visited[id] = true;
        }
    }
    result.states_visited = frontier.size();

    for (std::size_t depth = 1; depth <= max_depth; ++depth) {
        for (std::uint64_t id : frontier) {
            grid.decode(id, digits);
            grid.window_of(digits, window);
            if (constraints_hold_on_window(spec, bad.constraints, window,
                                           kWindowTol)) {
                result.violation_depth = depth;
                return result;
            }
        }
        if (depth == max_depth)
            break;
        std::vector<std::uint64_t> next;
        for (std::uint64_t id : frontier) {
            grid.decode(id, digits);
            grid.each_successor(digits, [&](const std::vector<std::size_t>& s) {
                const std::uint64_t sid = grid.encode(s);
                if (!visited[sid]) {
                    visited[sid] = true;
                    next.push_back(sid);
                }
            });
        }
        result.states_visited += next.size();
        frontier = std::move(next);
        if (frontier.empty())
            break;
    }
    return result;
}

RunLengthResult longest_nongood_run(const TransitionSpec& spec,
                                    const StatePredicate& good, double pitch,
                                    std::uint64_t state_cap) {
    spec.validate();
    const StateGrid grid(spec, pitch, state_cap);
    RunLengthResult result;
    result.states_considered = grid.total;

    // Local ids for the states falsifying the good predicate.
    std::unordered_map<std::uint64_t, std::size_t> local;
    std::vector<std::uint64_t> nodes;
    std::vector<std::size_t> digits;
    std::vector<double> window;
    for (std::uint64_t id = 0; id < grid.total; ++id) {
        grid.decode(id, digits);
        grid.window_of(digits, window);
        if (!constraints_hold_on_window(spec, good.constraints, window,
                                        kWindowTol)) {
            local.emplace(id, nodes.size());
            nodes.push_back(id);
        }
    }

    // Longest path by DFS with cycle detection: 0 new, 1 on the current
    // path, 2 finished.
    std::vector<std::uint8_t> color(nodes.size(), 0);
    std::vector<std::size_t> longest(nodes.size(), 0);
    std::vector<std::vector<std::size_t>> succ_cache(nodes.size());
    auto successors = [&](std::size_t idx) -> const std::vector<std::size_t>& {
        std::vector<std::size_t>& out = succ_cache[idx];
        if (out.empty()) {
            grid.decode(nodes[idx], digits);
            grid.each_successor(digits, [&](const std::vector<std::size_t>& s) {
                const auto it = local.find(grid.encode(s));
                if (it != local.end())
                    out.push_back(it->second);
            });
        }
        return out;
    };

    for (std::size_t root = 0; root < nodes.size(); ++root) {
        if (color[root] != 0)
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [idx, at] = stack.back();
            const std::vector<std::size_t>& next = successors(idx);
            if (at < next.size()) {
                const std::size_t child = next[at];
                ++at;
                if (color[child] == 1) {
                    result.unbounded = true;
                    return result;
                }
                if (color[child] == 0) {
                    color[child] = 1;
                    stack.emplace_back(child, 0);
                }
            } else {
                std::size_t best = 0;
                for (std::size_t child : next)
                    best = std::max(best, longest[child]);
                longest[idx] = 1 + best;
                result.longest = std::max(result.longest, longest[idx]);
                color[idx] = 2;
                stack.pop_back();
            }
        }
    }
    return result;
}

std::vector<std::vector<double>> generate_trace(const TransitionSpec& spec,
                                                std::size_t length,
                                                std::uint64_t seed) {
    spec.validate();
    if (!window_finite(spec))
        throw ModelError("trace sampling needs finite field boxes");
    std::mt19937_64 rng(seed);
    const std::size_t t = spec.window;
    const std::size_t f = spec.fields_per_step;

    auto sample_field = [&](std::size_t field) {
        const Box& b = spec.field_boxes[field];
        if (b.lower == b.upper)
            return b.lower;
        return std::uniform_real_distribution<double>(b.lower, b.upper)(rng);
    };

    // Positions pinned by single-variable equality initial constraints.
    std::vector<std::pair<std::size_t, double>> pinned;
    std::vector<const LinearConstraint*> rest;
    for (const LinearConstraint& c : spec.initial_constraints) {
        if (c.rel == Relation::Eq && c.terms.size() == 1 &&
            c.terms[0].var.site == Site::Input && c.terms[0].coef != 0.0)
            pinned.emplace_back(c.terms[0].var.index,
                                c.constant / c.terms[0].coef);
        else
            rest.push_back(&c);
    }

    std::vector<double> window(t * f);
    bool accepted = false;
    for (int attempt = 0; attempt < 10000 && !accepted; ++attempt) {
        for (std::size_t step = 0; step < t; ++step)
            for (std::size_t field = 0; field < f; ++field)
                window[spec.position(step, field)] = sample_field(field);
        for (const auto& [pos, value] : pinned)
            window[pos] = value;
        accepted = true;
        std::vector<LinearConstraint> remaining;
        for (const LinearConstraint* c : rest)
            remaining.push_back(*c);
        if (!remaining.empty())
            accepted = constraints_hold_on_window(spec, remaining, window,
                                                  kWindowTol);
    }
    if (!accepted)
        throw ModelError("could not sample an initial state in 10000 attempts");

    std::vector<std::vector<double>> trace;
    trace.push_back(window);
    for (std::size_t step = 1; step < length; ++step) {
        std::vector<double> next(t * f);
        for (std::size_t s = 0; s + 1 < t; ++s)
            for (std::size_t field = 0; field < f; ++field)
                next[spec.position(s, field)] =
                    window[spec.position(s + 1, field)];
        for (std::size_t field = 0; field < f; ++field)
            next[spec.position(t - 1, field)] = sample_field(field);
        window = next;
        trace.push_back(window);
    }
    return trace;
}

}
