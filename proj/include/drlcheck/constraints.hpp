#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "drlcheck/network.hpp"

namespace drlcheck {

// Margin used to encode strict inequalities as non-strict ones, and by
// predicate negation to keep the flipped side strict.
inline constexpr double kDeltaStrict = 1e-6;

enum class Site { Input, Output };

// A variable of an unrolled query: input i or output j of one network copy.
struct VarRef {
    std::size_t copy = 0;
    Site site = Site::Input;
    std::size_t index = 0;

    auto operator<=>(const VarRef&) const = default;
};

std::string to_string(const VarRef& v);

enum class Relation { Le, Ge, Eq };

std::string to_string(Relation rel);

struct LinearTerm {
    double coef = 0.0;
    VarRef var;
};

// sum(coef_i * var_i) rel constant
struct LinearConstraint {
    std::vector<LinearTerm> terms;
    Relation rel = Relation::Le;
    double constant = 0.0;
};

// Left-hand side value under a concrete assignment.
double constraint_lhs(const LinearConstraint& c,
                      const std::function<double(const VarRef&)>& value_of);
// Whether lhs rel constant holds with slack tol (tol >= 0 loosens).
bool relation_holds(double lhs, Relation rel, double constant, double tol);

// Closed interval, possibly unbounded on either side. Construction rejects
// lower > upper, so a Box is never empty.
struct Box {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    Box() = default;
    Box(double lo, double hi);

    bool finite() const;
    bool contains(double v, double tol = 0.0) const;
};

// A satisfiability query: k copies of one network, a box per input
// variable, a conjunction of linear constraints, and coupling constraints
// tying copies together. Value semantics; conjoin copies rather than
// mutating its argument.
class Query {
public:
    Query(std::shared_ptr<const Network> net, std::size_t copies);

    const Network& net() const { return *net_; }
    std::shared_ptr<const Network> net_ptr() const { return net_; }
    std::size_t copies() const { return copies_; }

    const Box& box(std::size_t copy, std::size_t input) const;
    void set_box(std::size_t copy, std::size_t input, Box box);

    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const std::vector<LinearConstraint>& couplings() const { return couplings_; }

    void add_constraint(LinearConstraint c);
    void add_coupling(LinearConstraint c);

    // Bounds-check a variable reference against this query.
    void check_ref(const VarRef& v) const;

private:
    void check_constraint(const LinearConstraint& c) const;

    std::shared_ptr<const Network> net_;
    std::size_t copies_;
    std::vector<Box> boxes_;  // copies * input_size, row-major by copy
    std::vector<LinearConstraint> constraints_;
    std::vector<LinearConstraint> couplings_;
};

// q with one more conjunct; q itself is unchanged.
Query conjoin(const Query& q, const LinearConstraint& c);

// The probe constraint (1 * out_j <= bound) used when bisecting an output
// lower bound: satisfiability of q plus this constraint asks whether the
// output can still reach bound or below.
LinearConstraint output_at_most(std::size_t output_index, double bound,
                                std::size_t copy = 0);

}
