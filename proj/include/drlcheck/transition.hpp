#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "drlcheck/constraints.hpp"

namespace drlcheck {

// A sliding-window transition system over one policy network. A state is a
// window of the last `window` observation steps, each carrying
// fields_per_step fields; a transition drops the oldest step, shifts the
// rest and appends one fresh step drawn from field_boxes.
struct TransitionSpec {
    std::shared_ptr<const Network> net;
    std::size_t window = 0;           // t
    std::size_t fields_per_step = 0;  // f
    std::vector<Box> field_boxes;     // length f, shared by every step
    std::vector<LinearConstraint> initial_constraints;  // over copy 0
    // layout[step * f + field] = input position; step 0 is the oldest.
    // Empty means the identity layout.
    std::vector<std::size_t> layout;
    std::vector<std::string> field_roles;  // length f or empty

    void validate() const;

    // Input position of (step, field) under the layout.
    std::size_t position(std::size_t step, std::size_t field) const;
};

enum class PredicateKind { Bad, Good };

// A conjunction of linear constraints over one copy's inputs and outputs
// (all terms reference copy 0; re-indexed when applied to a copy).
struct StatePredicate {
    PredicateKind kind = PredicateKind::Bad;
    std::vector<LinearConstraint> constraints;
};

void validate_predicate(const StatePredicate& p);

enum class UnrollMode { FromInitial, FromAnywhere };

// k coupled copies: copy i+1 shares its oldest window-1 steps with copy i
// shifted by one, giving (window-1)*f equality couplings per consecutive
// pair. FromInitial additionally conjoins the initial constraints onto
// copy 0.
Query unroll(const TransitionSpec& spec, std::size_t k, UnrollMode mode);

// q plus p's constraints re-indexed onto each listed copy.
Query constrain_predicate(const Query& q, const StatePredicate& p,
                          const std::vector<std::size_t>& copies);

// Negation as a disjunct list: one single-constraint predicate per conjunct
// with the relation flipped strictly (margin delta). An equality conjunct
// yields two disjuncts.
std::vector<StatePredicate> negate_predicate(const StatePredicate& p,
                                             double delta = kDeltaStrict);

// Loop-closure equalities asserting that from_copy's successor is to_copy,
// i.e. to_copy's oldest window-1 steps equal from_copy's newest window-1
// steps. Used for lasso searches.
std::vector<LinearConstraint> successor_couplings(const TransitionSpec& spec,
                                                  std::size_t from_copy,
                                                  std::size_t to_copy);

}
