#include "drlcheck/transition.hpp"

#include <algorithm>

#include "drlcheck/errors.hpp"

namespace drlcheck {

void TransitionSpec::validate() const {
    if (!net)
        throw ModelError("transition spec needs a network");
    if (window < 1)
        throw ModelError("window must be at least 1");
    if (fields_per_step < 1)
        throw ModelError("fields_per_step must be at least 1");
    if (window * fields_per_step != net->input_size())
        throw ModelError("window * fields_per_step is " +
                         std::to_string(window * fields_per_step) +
                         " but the network takes " + std::to_string(net->input_size()) +
                         " inputs");
    if (field_boxes.size() != fields_per_step)
        throw ModelError("need one field box per field, got " +
                         std::to_string(field_boxes.size()));
    if (!layout.empty()) {
        const std::size_t n = window * fields_per_step;
        if (layout.size() != n)
            throw ModelError("layout must list all " + std::to_string(n) + " positions");
        std::vector<bool> seen(n, false);
        for (std::size_t p : layout) {
            if (p >= n || seen[p])
                throw ModelError("layout is not a permutation of input positions");
            seen[p] = true;
        }
    }
    if (!field_roles.empty() && field_roles.size() != fields_per_step)
        throw ModelError("field_roles must name every field or be omitted");
    for (const LinearConstraint& c : initial_constraints)
        for (const LinearTerm& t : c.terms)
            if (t.var.copy != 0)
                throw ModelError("initial constraints may only reference copy 0");
}

std::size_t TransitionSpec::position(std::size_t step, std::size_t field) const {
    const std::size_t slot = step * fields_per_step + field;
    return layout.empty() ? slot : layout[slot];
}

std::vector<LinearConstraint> successor_couplings(const TransitionSpec& spec,
                                                  std::size_t from_copy,
                                                  std::size_t to_copy) {
    std::vector<LinearConstraint> out;
    for (std::size_t step = 0; step + 1 < spec.window; ++step) {
        for (std::size_t field = 0; field < spec.fields_per_step; ++field) {
            LinearConstraint eq;
            eq.terms.push_back(
                {1.0, {to_copy, Site::Input, spec.position(step, field)}});
            eq.terms.push_back(
                {-1.0, {from_copy, Site::Input, spec.position(step + 1, field)}});
            eq.rel = Relation::Eq;
            eq.constant = 0.0;
            out.push_back(std::move(eq));
        }
    }
    return out;
}

Query unroll(const TransitionSpec& spec, std::size_t k, UnrollMode mode) {
    spec.validate();
    if (k < 1)
        throw ModelError("unroll needs at least one copy");

    Query q(spec.net, k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t step = 0; step < spec.window; ++step)
            for (std::size_t field = 0; field < spec.fields_per_step; ++field)
                q.set_box(c, spec.position(step, field), spec.field_boxes[field]);

    for (std::size_t c = 0; c + 1 < k; ++c)
        for (LinearConstraint& eq : successor_couplings(spec, c, c + 1))
            q.add_coupling(std::move(eq));

    if (mode == UnrollMode::FromInitial)
        for (const LinearConstraint& c : spec.initial_constraints)
            q.add_constraint(c);
    return q;
}

Query constrain_predicate(const Query& q, const StatePredicate& p,
                          const std::vector<std::size_t>& copies) {
    validate_predicate(p);
    Query out = q;
    for (std::size_t target : copies) {
        for (const LinearConstraint& c : p.constraints) {
            LinearConstraint shifted = c;
            for (LinearTerm& t : shifted.terms)
                t.var.copy = target;
            out.add_constraint(std::move(shifted));
        }
    }
    return out;
}

void validate_predicate(const StatePredicate& p) {
    if (p.constraints.empty())
        throw ModelError("state predicate has no constraints");
    for (const LinearConstraint& c : p.constraints) {
        if (c.terms.empty())
            throw ModelError("state predicate constraint has no terms");
        for (const LinearTerm& t : c.terms)
            if (t.var.copy != 0)
                throw ModelError("state predicates are copy-local; write terms on copy 0");
    }
}

std::vector<StatePredicate> negate_predicate(const StatePredicate& p, double delta) {
    validate_predicate(p);
    std::vector<StatePredicate> disjuncts;
    auto emit = [&](const LinearConstraint& base, Relation rel, double constant) {
        StatePredicate d;
        d.kind = p.kind;
        LinearConstraint c = base;
        c.rel = rel;
        c.constant = constant;
        d.constraints.push_back(std::move(c));
        disjuncts.push_back(std::move(d));
    };
    for (const LinearConstraint& c : p.constraints) {
        switch (c.rel) {
        case Relation::Le:
            emit(c, Relation::Ge, c.constant + delta);
            break;
        case Relation::Ge:
            emit(c, Relation::Le, c.constant - delta);
            break;
        case Relation::Eq:
            emit(c, Relation::Le, c.constant - delta);
            emit(c, Relation::Ge, c.constant + delta);
            break;
        }
    }
    return disjuncts;
}

}
