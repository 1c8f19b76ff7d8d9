#include "drlcheck/constraints.hpp"

#include <cmath>

#include "drlcheck/errors.hpp"

namespace drlcheck {

std::string to_string(const VarRef& v) {
    return std::to_string(v.copy) + ":" + (v.site == Site::Input ? "in" : "out") + ":" +
           std::to_string(v.index);
}

std::string to_string(Relation rel) {
    switch (rel) {
    case Relation::Le: return "<=";
    case Relation::Ge: return ">=";
    default: return "=";
    }
}

double constraint_lhs(const LinearConstraint& c,
                      const std::function<double(const VarRef&)>& value_of) {
    double lhs = 0.0;
    for (const LinearTerm& t : c.terms)
        lhs += t.coef * value_of(t.var);
    return lhs;
}

bool relation_holds(double lhs, Relation rel, double constant, double tol) {
    switch (rel) {
    case Relation::Le: return lhs <= constant + tol;
    case Relation::Ge: return lhs >= constant - tol;
    default: return std::abs(lhs - constant) <= tol;
    }
}

Box::Box(double lo, double hi) : lower(lo), upper(hi) {
    if (std::isnan(lo) || std::isnan(hi))
        throw ModelError("box bound is NaN");
    if (lo > hi)
        throw ModelError("empty box [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

bool Box::finite() const {
    return std::isfinite(lower) && std::isfinite(upper);
}

bool Box::contains(double v, double tol) const {
    return v >= lower - tol && v <= upper + tol;
}

Query::Query(std::shared_ptr<const Network> net, std::size_t copies)
    : net_(std::move(net)), copies_(copies) {
    if (!net_)
        throw ModelError("query needs a network");
    if (copies_ < 1)
        throw ModelError("query needs at least one network copy");
    boxes_.assign(copies_ * net_->input_size(), Box());
}

const Box& Query::box(std::size_t copy, std::size_t input) const {
    check_ref({copy, Site::Input, input});
    return boxes_[copy * net_->input_size() + input];
}

void Query::set_box(std::size_t copy, std::size_t input, Box box) {
    check_ref({copy, Site::Input, input});
    boxes_[copy * net_->input_size() + input] = box;
}

void Query::check_ref(const VarRef& v) const {
    if (v.copy >= copies_)
        throw ModelError("variable " + to_string(v) + " references copy " +
                         std::to_string(v.copy) + " of " + std::to_string(copies_));
    const std::size_t limit =
        v.site == Site::Input ? net_->input_size() : net_->output_size();
    if (v.index >= limit)
        throw ModelError("variable " + to_string(v) + " is out of range (limit " +
                         std::to_string(limit) + ")");
}

void Query::check_constraint(const LinearConstraint& c) const {
    if (c.terms.empty())
        throw ModelError("constraint has no terms");
    if (std::isnan(c.constant))
        throw ModelError("constraint constant is NaN");
    for (const LinearTerm& t : c.terms) {
        if (!std::isfinite(t.coef))
            throw ModelError("non-finite coefficient on " + to_string(t.var));
        check_ref(t.var);
    }
}

void Query::add_constraint(LinearConstraint c) {
    check_constraint(c);
    constraints_.push_back(std::move(c));
}

void Query::add_coupling(LinearConstraint c) {
    check_constraint(c);
    couplings_.push_back(std::move(c));
}

Query conjoin(const Query& q, const LinearConstraint& c) {
    Query out = q;
    out.add_constraint(c);
    return out;
}

LinearConstraint output_at_most(std::size_t output_index, double bound,
                                std::size_t copy) {
    LinearConstraint c;
    c.terms.push_back({1.0, {copy, Site::Output, output_index}});
    c.rel = Relation::Le;
    c.constant = bound;
    return c;
}

}
