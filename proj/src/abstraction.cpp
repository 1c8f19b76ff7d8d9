#include "drlcheck/abstraction.hpp"

#include <algorithm>

#include "drlcheck/errors.hpp"
#include "drlcheck/log.hpp"

namespace drlcheck {

bool AbstractionMask::freed(std::size_t position) const {
    return std::binary_search(freed_positions.begin(), freed_positions.end(),
                              position);
}

namespace {

AbstractionMask finish_mask(std::vector<std::size_t> positions) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()),
                    positions.end());
    return AbstractionMask{std::move(positions)};
}

}

AbstractionMask mask_from_fields(
    const TransitionSpec& spec,
    const std::vector<std::pair<std::size_t, std::size_t>>& step_fields) {
    std::vector<std::size_t> positions;
    for (const auto& [step, field] : step_fields) {
        if (step >= spec.window || field >= spec.fields_per_step)
            throw ModelError("abstracted field (" + std::to_string(step) + ", " +
                             std::to_string(field) + ") is outside the " +
                             std::to_string(spec.window) + "x" +
                             std::to_string(spec.fields_per_step) + " window");
        positions.push_back(spec.position(step, field));
    }
    return finish_mask(std::move(positions));
}

AbstractionMask mask_older_than(const TransitionSpec& spec, std::size_t step) {
    std::vector<std::size_t> positions;
    for (std::size_t s = 0; s < std::min(step, spec.window); ++s)
        for (std::size_t field = 0; field < spec.fields_per_step; ++field)
            positions.push_back(spec.position(s, field));
    return finish_mask(std::move(positions));
}

std::vector<Box> global_boxes(const TransitionSpec& spec) {
    std::vector<Box> boxes(spec.window * spec.fields_per_step);
    for (std::size_t step = 0; step < spec.window; ++step)
        for (std::size_t field = 0; field < spec.fields_per_step; ++field)
            boxes[spec.position(step, field)] = spec.field_boxes[field];
    return boxes;
}

Query abstract_query(const Query& q, const AbstractionMask& mask,
                     const std::vector<Box>& widen_to) {
    const std::size_t in = q.net().input_size();
    if (widen_to.size() != in)
        throw ModelError("widening boxes cover " + std::to_string(widen_to.size()) +
                         " positions, expected " + std::to_string(in));
    for (std::size_t pos : mask.freed_positions)
        if (pos >= in)
            throw ModelError("freed position " + std::to_string(pos) +
                             " is outside the input layer");

    Query out(q.net_ptr(), q.copies());
    for (std::size_t copy = 0; copy < q.copies(); ++copy)
        for (std::size_t i = 0; i < in; ++i)
            out.set_box(copy, i, mask.freed(i) ? widen_to[i] : q.box(copy, i));

    auto touches_freed = [&](const LinearConstraint& c) {
        for (const LinearTerm& t : c.terms)
            if (t.var.site == Site::Input && mask.freed(t.var.index))
                return true;
        return false;
    };
    for (const LinearConstraint& c : q.constraints())
        if (!touches_freed(c))
            out.add_constraint(c);
    for (const LinearConstraint& c : q.couplings())
        if (!touches_freed(c))
            out.add_coupling(c);
    return out;
}

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::Direct: return "direct";
    case Provenance::ProvedViaAbstraction: return "proved-via-abstraction";
    case Provenance::WitnessFromAbstraction: return "witness-from-abstraction";
    case Provenance::AbstractionRefutedSpurious:
        return "abstraction-refuted-spurious";
    default: return "abstraction-inconclusive";
    }
}

AbstractVerdict solve_with_abstraction(const Query& q, const AbstractionMask& mask,
                                       const std::vector<Box>& widen_to,
                                       const SolverConfig& cfg) {
    if (mask.empty())
        return {solve(q, cfg), Provenance::Direct};

    const Query relaxed = abstract_query(q, mask, widen_to);
    Verdict v = solve(relaxed, cfg);
    if (v.status == Status::Unsat)
        return {std::move(v), Provenance::ProvedViaAbstraction};
    if (v.status == Status::Unknown)
        return {std::move(v), Provenance::AbstractionInconclusive};

    if (validate_witness(q, *v.witness, cfg.tau_val))
        return {std::move(v), Provenance::WitnessFromAbstraction};

    log_info("abstract witness is spurious, solving the concrete query");
    Verdict concrete = solve(q, cfg);
    concrete.stats.absorb(v.stats);
    return {std::move(concrete), Provenance::AbstractionRefutedSpurious};
}

}
