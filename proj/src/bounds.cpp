#include "drlcheck/bounds.hpp"

#include <numeric>

#include "drlcheck/errors.hpp"
#include "compile.hpp"

namespace drlcheck {

QueryBounds::QueryBounds(std::size_t copies, std::vector<std::size_t> layer_sizes)
    : copies_(copies), layer_sizes_(std::move(layer_sizes)) {
    layer_offsets_.resize(layer_sizes_.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < layer_sizes_.size(); ++i) {
        layer_offsets_[i] = off;
        off += layer_sizes_[i];
    }
    cells_.assign(copies_ * off, Interval{});
    per_copy_ = off;
}

Interval& QueryBounds::at(std::size_t copy, std::size_t layer, std::size_t neuron) {
    return cells_[copy * per_copy_ + layer_offsets_[layer] + neuron];
}

const Interval& QueryBounds::at(std::size_t copy, std::size_t layer,
                                std::size_t neuron) const {
    return cells_[copy * per_copy_ + layer_offsets_[layer] + neuron];
}

const Interval& QueryBounds::output(std::size_t copy, std::size_t j) const {
    return at(copy, layer_sizes_.size() - 1, j);
}

bool QueryBounds::any_empty() const {
    for (const Interval& iv : cells_)
        if (iv.empty())
            return true;
    return false;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        // Smaller root wins so representatives stay deterministic.
        if (b < a)
            std::swap(a, b);
        parent[b] = a;
    }
};

// x = y in disguise: exactly two input terms, opposite equal coefficients,
// zero constant.
bool is_pure_equality(const LinearConstraint& c) {
    return c.rel == Relation::Eq && c.constant == 0.0 && c.terms.size() == 2 &&
           c.terms[0].var.site == Site::Input && c.terms[1].var.site == Site::Input &&
           c.terms[0].coef != 0.0 && c.terms[0].coef == -c.terms[1].coef;
}

// Fold (a * x rel b) into the range of x's class. Returns false when the
// constraint is a contradiction on its own (a == 0 with an unsatisfiable
// relation).
bool tighten_range(Interval& r, double coef, Relation rel, double constant) {
    if (coef == 0.0) {
        switch (rel) {
        case Relation::Le: return 0.0 <= constant;
        case Relation::Ge: return 0.0 >= constant;
        default: return constant == 0.0;
        }
    }
    const double v = constant / coef;
    Relation effective = rel;
    if (coef < 0.0 && rel != Relation::Eq)
        effective = rel == Relation::Le ? Relation::Ge : Relation::Le;
    switch (effective) {
    case Relation::Le:
        r.hi = std::min(r.hi, v);
        break;
    case Relation::Ge:
        r.lo = std::max(r.lo, v);
        break;
    default:
        r.lo = std::max(r.lo, v);
        r.hi = std::min(r.hi, v);
        break;
    }
    return true;
}

}

CompiledQuery compile_query(const Query& q) {
    CompiledQuery out;
    out.query = &q;
    out.input_size = q.net().input_size();
    out.copies = q.copies();

    const std::size_t n = out.copies * out.input_size;
    UnionFind uf(n);
    for (const LinearConstraint& c : q.couplings())
        if (is_pure_equality(c))
            uf.unite(c.terms[0].var.copy * out.input_size + c.terms[0].var.index,
                     c.terms[1].var.copy * out.input_size + c.terms[1].var.index);

    out.class_of.assign(n, 0);
    std::vector<std::size_t> root_to_class(n, SIZE_MAX);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t root = uf.find(v);
        if (root_to_class[root] == SIZE_MAX) {
            root_to_class[root] = out.class_members.size();
            out.class_members.emplace_back();
        }
        out.class_of[v] = root_to_class[root];
        out.class_members[out.class_of[v]].push_back(v);
    }

    out.class_range.assign(out.class_members.size(), Interval{});
    for (std::size_t v = 0; v < n; ++v) {
        const Box& b = q.box(v / out.input_size, v % out.input_size);
        Interval& r = out.class_range[out.class_of[v]];
        r = r.intersect({b.lower, b.upper});
    }

    for (const LinearConstraint& c : q.constraints()) {
        if (c.terms.size() == 1 && c.terms[0].var.site == Site::Input) {
            const VarRef& var = c.terms[0].var;
            Interval& r = out.class_range[out.class_of[out.flat(var.copy, var.index)]];
            if (!tighten_range(r, c.terms[0].coef, c.rel, c.constant))
                out.infeasible = true;
        } else {
            out.rows.push_back(&c);
        }
    }
    for (const LinearConstraint& c : q.couplings())
        if (!is_pure_equality(c))
            out.rows.push_back(&c);

    for (const Interval& r : out.class_range)
        if (r.empty())
            out.infeasible = true;
    return out;
}

ReluIndex::ReluIndex(const Network& net) {
    const auto& layers = net.layers();
    for (std::size_t li = 0; li < layers.size(); ++li) {
        if (layers[li].kind != LayerKind::Relu)
            continue;
        relu_layers.push_back(li);
        layer_base.push_back(per_copy);
        layer_sizes.push_back(layers[li].size);
        per_copy += layers[li].size;
    }
}

ReluIndex::Ref ReluIndex::decode(std::size_t id) const {
    Ref ref;
    ref.copy = id / per_copy;
    std::size_t rest = id % per_copy;
    std::size_t pos = 0;
    while (pos + 1 < relu_layers.size() && rest >= layer_base[pos + 1])
        ++pos;
    ref.relu_pos = pos;
    ref.j = rest - layer_base[pos];
    return ref;
}

namespace {

const Interval kEmptyInterval{1.0, -1.0};

Interval phase_clip(ReluPhase phase) {
    switch (phase) {
    case ReluPhase::Active: return {0.0, std::numeric_limits<double>::infinity()};
    case ReluPhase::Inactive: return {-std::numeric_limits<double>::infinity(), 0.0};
    default: return {};
    }
}

}

QueryBounds propagate_with_phases(const Query& q, const CompiledQuery& cq,
                                  const ReluIndex& ri,
                                  const std::vector<ReluPhase>& phases) {
    const Network& net = q.net();
    std::vector<std::size_t> sizes;
    sizes.push_back(net.input_size());
    for (const Layer& l : net.layers())
        sizes.push_back(l.size);
    QueryBounds b(q.copies(), std::move(sizes));

    if (cq.infeasible) {
        for (std::size_t c = 0; c < q.copies(); ++c)
            for (std::size_t i = 0; i < net.input_size(); ++i)
                b.at(c, 0, i) = kEmptyInterval;
        return b;
    }

    const auto& layers = net.layers();
    for (std::size_t copy = 0; copy < q.copies(); ++copy) {
        for (std::size_t i = 0; i < net.input_size(); ++i)
            b.at(copy, 0, i) = cq.class_range[cq.class_of[cq.flat(copy, i)]];

        std::size_t relu_pos = 0;
        for (std::size_t li = 0; li < layers.size(); ++li) {
            const Layer& l = layers[li];
            if (l.kind == LayerKind::WeightedSum) {
                for (std::size_t r = 0; r < l.size; ++r) {
                    double lo = l.biases(static_cast<long>(r));
                    double hi = lo;
                    bool empty = false;
                    for (long c = 0; c < l.weights.cols(); ++c) {
                        const double w = l.weights(static_cast<long>(r), c);
                        if (w == 0.0)
                            continue;
                        const Interval& src =
                            b.at(copy, li, static_cast<std::size_t>(c));
                        if (src.empty()) {
                            empty = true;
                            break;
                        }
                        lo += w > 0.0 ? w * src.lo : w * src.hi;
                        hi += w > 0.0 ? w * src.hi : w * src.lo;
                    }
                    b.at(copy, li + 1, r) = empty ? kEmptyInterval : Interval{lo, hi};
                }
            } else {
                for (std::size_t r = 0; r < l.size; ++r) {
                    const ReluPhase phase = phases[ri.id(copy, relu_pos, r)];
                    Interval& pre = b.at(copy, li, r);
                    if (phase != ReluPhase::Unknown && !pre.empty())
                        pre = pre.intersect(phase_clip(phase));
                    if (pre.empty()) {
                        b.at(copy, li + 1, r) = kEmptyInterval;
                    } else if (phase == ReluPhase::Inactive) {
                        b.at(copy, li + 1, r) = Interval{0.0, 0.0};
                    } else {
                        b.at(copy, li + 1, r) =
                            Interval{std::max(0.0, pre.lo), std::max(0.0, pre.hi)};
                    }
                }
                ++relu_pos;
            }
        }
    }

    // Single-variable output constraints narrow the computed intervals.
    const std::size_t last = b.layer_count() - 1;
    for (const LinearConstraint* c : cq.rows) {
        if (c->terms.size() != 1 || c->terms[0].var.site != Site::Output)
            continue;
        Interval& r = b.at(c->terms[0].var.copy, last, c->terms[0].var.index);
        if (r.empty())
            continue;
        Interval narrowed = r;
        if (tighten_range(narrowed, c->terms[0].coef, c->rel, c->constant))
            r = narrowed;
        else
            r = kEmptyInterval;
    }
    return b;
}

QueryBounds propagate_bounds(const Query& q) {
    const CompiledQuery cq = compile_query(q);
    const ReluIndex ri(q.net());
    const std::vector<ReluPhase> phases(ri.count(q.copies()), ReluPhase::Unknown);
    return propagate_with_phases(q, cq, ri, phases);
}

}
