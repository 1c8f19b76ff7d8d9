#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "compile.hpp"
#include "drlcheck/bounds.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

namespace {

Query fig1_unit_box() {
    Query q(share(make_fig1()), 1);
    q.set_box(0, 0, Box(0.0, 1.0));
    q.set_box(0, 1, Box(0.0, 1.0));
    return q;
}

}

TEST_CASE("worked example intervals on the unit box") {
    const QueryBounds b = propagate_bounds(fig1_unit_box());
    // layer 1: the affine layer before the ReLU
    CHECK(b.at(0, 1, 0).lo == 1.0);
    CHECK(b.at(0, 1, 0).hi == 8.0);
    CHECK(b.at(0, 1, 1).lo == -6.0);
    CHECK(b.at(0, 1, 1).hi == -1.0);
    // layer 2: ReLU keeps the active neuron and pins the inactive one
    CHECK(b.at(0, 2, 0).lo == 1.0);
    CHECK(b.at(0, 2, 0).hi == 8.0);
    CHECK(b.at(0, 2, 1).lo == 0.0);
    CHECK(b.at(0, 2, 1).hi == 0.0);
    // output layer
    CHECK(b.output(0, 0).lo == 3.0);
    CHECK(b.output(0, 0).hi == 24.0);
}

TEST_CASE("single-variable constraints tighten the inputs") {
    Query q = fig1_unit_box();
    LinearConstraint c;
    c.terms.push_back({1.0, {0, Site::Input, 0}});
    c.rel = Relation::Le;
    c.constant = 0.5;
    q.add_constraint(c);
    const QueryBounds b = propagate_bounds(q);
    CHECK(b.at(0, 0, 0).hi == 0.5);
    CHECK(b.at(0, 1, 0).hi == 2.0 * 0.5 + 5.0 + 1.0);
}

TEST_CASE("single-variable output constraints cut the final layer") {
    Query q = fig1_unit_box();
    q.add_constraint(output_at_most(0, 10.0));
    const QueryBounds b = propagate_bounds(q);
    CHECK(b.output(0, 0).hi == 10.0);
    CHECK(b.output(0, 0).lo == 3.0);
}

TEST_CASE("coupled positions share the intersected range") {
    Query q(share(make_fig1()), 2);
    q.set_box(0, 0, Box(0.0, 1.0));
    q.set_box(0, 1, Box(0.0, 1.0));
    q.set_box(1, 0, Box(0.5, 2.0));
    q.set_box(1, 1, Box(0.0, 1.0));
    LinearConstraint eq;
    eq.terms.push_back({1.0, {0, Site::Input, 0}});
    eq.terms.push_back({-1.0, {1, Site::Input, 0}});
    eq.rel = Relation::Eq;
    q.add_coupling(eq);
    const QueryBounds b = propagate_bounds(q);
    CHECK(b.at(0, 0, 0).lo == 0.5);
    CHECK(b.at(0, 0, 0).hi == 1.0);
    CHECK(b.at(1, 0, 0).lo == 0.5);
    CHECK(b.at(1, 0, 0).hi == 1.0);
}

TEST_CASE("contradictory single-variable constraints turn empty") {
    Query q = fig1_unit_box();
    LinearConstraint lo;
    lo.terms.push_back({1.0, {0, Site::Input, 0}});
    lo.rel = Relation::Ge;
    lo.constant = 0.8;
    LinearConstraint hi;
    hi.terms.push_back({1.0, {0, Site::Input, 0}});
    hi.rel = Relation::Le;
    hi.constant = 0.2;
    q.add_constraint(lo);
    q.add_constraint(hi);
    CHECK(propagate_bounds(q).any_empty());
}

TEST_CASE("sampled evaluations stay inside the intervals") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> edge(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const Network net = make_random_net(rng, {2, 3, 1});
        Query q(share(std::move(net)), 1);
        std::vector<Box> boxes;
        for (int i = 0; i < 2; ++i) {
            double a = edge(rng), b = edge(rng);
            if (a > b)
                std::swap(a, b);
            boxes.push_back(Box(a, b));
            q.set_box(0, static_cast<std::size_t>(i), boxes.back());
        }
        const QueryBounds bounds = propagate_bounds(q);
        REQUIRE_FALSE(bounds.any_empty());
        std::uniform_real_distribution<double> t(0.0, 1.0);
        for (int p = 0; p < 50; ++p) {
            Eigen::VectorXd in(2);
            for (int i = 0; i < 2; ++i)
                in(i) = boxes[static_cast<std::size_t>(i)].lower +
                        t(rng) * (boxes[static_cast<std::size_t>(i)].upper -
                                  boxes[static_cast<std::size_t>(i)].lower);
            const double out = q.net().evaluate(in)(0);
            CHECK(bounds.output(0, 0).contains(out, 1e-9));
        }
    }
}

TEST_CASE("phase restrictions clip the pre-activation") {
    const Query q = fig1_unit_box();
    const CompiledQuery cq = compile_query(q);
    const ReluIndex ri(q.net());
    REQUIRE(ri.count(1) == 2);

    // Neuron 0 is provably active on the unit box; forcing it inactive
    // empties its pre-activation.
    std::vector<ReluPhase> phases(2, ReluPhase::Unknown);
    phases[0] = ReluPhase::Inactive;
    CHECK(propagate_with_phases(q, cq, ri, phases).any_empty());

    // Neuron 1 is provably inactive; forcing it active also empties.
    phases.assign(2, ReluPhase::Unknown);
    phases[1] = ReluPhase::Active;
    CHECK(propagate_with_phases(q, cq, ri, phases).any_empty());

    // Forcing the phases the box already implies changes nothing.
    phases[0] = ReluPhase::Active;
    phases[1] = ReluPhase::Inactive;
    const QueryBounds b = propagate_with_phases(q, cq, ri, phases);
    CHECK_FALSE(b.any_empty());
    CHECK(b.output(0, 0).lo == 3.0);
    CHECK(b.output(0, 0).hi == 24.0);
}

TEST_CASE("relu index numbers neurons by copy then layer") {
    const ReluIndex ri(make_fig1());
    REQUIRE(ri.relu_layers.size() == 1);
    CHECK(ri.relu_layers[0] == 1);
    CHECK(ri.per_copy == 2);
    CHECK(ri.id(0, 0, 1) == 1);
    CHECK(ri.id(1, 0, 0) == 2);
    const ReluIndex::Ref ref = ri.decode(3);
    CHECK(ref.copy == 1);
    CHECK(ref.relu_pos == 0);
    CHECK(ref.j == 1);
}
