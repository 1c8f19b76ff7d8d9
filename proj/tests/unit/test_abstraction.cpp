#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "drlcheck/abstraction.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

namespace {

LinearConstraint out_at_least(double c, std::size_t copy = 0) {
    LinearConstraint r;
    r.terms.push_back({1.0, {copy, Site::Output, 0}});
    r.rel = Relation::Ge;
    r.constant = c;
    return r;
}

LinearConstraint input_at_least(std::size_t pos, double c) {
    LinearConstraint r;
    r.terms.push_back({1.0, {0, Site::Input, pos}});
    r.rel = Relation::Ge;
    r.constant = c;
    return r;
}

}

TEST_CASE("mask builders sort, deduplicate and validate") {
    std::mt19937_64 rng(41);
    const TransitionSpec spec =
        make_spec(share(make_random_net(rng, {6, 2, 1})), 3, 2, Box(0.0, 1.0));

    const AbstractionMask mask =
        mask_from_fields(spec, {{2, 1}, {0, 0}, {2, 1}});
    CHECK(mask.freed_positions == std::vector<std::size_t>{0, 5});
    CHECK(mask.freed(0));
    CHECK(mask.freed(5));
    CHECK_FALSE(mask.freed(1));
    CHECK_THROWS_AS(mask_from_fields(spec, {{3, 0}}), ModelError);

    const AbstractionMask older = mask_older_than(spec, 1);
    CHECK(older.freed_positions == std::vector<std::size_t>{0, 1});
    CHECK(mask_older_than(spec, 0).empty());

    const auto ident = load_transition_spec(fixture_path("spec_ident1.json"));
    CHECK(global_boxes(ident).size() == 1);
}

TEST_CASE("older-than masks free whole leading steps") {
    const auto spec = load_transition_spec(fixture_path("spec_depth3.json"));
    const AbstractionMask mask = mask_older_than(spec, 1);
    CHECK(mask.freed_positions == std::vector<std::size_t>{0});
}

TEST_CASE("abstracting widens freed boxes and drops touching rows") {
    const auto spec = load_transition_spec(fixture_path("spec_zero.json"));
    Query q = unroll(spec, 2, UnrollMode::FromAnywhere);
    q.set_box(0, 0, Box(0.2, 0.4));
    q.add_constraint(input_at_least(0, 0.3));
    q.add_constraint(out_at_least(0.1, 1));
    REQUIRE(q.couplings().size() == 1);

    const AbstractionMask mask = mask_from_fields(spec, {{0, 0}});
    const Query a = abstract_query(q, mask, global_boxes(spec));

    // position 0 returns to the declared global range in every copy
    CHECK(a.box(0, 0).lower == 0.0);
    CHECK(a.box(0, 0).upper == 1.0);
    CHECK(a.box(1, 0).lower == 0.0);
    // untouched boxes and constraints survive
    CHECK(a.box(0, 1).upper == 1.0);
    REQUIRE(a.constraints().size() == 1);
    CHECK(a.constraints()[0].terms[0].var.site == Site::Output);
    // the shift coupling references position 0 and is gone
    CHECK(a.couplings().empty());

    CHECK_THROWS_AS(abstract_query(q, mask, std::vector<Box>(1, Box(0.0, 1.0))),
                    ModelError);
}

TEST_CASE("an empty mask solves directly") {
    const auto q = load_query(fixture_path("query_fig1_sat.json"),
                              share(load_network(fixture_path("net_fig1.json"))));
    const AbstractVerdict a =
        solve_with_abstraction(q, {}, std::vector<Box>(2, Box(0.0, 1.0)));
    const Verdict direct = solve(q);
    CHECK(a.provenance == Provenance::Direct);
    CHECK(a.verdict.status == direct.status);
    REQUIRE(a.verdict.witness.has_value());
    CHECK(a.verdict.witness->inputs == direct.witness->inputs);
}

TEST_CASE("an unsatisfiable abstraction proves the original") {
    const auto spec = load_transition_spec(fixture_path("spec_zero.json"));
    Query q = unroll(spec, 1, UnrollMode::FromAnywhere);
    q.add_constraint(out_at_least(2.0));
    q.add_constraint(input_at_least(0, 0.5));

    const AbstractionMask mask = mask_from_fields(spec, {{0, 0}});
    const AbstractVerdict a = solve_with_abstraction(q, mask, global_boxes(spec));
    CHECK(a.verdict.status == Status::Unsat);
    CHECK(a.provenance == Provenance::ProvedViaAbstraction);
    CHECK(solve(q).status == Status::Unsat);
}

TEST_CASE("a witness surviving the concrete check is genuine") {
    const auto spec = load_transition_spec(fixture_path("spec_zero.json"));
    Query q = unroll(spec, 1, UnrollMode::FromAnywhere);
    q.add_constraint(out_at_least(0.5));

    const AbstractionMask mask = mask_from_fields(spec, {{0, 0}});
    const AbstractVerdict a = solve_with_abstraction(q, mask, global_boxes(spec));
    REQUIRE(a.verdict.status == Status::Sat);
    CHECK(a.provenance == Provenance::WitnessFromAbstraction);
    REQUIRE(a.verdict.witness.has_value());
    CHECK(validate_witness(q, *a.verdict.witness));
}

TEST_CASE("a spurious witness falls back to the concrete query") {
    const auto net = share(load_network(fixture_path("net_zero.json")));
    const auto q = load_query(fixture_path("query_zero_spurious.json"), net);
    REQUIRE(solve(q).status == Status::Unsat);

    AbstractionMask mask;
    mask.freed_positions = {0};
    const std::vector<Box> widen(2, Box(0.0, 1.0));

    // Dropping the rows through position 0 leaves only the satisfiable
    // copy-0 constraint, so the abstract pass finds a witness the original
    // couplings reject.
    const Query a = abstract_query(q, mask, widen);
    CHECK(solve(a).status == Status::Sat);

    const AbstractVerdict v = solve_with_abstraction(q, mask, widen);
    CHECK(v.verdict.status == Status::Unsat);
    CHECK(v.provenance == Provenance::AbstractionRefutedSpurious);
    // the fallback solve's work is included
    CHECK(v.verdict.stats.lp_calls > 0);
}

TEST_CASE("original witnesses stay feasible under the abstraction") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto net = share(make_random_net(rng, {4, 3, 1}));
        Query q(net, 1);
        for (std::size_t i = 0; i < 4; ++i)
            q.set_box(0, i, Box(-1.0, 1.0));
        Eigen::VectorXd probe(4);
        probe << pick(rng), pick(rng), pick(rng), pick(rng);
        q.add_constraint(out_at_least(net->evaluate(probe)(0)));
        q.add_constraint(input_at_least(1, pick(rng) - 1.0));

        const Verdict direct = solve(q);
        REQUIRE(direct.status == Status::Sat);

        AbstractionMask mask;
        mask.freed_positions = {1};
        const Query a = abstract_query(q, mask, std::vector<Box>(4, Box(-1.0, 1.0)));
        CHECK(validate_witness(a, *direct.witness));
    }
}

TEST_CASE("an inconclusive abstract solve does not retry silently") {
    const auto spec = load_transition_spec(fixture_path("spec_zero.json"));
    Query q = unroll(spec, 1, UnrollMode::FromAnywhere);
    q.add_constraint(out_at_least(0.5));

    SolverConfig starved;
    starved.max_nodes = 0;
    const AbstractionMask mask = mask_from_fields(spec, {{0, 0}});
    const AbstractVerdict a =
        solve_with_abstraction(q, mask, global_boxes(spec), starved);
    CHECK(a.verdict.status == Status::Unknown);
    CHECK(a.provenance == Provenance::AbstractionInconclusive);
}
