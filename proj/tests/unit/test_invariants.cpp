#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "drlcheck/invariants.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

namespace {

Network scalar_net(double weight, double bias) {
    Eigen::MatrixXd w(1, 1);
    w << weight;
    Eigen::VectorXd b(1);
    b << bias;
    return Network(1, {Layer::weighted_sum(w, b)});
}

}

TEST_CASE("output floor search reproduces the bisection exactly") {
    const auto spec = load_transition_spec(fixture_path("spec_ident1.json"));
    const auto cfg = load_invariant_config(fixture_path("inv_output_ident.json"));
    REQUIRE(cfg.tmpl == InvariantConfig::Template::Output);
    const InvariantResult r = find_output_invariant(spec, cfg.output);

    REQUIRE(r.found);
    CHECK_FALSE(r.degenerate);

    // Replay the bisection over the identity net on [-0.1, 0.1], where
    // out <= b is satisfiable exactly when b >= -0.1. Expected bounds come
    // out bitwise equal because both sides do the same double arithmetic.
    double lo = -1.1;
    double hi = 0.0;
    std::vector<std::pair<double, Status>> searches;
    while (std::abs(hi - lo) >= 0.01) {
        const double mid = 0.5 * (lo + hi);
        const bool sat = mid >= -0.1;
        searches.emplace_back(mid, sat ? Status::Sat : Status::Unsat);
        (sat ? hi : lo) = mid;
    }
    REQUIRE(searches.size() == 7);

    CHECK(r.proved_bound == lo);
    CHECK(r.has_bracket);
    CHECK(r.bracketing_sat == hi);
    CHECK(r.iterations == 7);
    CHECK(r.precision_achieved == std::abs(hi - lo));
    CHECK(r.precision_achieved < 0.01);

    REQUIRE(r.query_log.size() == 9);
    CHECK(r.query_log[0].phase == "init");
    CHECK(r.query_log[0].bound == 0.0);
    CHECK(r.query_log[0].verdict == Status::Sat);
    CHECK(r.query_log[1].phase == "floor");
    CHECK(r.query_log[1].bound == -1.1);
    CHECK(r.query_log[1].verdict == Status::Unsat);
    for (std::size_t i = 0; i < searches.size(); ++i) {
        CHECK(r.query_log[2 + i].phase == "search");
        CHECK(r.query_log[2 + i].bound == searches[i].first);
        CHECK(r.query_log[2 + i].verdict == searches[i].second);
    }
}

TEST_CASE("an omitted floor magnitude falls back to the analytic bound") {
    const auto spec = load_transition_spec(fixture_path("spec_ident1.json"));
    auto cfg = load_invariant_config(fixture_path("inv_output_ident.json"));
    const InvariantResult pinned = find_output_invariant(spec, cfg.output);

    // The identity output range is [-0.1, 0.1], so the derived floor is
    // 1 + 0.1, the same magnitude the fixture pins.
    cfg.output.big_m = 0.0;
    const InvariantResult derived = find_output_invariant(spec, cfg.output);
    CHECK(derived.proved_bound == pinned.proved_bound);
    CHECK(derived.bracketing_sat == pinned.bracketing_sat);
    CHECK(derived.iterations == pinned.iterations);
    CHECK(derived.query_log.size() == pinned.query_log.size());
}

TEST_CASE("a nonpositive output range is degenerate") {
    const TransitionSpec spec =
        make_spec(share(scalar_net(0.0, 1.0)), 1, 1, Box(-1.0, 1.0));
    OutputBoundSearch cfg;
    const InvariantResult r = find_output_invariant(spec, cfg);
    CHECK(r.found);
    CHECK(r.degenerate);
    CHECK(r.proved_bound == 0.0);
    CHECK(r.iterations == 0);
    CHECK(r.note ==
          "output <= 0 is already unsatisfiable; the property holds with no search");
    REQUIRE(r.query_log.size() == 1);
    CHECK(r.query_log[0].phase == "init");
}

TEST_CASE("a floor the output dips below is rejected") {
    const TransitionSpec spec =
        make_spec(share(scalar_net(1.0, -10.0)), 1, 1, Box(0.0, 1.0));
    OutputBoundSearch cfg;
    cfg.big_m = 5.0;
    CHECK_THROWS_WITH_AS(find_output_invariant(spec, cfg),
                         "search floor too high, increase M", SolverError);
}

TEST_CASE("input bound search tightens until the brackets meet") {
    const auto spec = load_transition_spec(fixture_path("spec_sr.json"));
    const auto cfg = load_invariant_config(fixture_path("inv_input_sr.json"));
    REQUIRE(cfg.tmpl == InvariantConfig::Template::Input);
    const InvariantResult r = find_input_invariant(spec, cfg.input);

    // out = 2 - x stays >= 0 only up to x = 2; probing [r, 8] is
    // satisfiable exactly when r <= 2.
    REQUIRE(r.found);
    CHECK(r.proved_bound == 2.75);
    CHECK(r.has_bracket);
    CHECK(r.bracketing_sat == 1.875);
    CHECK(r.iterations == 3);
    CHECK(r.precision_achieved == 0.875);

    REQUIRE(r.query_log.size() == 4);
    CHECK(r.query_log[0].phase == "init");
    CHECK(r.query_log[0].bound == 1.0);
    CHECK(r.query_log[0].verdict == Status::Sat);
    CHECK(r.query_log[1].bound == 4.5);
    CHECK(r.query_log[1].verdict == Status::Unsat);
    CHECK(r.query_log[2].bound == 2.75);
    CHECK(r.query_log[2].verdict == Status::Unsat);
    CHECK(r.query_log[3].bound == 1.875);
    CHECK(r.query_log[3].verdict == Status::Sat);
}

TEST_CASE("a search that never leaves the top confirms or gives up") {
    const auto spec = load_transition_spec(fixture_path("spec_sr.json"));
    auto cfg = load_invariant_config(fixture_path("inv_input_sr.json"));

    // out >= -100 holds everywhere, so every restriction stays satisfiable.
    cfg.input.output_constant = -100.0;
    const InvariantResult r = find_input_invariant(spec, cfg.input);
    CHECK_FALSE(r.found);
    CHECK(r.proved_bound == 8.0);
    CHECK(r.has_bracket);
    CHECK(r.bracketing_sat == 8.0);
    CHECK(r.note == "no invariant at this PKT (pick a larger PKT)");
    REQUIRE_FALSE(r.query_log.empty());
    CHECK(r.query_log.back().phase == "confirm");
    CHECK(r.query_log.back().verdict == Status::Sat);
}

TEST_CASE("an everywhere-unsatisfiable restriction collapses to the bottom") {
    const auto spec = load_transition_spec(fixture_path("spec_sr.json"));
    auto cfg = load_invariant_config(fixture_path("inv_input_sr.json"));

    // out >= 5 needs x <= -3, impossible above the searched range's floor.
    cfg.input.output_constant = 5.0;
    const InvariantResult r = find_input_invariant(spec, cfg.input);
    CHECK(r.found);
    CHECK(r.proved_bound == 1.875);
    CHECK_FALSE(r.has_bracket);
    CHECK(r.iterations == 3);
    CHECK(r.note ==
          "unsatisfiable even at the weakest restriction; the bound collapsed "
          "toward the lower end of the range");
}

TEST_CASE("search parameters are validated up front") {
    const auto spec = load_transition_spec(fixture_path("spec_sr.json"));
    auto cfg = load_invariant_config(fixture_path("inv_input_sr.json"));

    auto bad_pkt = cfg.input;
    bad_pkt.pkt = 1.5;
    CHECK_THROWS_AS(find_input_invariant(spec, bad_pkt), ModelError);

    auto bad_precision = cfg.input;
    bad_precision.precision = 0.0;
    CHECK_THROWS_AS(find_input_invariant(spec, bad_precision), ModelError);

    auto bad_role = cfg.input;
    bad_role.searched_role = "latency";
    CHECK_THROWS_AS(find_input_invariant(spec, bad_role), ModelError);

    auto bad_index = cfg.input;
    bad_index.output_index = 3;
    CHECK_THROWS_AS(find_input_invariant(spec, bad_index), ModelError);

    OutputBoundSearch bad_eta;
    bad_eta.eta = 0.0;
    const auto ident = load_transition_spec(fixture_path("spec_ident1.json"));
    CHECK_THROWS_AS(find_output_invariant(ident, bad_eta), ModelError);
}

TEST_CASE("an exhausted solver aborts the search loudly") {
    const auto spec = load_transition_spec(fixture_path("spec_ident1.json"));
    const auto cfg = load_invariant_config(fixture_path("inv_output_ident.json"));
    SolverConfig starved;
    starved.max_nodes = 0;
    try {
        find_output_invariant(spec, cfg.output, starved);
        FAIL("expected a solver give-up");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).rfind("invariant search gave up at bound", 0) == 0);
    }
}

TEST_CASE("proved bounds export as state predicates") {
    const auto ident_spec = load_transition_spec(fixture_path("spec_ident1.json"));
    const auto out_cfg = load_invariant_config(fixture_path("inv_output_ident.json"));
    const InvariantResult out_res = find_output_invariant(ident_spec, out_cfg.output);
    const StatePredicate good = invariant_predicate(out_res, out_cfg.output);
    CHECK(good.kind == PredicateKind::Good);
    REQUIRE(good.constraints.size() == 1);
    CHECK(good.constraints[0].rel == Relation::Ge);
    CHECK(good.constraints[0].constant == out_res.proved_bound);
    CHECK(good.constraints[0].terms[0].var.site == Site::Output);

    const auto sr_spec = load_transition_spec(fixture_path("spec_sr.json"));
    const auto in_cfg = load_invariant_config(fixture_path("inv_input_sr.json"));
    const InvariantResult in_res = find_input_invariant(sr_spec, in_cfg.input);
    const StatePredicate bad = invariant_predicate(in_res, in_cfg.input, sr_spec);
    CHECK(bad.kind == PredicateKind::Bad);
    REQUIRE(bad.constraints.size() == 2);
    CHECK(bad.constraints[0].terms[0].var.site == Site::Input);
    CHECK(bad.constraints[0].constant == in_res.proved_bound);
    CHECK(bad.constraints[1].terms[0].var.site == Site::Output);

    InvariantResult unfound;
    CHECK_THROWS_AS(invariant_predicate(unfound, out_cfg.output), ModelError);
}
