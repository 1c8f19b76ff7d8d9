#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlcheck/checker.hpp"
#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

namespace {

StatePredicate output_at_least(double c, PredicateKind kind) {
    StatePredicate p;
    p.kind = kind;
    LinearConstraint r;
    r.terms.push_back({1.0, {0, Site::Output, 0}});
    r.rel = Relation::Ge;
    r.constant = c;
    p.constraints = {r};
    return p;
}

}

TEST_CASE("bmc finds the shallowest violation depth and not less") {
    const auto spec = load_transition_spec(fixture_path("spec_depth3.json"));
    const auto prop = load_property(fixture_path("prop_depth3.json"));

    for (std::size_t k : {std::size_t(1), std::size_t(2)}) {
        const CheckResult r = bmc(spec, prop.predicate, k);
        CHECK(r.outcome == CheckOutcome::Exhausted);
        CHECK(r.conclusive);
        CHECK(r.note == "no violation within " + std::to_string(k) + " steps");
    }

    const CheckResult hit = bmc(spec, prop.predicate, 3);
    REQUIRE(hit.outcome == CheckOutcome::Refuted);
    REQUIRE(hit.trace.has_value());
    CHECK_FALSE(hit.trace->lasso);
    REQUIRE(hit.trace->steps.size() == 3);
    CHECK(validate_trace(spec, *hit.trace, 1e-6));
    CHECK(hit.trace->steps[0].window == std::vector<double>{0.0, 0.0});
    CHECK_FALSE(predicate_holds(prop.predicate, hit.trace->steps[0], 1e-6));
    CHECK(predicate_holds(prop.predicate, hit.trace->steps[2], 1e-6));
}

TEST_CASE("the portfolio refutes by bounded search") {
    const auto spec = load_transition_spec(fixture_path("spec_depth3.json"));
    const auto prop = load_property(fixture_path("prop_depth3.json"));
    const CheckResult r = portfolio(spec, prop, 8);
    CHECK(r.outcome == CheckOutcome::Refuted);
    CHECK(r.method == CheckMethod::Bmc);
    CHECK(r.k == 3);
    REQUIRE(r.trace.has_value());
    CHECK(validate_trace(spec, *r.trace, 1e-6));
}

TEST_CASE("an always-safe system is proved at k = 1") {
    const auto spec = load_transition_spec(fixture_path("spec_pointwise.json"));
    const auto prop = load_property(fixture_path("prop_pointwise_safety.json"));
    const CheckResult r = portfolio(spec, prop, 4);
    CHECK(r.outcome == CheckOutcome::Proved);
    CHECK(r.method == CheckMethod::KInduction);
    CHECK(r.k == 1);
    CHECK(r.conclusive);
}

TEST_CASE("an always-good system is live at k = 1") {
    const auto spec = load_transition_spec(fixture_path("spec_pointwise.json"));
    const auto prop = load_property(fixture_path("prop_pointwise_liveness.json"));
    const CheckResult r = portfolio(spec, prop, 4);
    CHECK(r.outcome == CheckOutcome::Proved);
    CHECK(r.method == CheckMethod::KInduction);
    CHECK(r.k == 1);
}

TEST_CASE("liveness induction needs the run length that kills all stalls") {
    const auto spec = load_transition_spec(fixture_path("spec_aurora_mini.json"));
    const auto prop = load_property(fixture_path("prop_aurora_live.json"));

    const CheckResult k1 = k_induction_liveness(spec, prop.predicate, 1);
    CHECK(k1.outcome == CheckOutcome::Exhausted);
    CHECK(k1.note == "a run of 1 consecutive non-good states exists");

    const CheckResult k2 = k_induction_liveness(spec, prop.predicate, 2);
    CHECK(k2.outcome == CheckOutcome::Proved);

    const CheckResult port = portfolio(spec, prop, 6);
    CHECK(port.outcome == CheckOutcome::Proved);
    CHECK(port.method == CheckMethod::KInduction);
    CHECK(port.k == 2);
}

TEST_CASE("a five-step stall needs k = 5") {
    const auto spec = load_transition_spec(fixture_path("spec_stall5.json"));
    const auto prop = load_property(fixture_path("prop_stall5_live.json"));
    const CheckResult r = portfolio(spec, prop, 6);
    CHECK(r.outcome == CheckOutcome::Proved);
    CHECK(r.k == 5);
}

TEST_CASE("a deep violation past k_max exhausts honestly") {
    const auto spec = load_transition_spec(fixture_path("spec_exhausted.json"));
    const auto prop = load_property(fixture_path("prop_exhausted.json"));
    const CheckResult r = portfolio(spec, prop, 4);
    CHECK(r.outcome == CheckOutcome::Exhausted);
    CHECK(r.method == CheckMethod::Portfolio);
    CHECK(r.k == 4);
    CHECK(r.conclusive);
    CHECK(r.note == "no proof or refutation up to k_max = 4");
}

TEST_CASE("liveness bmc returns a closed lasso avoiding good states") {
    const auto spec = load_transition_spec(fixture_path("spec_pointwise.json"));
    const StatePredicate good = output_at_least(100.0, PredicateKind::Good);
    const CheckResult r = liveness_bmc(spec, good, 2);
    REQUIRE(r.outcome == CheckOutcome::Refuted);
    REQUIRE(r.trace.has_value());
    CHECK(r.trace->lasso);
    REQUIRE(r.trace->steps.size() == 2);
    CHECK(validate_trace(spec, *r.trace, 1e-6));
    for (const auto& step : r.trace->steps)
        CHECK_FALSE(predicate_holds(good, step, 1e-6));
}

TEST_CASE("a zero node budget is reported as inconclusive") {
    const auto spec = load_transition_spec(fixture_path("spec_depth3.json"));
    const auto prop = load_property(fixture_path("prop_depth3.json"));
    CheckerConfig cfg;
    cfg.solver.max_nodes = 0;

    const CheckResult ind = k_induction_safety(spec, prop.predicate, 1, cfg);
    CHECK(ind.outcome == CheckOutcome::Exhausted);
    CHECK_FALSE(ind.conclusive);
    CHECK(ind.note.rfind("consecution step inconclusive:", 0) == 0);

    const CheckResult ref = bmc(spec, prop.predicate, 3, cfg);
    CHECK(ref.outcome == CheckOutcome::Exhausted);
    CHECK_FALSE(ref.conclusive);
    CHECK(ref.note.rfind("refutation attempt inconclusive:", 0) == 0);

    const CheckResult port = portfolio(spec, prop, 2, cfg);
    CHECK(port.outcome == CheckOutcome::Exhausted);
    CHECK_FALSE(port.conclusive);
}

TEST_CASE("a tiny timeout stops the portfolio before any work") {
    const auto spec = load_transition_spec(fixture_path("spec_stall5.json"));
    const auto prop = load_property(fixture_path("prop_stall5_live.json"));
    CheckerConfig cfg;
    cfg.timeout_seconds = 1e-9;
    const CheckResult r = portfolio(spec, prop, 6, cfg);
    CHECK(r.outcome == CheckOutcome::Exhausted);
    CHECK_FALSE(r.conclusive);
    CHECK(r.note == "timeout reached at k = 1");
}

TEST_CASE("worker threads do not change the verdict") {
    const auto spec = load_transition_spec(fixture_path("spec_aurora_mini.json"));
    const auto prop = load_property(fixture_path("prop_aurora_live.json"));
    CheckerConfig threaded;
    threaded.threads = 2;
    const CheckResult a = portfolio(spec, prop, 6);
    const CheckResult b = portfolio(spec, prop, 6, threaded);
    CHECK(a.outcome == b.outcome);
    CHECK(a.k == b.k);
    CHECK(a.method == b.method);
}

TEST_CASE("trace replay rejects tampered traces") {
    const auto spec = load_transition_spec(fixture_path("spec_depth3.json"));
    const auto prop = load_property(fixture_path("prop_depth3.json"));
    const CheckResult r = bmc(spec, prop.predicate, 3);
    REQUIRE(r.trace.has_value());

    Trace broken_shift = *r.trace;
    broken_shift.steps[1].window[0] += 0.5;
    CHECK_FALSE(validate_trace(spec, broken_shift, 1e-6));

    Trace wrong_output = *r.trace;
    wrong_output.steps[0].outputs[0] += 0.1;
    CHECK_FALSE(validate_trace(spec, wrong_output, 1e-6));

    Trace outside_box = *r.trace;
    outside_box.steps[2].window[1] = 3.0;
    CHECK_FALSE(validate_trace(spec, outside_box, 1e-6));

    const auto pointwise = load_transition_spec(fixture_path("spec_pointwise.json"));
    const StatePredicate good = output_at_least(100.0, PredicateKind::Good);
    const CheckResult lasso = liveness_bmc(pointwise, good, 2);
    REQUIRE(lasso.trace.has_value());
    Trace broken_loop = *lasso.trace;
    // push the loop-closing fresh value away from the first step's window
    broken_loop.steps[1].window[1] =
        broken_loop.steps[0].window[0] > 0.0 ? -0.1 : 0.1;
    CHECK_FALSE(validate_trace(pointwise, broken_loop, 1e-6));
}
