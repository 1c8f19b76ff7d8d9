#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlcheck/errors.hpp"
#include "drlcheck/formats.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

TEST_CASE("query fixture loads boxes and constraints") {
    auto net = share(make_fig1());
    const Query q = load_query(fixture_path("query_fig1_sat.json"), net);
    CHECK(q.copies() == 1);
    CHECK(q.box(0, 0).lower == 0.0);
    CHECK(q.box(0, 1).upper == 1.0);
    REQUIRE(q.constraints().size() == 1);
    const LinearConstraint& c = q.constraints()[0];
    CHECK(c.rel == Relation::Ge);
    CHECK(c.constant == 20.0);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].var.site == Site::Output);
    CHECK(q.couplings().empty());
}

TEST_CASE("strict relations shift the constant by delta") {
    auto net = share(make_fig1());
    const std::string text = R"({
        "copies": 1,
        "constraints": [
            {"terms": [[1, 0, "out", 0]], "rel": "<", "const": 5},
            {"terms": [[1, 0, "out", 0]], "rel": ">", "const": 5},
            {"terms": [[1, 0, "out", 0]], "rel": "==", "const": 5}
        ]
    })";
    const Query q = parse_query(text, net);
    REQUIRE(q.constraints().size() == 3);
    CHECK(q.constraints()[0].rel == Relation::Le);
    CHECK(q.constraints()[0].constant == 5.0 - kDeltaStrict);
    CHECK(q.constraints()[1].rel == Relation::Ge);
    CHECK(q.constraints()[1].constant == 5.0 + kDeltaStrict);
    CHECK(q.constraints()[2].rel == Relation::Eq);
    CHECK(q.constraints()[2].constant == 5.0);
}

TEST_CASE("null box entries mean unbounded") {
    auto net = share(make_fig1());
    const Query q =
        parse_query(R"({"copies": 1, "boxes": {"0:in:0": [null, 5]}})", net);
    CHECK(q.box(0, 0).lower == -std::numeric_limits<double>::infinity());
    CHECK(q.box(0, 0).upper == 5.0);
}

TEST_CASE("malformed queries raise ParseError naming the origin") {
    auto net = share(make_fig1());
    CHECK_THROWS_AS(parse_query("[]", net), ParseError);
    CHECK_THROWS_AS(parse_query("{\"copies\": 0}", net), ParseError);
    CHECK_THROWS_AS(
        parse_query(R"({"copies": 1, "boxes": {"0:out:0": [0, 1]}})", net),
        ParseError);
    CHECK_THROWS_AS(
        parse_query(R"({"copies": 1, "boxes": {"zero": [0, 1]}})", net),
        ParseError);
    CHECK_THROWS_AS(
        parse_query(
            R"({"copies": 1, "constraints": [{"terms": [[1, 0, "mid", 0]], "rel": "<=", "const": 0}]})",
            net),
        ParseError);
    // out-of-range reference surfaces as ParseError, not ModelError
    CHECK_THROWS_AS(
        parse_query(
            R"({"copies": 1, "constraints": [{"terms": [[1, 2, "in", 0]], "rel": "<=", "const": 0}]})",
            net),
        ParseError);
    try {
        parse_query("{}", net, "probe.json");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("probe.json") != std::string::npos);
    }
}

TEST_CASE("property files carry kind, name and a copy-local predicate") {
    const Property p = load_property(fixture_path("prop_depth3.json"));
    CHECK(p.kind == Property::Kind::Safety);
    CHECK(p.name == "sum-stays-low");
    CHECK(p.predicate.kind == PredicateKind::Bad);
    REQUIRE(p.predicate.constraints.size() == 1);
    const LinearConstraint& c = p.predicate.constraints[0];
    CHECK(c.rel == Relation::Ge);
    CHECK(c.constant == 1.8);
    CHECK(c.terms[0].var.copy == 0);

    const Property live = load_property(fixture_path("prop_aurora_live.json"));
    CHECK(live.kind == Property::Kind::Liveness);
    CHECK(live.predicate.kind == PredicateKind::Good);

    CHECK_THROWS_AS(parse_property(R"({"kind": "weird", "predicate":
        {"constraints": []}})"),
                    ParseError);
}

TEST_CASE("transition specs resolve the network path relative to the file") {
    const TransitionSpec spec =
        load_transition_spec(fixture_path("spec_aurora_mini.json"));
    CHECK(spec.window == 3);
    CHECK(spec.fields_per_step == 3);
    CHECK(spec.net->input_size() == 9);
    REQUIRE(spec.field_roles.size() == 3);
    CHECK(spec.field_roles[0] == "latency_gradient");
    CHECK(spec.field_boxes[1].lower == 1.0);
    CHECK(spec.initial_constraints.empty());

    const TransitionSpec depth3 =
        load_transition_spec(fixture_path("spec_depth3.json"));
    REQUIRE(depth3.initial_constraints.size() == 2);
    CHECK(depth3.initial_constraints[0].rel == Relation::Eq);
    CHECK(depth3.initial_constraints[1].terms[0].var.index == 1);
}

TEST_CASE("transition spec validation failures surface as ParseError") {
    // window * fields does not match the network input size
    const std::string bad = R"({
        "network": "net_fig1.json",
        "window": 3,
        "fields_per_step": 1,
        "field_boxes": [[0, 1]]
    })";
    CHECK_THROWS_AS(
        parse_transition_spec(bad, "bad.json", fixture_path("")),
        ParseError);
}

TEST_CASE("invariant configs parse both templates with defaults") {
    const InvariantConfig out =
        load_invariant_config(fixture_path("inv_output_ident.json"));
    CHECK(out.tmpl == InvariantConfig::Template::Output);
    CHECK(out.output.eta == 0.01);
    CHECK(out.output.big_m == 1.1);
    CHECK(out.output.output_index == 0);

    const InvariantConfig in =
        load_invariant_config(fixture_path("inv_input_sr.json"));
    CHECK(in.tmpl == InvariantConfig::Template::Input);
    CHECK(in.input.pkt == 8.0);
    CHECK(in.input.searched_role == "sending_ratio");
    CHECK(in.input.output_rel == Relation::Ge);
    CHECK(in.input.output_constant == 0.0);
    CHECK(in.input.precision == 1.0);

    CHECK_THROWS_AS(parse_invariant_config(R"({"template": "matrix"})"),
                    ParseError);
}
