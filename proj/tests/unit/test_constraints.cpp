#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "drlcheck/constraints.hpp"
#include "drlcheck/errors.hpp"
#include "helpers.hpp"

using namespace drlcheck;
using namespace drlcheck::testing;

TEST_CASE("boxes reject inverted bounds and honor tolerance") {
    CHECK_THROWS_AS(Box(1.0, 0.0), ModelError);
    const Box b(0.0, 1.0);
    CHECK(b.finite());
    CHECK(b.contains(0.0));
    CHECK(b.contains(1.0));
    CHECK_FALSE(b.contains(1.0000001));
    CHECK(b.contains(1.0000001, 1e-6));
    CHECK(b.contains(-0.0000005, 1e-6));
    CHECK_FALSE(Box().finite());
}

TEST_CASE("variable references format as copy:site:index") {
    CHECK(to_string(VarRef{1, Site::Input, 3}) == "1:in:3");
    CHECK(to_string(VarRef{0, Site::Output, 0}) == "0:out:0");
}

TEST_CASE("relation_holds respects the slack") {
    CHECK(relation_holds(1.0, Relation::Le, 1.0, 0.0));
    CHECK_FALSE(relation_holds(1.01, Relation::Le, 1.0, 0.0));
    CHECK(relation_holds(1.01, Relation::Le, 1.0, 0.02));
    CHECK(relation_holds(1.0, Relation::Ge, 1.0, 0.0));
    CHECK_FALSE(relation_holds(0.99, Relation::Ge, 1.0, 0.0));
    CHECK(relation_holds(0.99, Relation::Ge, 1.0, 0.02));
    CHECK(relation_holds(1.0, Relation::Eq, 1.0, 0.0));
    CHECK_FALSE(relation_holds(1.01, Relation::Eq, 1.0, 0.005));
    CHECK(relation_holds(1.004, Relation::Eq, 1.0, 0.005));
}

TEST_CASE("constraint_lhs sums coefficient times value") {
    LinearConstraint c;
    c.terms.push_back({2.0, {0, Site::Input, 0}});
    c.terms.push_back({-3.0, {1, Site::Output, 1}});
    const double lhs = constraint_lhs(c, [](const VarRef& v) {
        return v.site == Site::Input ? 1.5 : 2.0;
    });
    CHECK(lhs == 2.0 * 1.5 - 3.0 * 2.0);
}

TEST_CASE("queries validate variable references") {
    Query q(share(make_fig1()), 2);
    CHECK(q.copies() == 2);

    q.set_box(1, 0, Box(0.0, 0.5));
    CHECK(q.box(1, 0).upper == 0.5);
    CHECK_THROWS_AS(q.set_box(2, 0, Box(0.0, 1.0)), ModelError);

    CHECK_THROWS_AS(q.check_ref(VarRef{2, Site::Input, 0}), ModelError);
    CHECK_THROWS_AS(q.check_ref(VarRef{0, Site::Input, 2}), ModelError);
    CHECK_THROWS_AS(q.check_ref(VarRef{0, Site::Output, 1}), ModelError);
    CHECK_NOTHROW(q.check_ref(VarRef{1, Site::Output, 0}));

    LinearConstraint bad;
    bad.terms.push_back({1.0, {3, Site::Input, 0}});
    CHECK_THROWS_AS(q.add_constraint(bad), ModelError);
    LinearConstraint empty;
    CHECK_THROWS_AS(q.add_constraint(empty), ModelError);
}

TEST_CASE("conjoin leaves the original query untouched") {
    Query q(share(make_fig1()), 1);
    const Query with = conjoin(q, output_at_most(0, 5.0));
    CHECK(q.constraints().empty());
    REQUIRE(with.constraints().size() == 1);
    const LinearConstraint& c = with.constraints()[0];
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].coef == 1.0);
    CHECK(c.terms[0].var.site == Site::Output);
    CHECK(c.rel == Relation::Le);
    CHECK(c.constant == 5.0);
}
