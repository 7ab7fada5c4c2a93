#include "doctest.h"
#include "spfh/compare.hpp"

using namespace spfh;

namespace {

CompareOptions degrees(int L) {
    CompareOptions o;
    o.max_degree = L;
    return o;
}

}  // namespace

TEST_SUITE("compare") {
    TEST_CASE("strong map below q is an isomorphism in degree 0") {
        auto rep = strong_phi(parse_expr("div(2)"), parse_expr("sym(2)"), 4, 2);
        REQUIRE(rep.rows.size() == 1);
        const auto& r = rep.rows[0];
        CHECK(r.source == 1);
        CHECK(r.target == 1);
        CHECK(r.rank == 1);
        CHECK(r.verdict == "iso");
        CHECK(r.predicted_iso);
        CHECK(r.stable());
        CHECK(rep.map == "strong");
    }

    TEST_CASE("the Frobenius class is missed by the strong map at q = 2") {
        auto rep = strong_phi(parse_expr("sym(1)"), parse_expr("sym(2)"), 2, 2);
        const auto& r = rep.rows[0];
        CHECK(r.source == 0);
        CHECK(r.target == 1);
        CHECK(r.verdict == "not surjective");
        CHECK_FALSE(r.predicted_iso);
        CHECK_FALSE(rep.contradiction());
    }

    TEST_CASE("zero on both sides") {
        auto rep = strong_phi(parse_expr("id"), parse_expr("ext(2)"), 4, 2);
        const auto& r = rep.rows[0];
        CHECK(r.source == 0);
        CHECK(r.target == 0);
        CHECK(r.verdict == "iso");
    }

    TEST_CASE("strong map in positive degrees") {
        auto rep = strong_phi(parse_expr("id"), parse_expr("id"), 2, 3, degrees(2));
        REQUIRE(rep.rows.size() == 3);
        CHECK(rep.twist_level == 1);
        for (const auto& r : rep.rows) {
            CAPTURE(r.degree);
            CHECK(r.source == (r.degree % 2 == 0 ? 1 : 0));
            CHECK(r.verdict == "iso");
        }
        CHECK(rep.rows[0].certificate.find("unchanged at 2") != std::string::npos);
    }

    TEST_CASE("chain lifts induce the same map") {
        CHECK(lift_independent(parse_expr("id"), parse_expr("id"), 2, 3, 2, 1, 2));
        CHECK(lift_independent(parse_expr("id"), parse_expr("sym(2)"), 2, 2, 1, 0, 7));
    }

    TEST_CASE("strong map is additive in G") {
        auto f = parse_expr("div(2)");
        auto a = strong_phi(f, parse_expr("sym(2)"), 4, 2), b = strong_phi(f, parse_expr("div(2)"), 4, 2);
        auto ab = strong_phi(f, parse_expr("sym(2)+div(2)"), 4, 2);
        CHECK(ab.rows[0].source == a.rows[0].source + b.rows[0].source);
        CHECK(ab.rows[0].target == a.rows[0].target + b.rows[0].target);
        CHECK(ab.rows[0].rank == a.rows[0].rank + b.rows[0].rank);
    }

    TEST_CASE("generalized map repairs the counterexample") {
        auto rep = gen_comp_map(parse_expr("sym(1)"), parse_expr("sym(2)"), 2, 2, 2);
        const auto& r = rep.rows[0];
        CHECK(r.source == 1);
        CHECK(r.target == 1);
        CHECK(r.rank == 1);
        CHECK(r.verdict == "iso");
        CHECK(r.predicted_iso);
        CHECK(rep.map == "generalized-second-form");
        CHECK(rep.components.find("matched component 2") != std::string::npos);
    }

    TEST_CASE("generalized map on the identity") {
        auto rep = gen_comp_map(parse_expr("id"), parse_expr("id"), 2, 2, 2);
        CHECK(rep.rows[0].source == 1);
        CHECK(rep.rows[0].verdict == "iso");
    }

    TEST_CASE("generalized map with no matching component") {
        auto rep = gen_comp_map(parse_expr("ext(2)"), parse_expr("id"), 2, 1, 2);
        CHECK(rep.components.find("no matching component") != std::string::npos);
        CHECK(rep.rows[0].source == 0);
    }

    TEST_CASE("verdict suite") {
        CHECK(verdict_suite({}).empty());
        auto reps = verdict_suite(default_verdict_config());
        REQUIRE(reps.size() == 3);
        for (const auto& r : reps) CHECK_FALSE(r.contradiction());
        CHECK(reps[0].rows[0].verdict == "iso");
        CHECK(reps[1].rows[0].verdict == "not surjective");
    }

    TEST_CASE("twist level must be a multiple of r") {
        CompareOptions o;
        o.twist_level = 1;
        CHECK_THROWS_AS(strong_phi(parse_expr("id"), parse_expr("id"), 4, 2, o), std::invalid_argument);
    }
}
