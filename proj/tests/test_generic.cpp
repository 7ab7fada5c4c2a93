#include "doctest.h"
#include "spfh/generic.hpp"

using namespace spfh;

namespace {

std::vector<long long> dims(std::initializer_list<long long> x) { return x; }

}  // namespace

TEST_SUITE("generic") {

TEST_CASE("stable twist level") {
    CHECK(stable_twist_level(2, 0) == 0);
    CHECK(stable_twist_level(2, 1) == 0);
    CHECK(stable_twist_level(2, 2) == 1);
    CHECK(stable_twist_level(2, 3) == 1);
    CHECK(stable_twist_level(2, 4) == 2);
    CHECK(stable_twist_level(3, 5) == 1);
    CHECK(stable_twist_level(3, 6) == 2);
}

TEST_CASE("component matching") {
    auto m = match_components(parse_expr("id"), parse_expr("sym(2)"), 2, true);
    REQUIRE(m.size() == 1);
    CHECK(m[0].f_twist == 1);
    CHECK(m[0].g_twist == 0);
    CHECK(match_components(parse_expr("id"), parse_expr("sym(2)"), 2, false).empty());
    CHECK(match_components(parse_expr("id"), parse_expr("sym(3)"), 2, true).empty());
    CHECK(match_components(parse_expr("sym(2)+id"), parse_expr("div(2)"), 2, false).size() == 1);
}

TEST_CASE("twist map on the identity is an isomorphism in the stable range") {
    auto F = Field::get(2);
    auto rep = twist_map(parse_expr("id"), parse_expr("id"), 1, 3, F);
    CHECK(rep.n == 4);
    for (const auto& d : rep.degrees) {
        CAPTURE(d.degree);
        CHECK(d.injective());
        CHECK(d.iso());
    }
    CHECK(rep.degrees[0].rank == 1);
    CHECK(rep.degrees[2].rank == 1);
}

TEST_CASE("twist map below the stable range is injective but not onto") {
    auto F = Field::get(2);
    auto rep = twist_map(parse_expr("id"), parse_expr("id"), 0, 2, F);
    CHECK(rep.degrees[0].source == 1);
    CHECK(rep.degrees[0].iso());
    CHECK(rep.degrees[1].iso());
    CHECK(rep.degrees[2].source == 0);
    CHECK(rep.degrees[2].target == 1);
    CHECK(rep.degrees[2].injective());
    CHECK(!rep.degrees[2].iso());

    auto F3 = Field::get(3);
    auto rep3 = twist_map(parse_expr("id"), parse_expr("id"), 0, 2, F3);
    CHECK(rep3.degrees[0].iso());
    CHECK(rep3.degrees[1].iso());
    CHECK(rep3.degrees[2].target == 1);
    CHECK(rep3.degrees[2].rank == 0);
}

TEST_CASE("twist maps are injective") {
    auto F = Field::get(2);
    for (const char* f : {"sym(2)", "div(2)", "ext(2)", "id*id"})
        for (const char* g : {"sym(2)", "div(2)", "ext(2)"}) {
            CAPTURE(f);
            CAPTURE(g);
            auto rep = twist_map(parse_expr(f), parse_expr(g), 0, 3, F);
            for (const auto& d : rep.degrees) {
                CAPTURE(d.degree);
                CHECK(d.injective());
                if (d.degree < 2) CHECK(d.iso());
            }
        }
}

TEST_CASE("twist map between mismatched degrees is zero") {
    auto F = Field::get(2);
    auto rep = twist_map(parse_expr("id"), parse_expr("sym(3)"), 1, 2, F);
    for (const auto& d : rep.degrees) {
        CHECK(d.source == 0);
        CHECK(d.target == 0);
        CHECK(d.iso());
    }
}

TEST_CASE("generic ext") {
    auto F = Field::get(2);
    auto a = generic_ext(parse_expr("div(1)"), parse_expr("sym(1)"), 0, F);
    CHECK(a.dims.dims == dims({1}));
    CHECK(a.cert.status == "verified");

    auto b = generic_ext(parse_expr("id"), parse_expr("id"), 3, F);
    CHECK(b.dims.dims == dims({1, 0, 1, 0}));
    CHECK(b.cert.r == 1);
    CHECK(b.cert.bound == 4);
    CHECK(b.cert.status == "verified");

    auto c = generic_ext(parse_expr("id"), parse_expr("sym(2)"), 3, F);
    CHECK(c.dims.dims == dims({1, 0, 0, 0}));
    CHECK(c.cert.status != "contradiction");

    auto z = generic_ext(parse_expr("id"), parse_expr("sym(3)"), 3, F);
    CHECK(z.dims.dims == dims({0, 0, 0, 0}));
    CHECK(z.pairs.empty());
}

TEST_CASE("generic ext does not depend on the admissible twist level") {
    auto F = Field::get(2);
    Expr id = parse_expr("id");
    CHECK(ext_at_level(id, 1, id, 1, 3, F, 0) == ext_at_level(id, 2, id, 2, 3, F, 0));
    // Degrees 0..1 are stable from r = 0 on.
    for (const char* f : {"sym(2)", "div(2)", "ext(2)"}) {
        CAPTURE(f);
        Expr a = parse_expr(f), s = parse_expr("sym(2)");
        CHECK(ext_at_level(a, 0, s, 0, 1, F, 0) == ext_at_level(a, 1, s, 1, 1, F, 0));
    }
}

TEST_CASE("generic tor is dual to generic ext") {
    auto F = Field::get(2);
    auto t = generic_tor(parse_expr("cdual(id)"), parse_expr("id"), 2, F);
    CHECK(t.dims.dims == dims({1, 0, 1}));
    CHECK(t.cert.status == "verified");
    for (const char* e0 : {"sym(2)", "div(2)"})
        for (const char* g : {"sym(2)", "ext(2)"}) {
            CAPTURE(e0);
            CAPTURE(g);
            auto tor = generic_tor(Expr::contra(parse_expr(e0)), parse_expr(g), 1, F);
            auto ext = generic_ext(parse_expr(g), parse_expr(e0), 1, F);
            CHECK(tor.dims == ext.dims);
        }
    auto zero = generic_tor(parse_expr("cdual(id)"), parse_expr("sym(3)"), 2, F);
    CHECK(zero.dims.dims == dims({0, 0, 0}));
    CHECK_THROWS_AS(generic_tor(parse_expr("id"), parse_expr("id"), 1, F), std::invalid_argument);
}

}  // TEST_SUITE
