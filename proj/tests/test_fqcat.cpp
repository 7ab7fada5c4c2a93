#include <random>

#include "doctest.h"
#include "spfh/fqcat.hpp"
#include "spfh/homalg.hpp"
#include "spfh/polyfun.hpp"

using namespace spfh;

namespace {

CatPtr category(int q, int N) { return std::make_shared<const TruncCat>(q, N); }

CatModule restricted(const char* text, const CatPtr& cat, FieldPtr k = nullptr) {
    if (!k) k = cat->fq();
    return restrict_functor(parse_expr(text), cat, k);
}

}  // namespace

TEST_SUITE("fqcat") {
    TEST_CASE("morphism codes round trip") {
        auto cat = category(3, 3);
        std::mt19937_64 rng(4);
        for (int t = 0; t < 200; ++t) {
            int a = int(rng() % 4), b = int(rng() % 4);
            Mat m = Mat::random(cat->fq(), b, a, rng);
            long long code = cat->encode(m);
            CHECK(code < cat->hom_count(a, b));
            CHECK(cat->decode(a, b, code) == m);
        }
    }

    TEST_CASE("factorization reproduces every small morphism") {
        for (auto [q, N] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{4, 2}}) {
            auto cat = category(q, N);
            for (int a = 0; a <= N; ++a)
                for (int b = 0; b <= N; ++b)
                    for (long long c = 0; c < cat->hom_count(a, b); ++c) {
                        Mat psi = cat->decode(a, b, c);
                        CHECK(cat->evaluate(cat->factor(psi), a) == psi);
                    }
        }
    }

    TEST_CASE("factorization on random larger morphisms") {
        auto cat = category(2, 4);
        std::mt19937_64 rng(11);
        for (int t = 0; t < 300; ++t) {
            int a = int(rng() % 5), b = int(rng() % 5);
            Mat psi = Mat::random(cat->fq(), b, a, rng);
            CHECK(cat->evaluate(cat->factor(psi), a) == psi);
        }
        auto cat4 = category(4, 3);
        for (int t = 0; t < 300; ++t) {
            int a = int(rng() % 4), b = int(rng() % 4);
            Mat psi = Mat::random(cat4->fq(), b, a, rng);
            CHECK(cat4->evaluate(cat4->factor(psi), a) == psi);
        }
    }

    TEST_CASE("composition through vector tables") {
        auto cat = category(3, 3);
        std::mt19937_64 rng(2);
        for (int t = 0; t < 100; ++t) {
            int j = int(rng() % 4), a = int(rng() % 4), b = int(rng() % 4);
            Mat phi = Mat::random(cat->fq(), b, a, rng), psi = Mat::random(cat->fq(), a, j, rng);
            CHECK(cat->compose(cat->vector_table(phi), j, a, b, cat->encode(psi)) == cat->encode(phi * psi));
        }
    }

    TEST_CASE("caps") {
        CHECK_THROWS_AS(TruncCat(5, 1), ResourceCapExceeded);
        CHECK_THROWS_AS(TruncCat(2, 5), ResourceCapExceeded);
        CHECK_THROWS_AS(TruncCat(3, 4), ResourceCapExceeded);
        CHECK_NOTHROW(TruncCat(2, 4));
    }

    TEST_CASE("standard projectives") {
        auto cat = category(2, 2);
        auto p = build_proj(cat, 1, cat->fq());
        CHECK(p.dims() == std::vector<int>{1, 2, 4});
        CHECK(p.check_functorial(50).empty());
        auto p2 = build_proj(cat, 2, cat->fq());
        CHECK(p2.total_dim() == 1 + 4 + 16);
        CHECK(cat_hom(p2, p2).size() == 16);
        auto cat3 = category(3, 2);
        auto p3 = build_proj(cat3, 1, cat3->fq());
        CHECK(p3.dims() == std::vector<int>{1, 3, 9});
        CHECK(cat_hom(p3, p3).size() == 3);
    }

    TEST_CASE("restricted functors have the expected values") {
        auto cat = category(2, 3);
        CHECK(restricted("id", cat).dims() == std::vector<int>{0, 1, 2, 3});
        auto c2 = category(2, 2);
        CHECK(restricted("sym(2)", c2).dims() == std::vector<int>{0, 1, 3});
        CHECK(restricted("ext(2)", cat).dims() == std::vector<int>{0, 0, 1, 3});
        for (const char* e : {"id", "sym(2)", "div(2)", "ext(2)", "id*id", "twist(id,1)"})
            CHECK_MESSAGE(restricted(e, cat).check_functorial(50, 3).empty(), e);
        auto c4 = category(4, 2);
        CHECK(restricted("sym(2)", c4).check_functorial(50, 5).empty());
        CHECK(restricted("id", c4, Field::of_order(16)).check_functorial(50, 5).empty());
    }

    TEST_CASE("Frobenius twist restricts to the identity over F_q") {
        auto cat = category(2, 3);
        auto a = restricted("twist(id,1)", cat), b = restricted("id", cat);
        for (int m = 0; m <= 3; ++m)
            for (int g = 0; g < int(cat->generators(m).size()); ++g) CHECK(a.gen_action(m, g) == b.gen_action(m, g));
        // Over F_4 only the square twist is the identity on F_4-points.
        auto c4 = category(4, 2);
        auto t1 = restricted("twist(id,1)", c4), t2 = restricted("twist(id,2)", c4), id = restricted("id", c4);
        CHECK(cat_hom(id, t1).empty());
        CHECK(cat_hom(id, t2).size() == 1);
    }

    TEST_CASE("Yoneda: Hom(P^j, M) = M(j)") {
        auto cat = category(2, 2);
        auto m = restricted("sym(2)", cat);
        for (int j = 0; j <= 2; ++j) CHECK(cat_hom(build_proj(cat, j, cat->fq()), m).size() == std::size_t(m.dim(j)));
    }

    TEST_CASE("natural transformations are natural") {
        auto cat = category(2, 3);
        auto a = restricted("id", cat), b = restricted("sym(2)", cat);
        auto maps = cat_hom(a, b);
        REQUIRE(maps.size() == 1);
        CHECK(check_natural(a, b, maps[0]).empty());
        // On polynomial functors there is no such map.
        CHECK(hom_space(eval(parse_expr("id"), 3, Field::get(2)), eval(parse_expr("sym(2)"), 3, Field::get(2))).empty());
    }

    TEST_CASE("restricted Schur modules agree with the restricted functors") {
        const FieldPtr f = Field::get(2);
        for (const char* text : {"id", "sym(2)", "div(3)", "ext(2)", "id*sym(2)", "twist(id,1)"}) {
            Expr e = parse_expr(text);
            auto cat = category(2, 3);
            auto direct = restrict_functor(e, cat, f);
            WeightedModule w = eval(e, 4, f);
            auto viaw = restrict_module(w, cat);
            CAPTURE(std::string(text));
            CHECK(viaw.dims() == direct.dims());
            CHECK(viaw.check_functorial(40, 9).empty());
            for (int m = 0; m <= 3; ++m) {
                auto pos = restriction_positions(e, w, m);
                REQUIRE(int(pos.size()) == direct.dim(m));
                // The coordinate change is the permutation pos; the actions must
                // agree on every generator.
                Mat perm(f, direct.dim(m), direct.dim(m));
                for (int x = 0; x < int(pos.size()); ++x) perm.set(pos[x], x, 1);
                for (int g = 0; g < int(cat->generators(m).size()); ++g) {
                    const int t = cat->generators(m)[g].target;
                    auto post = restriction_positions(e, w, t);
                    Mat permt(f, direct.dim(t), direct.dim(t));
                    for (int x = 0; x < int(post.size()); ++x) permt.set(post[x], x, 1);
                    CHECK(viaw.gen_action(m, g) * perm == permt * direct.gen_action(m, g));
                }
            }
        }
    }

    TEST_CASE("Kuhn dual and direct sums") {
        auto cat = category(2, 3);
        auto s = restricted("sym(2)", cat), d = restricted("div(2)", cat);
        auto sd = cat_kuhn_dual(s);
        CHECK(sd.check_functorial(40).empty());
        CHECK(cat_hom(sd, d).size() == cat_hom(d, d).size());
        auto sum = cat_direct_sum(s, d);
        CHECK(sum.check_functorial(40).empty());
        CHECK(cat_hom(sum, sum).size() == cat_hom(s, s).size() + cat_hom(s, d).size() + cat_hom(d, s).size() +
                                               cat_hom(d, d).size());
    }

    TEST_CASE("projectives have no higher Ext") {
        auto cat = category(2, 2);
        auto m = restricted("sym(2)", cat);
        for (int j = 0; j <= 2; ++j) {
            auto g = cat_ext(build_proj(cat, j, cat->fq()), m, 2);
            CHECK(g.dims == std::vector<long long>{m.dim(j), 0, 0});
        }
    }

    TEST_CASE("resolutions are certified") {
        auto cat = category(2, 3);
        auto res = cat_resolve(restricted("id", cat), 3);
        CHECK(res.certified());
        CHECK(res.steps[0].proj.objects == std::vector<int>{1});
    }

    TEST_CASE("degree 0 over the truncated category sees the Frobenius") {
        for (int N : {2, 3}) {
            auto cat = category(2, N);
            auto g = cat_ext(restricted("id", cat), restricted("sym(2)", cat), 1);
            CHECK(g.at(0) == 1);
        }
    }

    TEST_CASE("Ext of the identity over F_2") {
        auto cat = category(2, 3);
        auto id = restricted("id", cat);
        auto g = cat_ext(id, id, 3);
        CHECK(g.dims == std::vector<long long>{1, 0, 1, 0});
    }

    TEST_CASE("top degree by row space matches one more resolution step") {
        auto cat = category(2, 3);
        CatOptions full;
        full.top_by_rowspace = false;
        for (auto [a, b] : {std::pair{"id", "id"}, std::pair{"id", "sym(2)"}, std::pair{"sym(2)", "div(2)"},
                            std::pair{"ext(2)", "id*id"}})
            for (int L : {1, 2, 3}) {
                auto x = restricted(a, cat), y = restricted(b, cat);
                CAPTURE(std::string(a));
                CAPTURE(std::string(b));
                CHECK(cat_ext(x, y, L).dims == cat_ext(x, y, L, full).dims);
            }
        auto c3 = category(3, 2);
        auto x = restricted("id", c3), y = restricted("sym(3)", c3);
        CHECK(cat_ext(x, y, 2).dims == cat_ext(x, y, 2, full).dims);
    }

    TEST_CASE("Tor and Ext are dual") {
        auto cat = category(2, 3);
        for (auto [a, b] : {std::pair{"id", "id"}, std::pair{"id", "sym(2)"}, std::pair{"ext(2)", "id*id"}}) {
            auto x = restricted(a, cat), y = restricted(b, cat);
            CAPTURE(std::string(a));
            CHECK(cat_tor(x, y, 2).dims == cat_ext(y, x, 2).dims);
        }
    }

    TEST_CASE("Ext is additive") {
        auto cat = category(2, 3);
        auto a = restricted("id", cat), b = restricted("ext(2)", cat), n = restricted("sym(2)", cat);
        auto sum = cat_ext(cat_direct_sum(a, b), n, 2);
        auto ea = cat_ext(a, n, 2), eb = cat_ext(b, n, 2);
        for (int i = 0; i <= 2; ++i) CHECK(sum.at(i) == ea.at(i) + eb.at(i));
    }

    TEST_CASE("stabilization scan") {
        auto k = Field::get(2);
        auto rep = stabilization_scan(functor_recipe(parse_expr("id"), k), functor_recipe(parse_expr("id"), k), 2, 1,
                                      {1, 2, 3});
        REQUIRE(rep.tables.size() == 3);
        CHECK(rep.stable[0]);
        CHECK(rep.certificate(0).find("stable over N=1..3") == 0);
    }
}
