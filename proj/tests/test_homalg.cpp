#include <map>

#include "doctest.h"
#include "spfh/orbit_schur.hpp"
#include "spfh/homalg.hpp"
#include "spfh/natmap.hpp"

using namespace spfh;
namespace ot = spfh::orbit;

namespace {

std::shared_ptr<const WeightedModule> ev(const std::string& s, int n, const FieldPtr& f) {
    return eval_cached(parse_expr(s), n, f);
}

std::vector<long long> dims_of(const GradedDims& g) { return g.dims; }

// Matching functor names on both sides.
struct NamedFunctor {
    std::string oracle, expr;
};

std::vector<NamedFunctor> functors_of_degree(int d, int p) {
    std::vector<NamedFunctor> out = {{"sym", "sym(" + std::to_string(d) + ")"},
                                     {"div", "div(" + std::to_string(d) + ")"},
                                     {"ext", "ext(" + std::to_string(d) + ")"},
                                     {"ten", "ten(" + std::to_string(d) + ")"}};
    if (d == p) out.push_back({"frob", "twist(id,1)"});
    return out;
}

}  // namespace

TEST_SUITE("homalg") {

TEST_CASE("orbit oracle sanity") {
    auto F = Field::get(2);
    auto a = ot::orbit_schur_algebra(F, 2, 2);
    CHECK(a.dim() == 10);
    auto reg = a.regular();
    CHECK(ot::hom_dim(reg, a.functor_module("sym")) == 3);
    CHECK(a.functor_module("ext").dim == 1);
    CHECK(a.functor_module("frob").dim == 2);
    auto sym_t = ot::kuhn_transpose(a, a.functor_module("sym"));
    CHECK(ot::hom_dim(sym_t, a.functor_module("div")) == 1);
    CHECK(ot::ext_dims(a, reg, a.functor_module("ten"), 2) == std::vector<long long>{4, 0, 0});
}

TEST_CASE("standard projectives are cyclic on their generator") {
    for (int p : {2, 3}) {
        auto F = Field::get(p);
        for (int n = 1; n <= 3; ++n)
            for (int d = 0; d <= 3; ++d)
                for (const auto& lam : compositions(d, n)) {
                    CAPTURE(weight_str(lam));
                    auto r = gamma_recipe(lam, F);
                    CHECK(int(r->words.size()) == r->module->dim());
                    CHECK(r->module->weight(r->gen_block) == lam);
                }
    }
}

TEST_CASE("cover of Sym(2) over GF(2)") {
    auto F = Field::get(2);
    auto m = ev("sym(2)", 2, F);
    auto gens = choose_generators(*m, CoverPolicy::DominantFirst);
    REQUIRE(gens.size() == 2);
    CHECK(m->weight(gens[0].first) == Weight{2, 0});
    CHECK(m->weight(gens[1].first) == Weight{1, 1});
    auto res = resolve(m, 2);
    CHECK(res.steps[0].proj.dim() == 7);
    CHECK(res.steps[0].rank == 3);
    CHECK(res.steps[1].expected_rank == 4);
    CHECK(res.certified());
}

TEST_CASE("divided powers are their own cover") {
    for (int p : {2, 3})
        for (int d = 1; d <= 4; ++d) {
            auto F = Field::get(p);
            auto res = resolve(ev("div(" + std::to_string(d) + ")", 2, F), 1);
            CHECK(res.steps[0].proj.summands.size() == 1);
            CHECK(res.steps[1].proj.summands.empty());
            CHECK(res.certified());
        }
}

TEST_CASE("Ext of the Frobenius twist against itself") {
    auto F = Field::get(2);
    auto i1 = ev("twist(id,1)", 2, F);
    CHECK(dims_of(ext(*i1, *i1, 2)) == std::vector<long long>{1, 0, 1});
    auto F3 = Field::get(3);
    auto j1 = ev("twist(id,1)", 3, F3);
    CHECK(dims_of(ext(*j1, *j1, 4)) == std::vector<long long>{1, 0, 1, 0, 1});
}

TEST_CASE("Ext agrees with the orbit-sum Schur algebra oracle") {
    struct Case {
        int p, n, d, L;
    };
    for (auto c : {Case{2, 2, 2, 3}, Case{3, 2, 3, 3}, Case{2, 3, 2, 2}, Case{2, 2, 3, 2}}) {
        auto F = Field::get(c.p);
        auto alg = ot::orbit_schur_algebra(F, c.n, c.d);
        auto fs = functors_of_degree(c.d, c.p);
        for (const auto& a : fs)
            for (const auto& b : fs) {
                CAPTURE(c.p);
                CAPTURE(c.n);
                CAPTURE(a.expr);
                CAPTURE(b.expr);
                auto ma = ev(a.expr, c.n, F), mb = ev(b.expr, c.n, F);
                auto oa = alg.functor_module(a.oracle), ob = alg.functor_module(b.oracle);
                CHECK(dims_of(ext(*ma, *mb, c.L)) == ot::ext_dims(alg, oa, ob, c.L));
                CHECK((long long)hom_space(*ma, *mb).size() == ot::hom_dim(oa, ob));
            }
    }
}

TEST_CASE("resolution differentials compose to zero and are equivariant") {
    for (const char* s : {"sym(3)", "ext(2)*id", "twist(id,1)@sym(2)", "ten(3)"}) {
        CAPTURE(s);
        auto F = Field::get(2);
        auto res = resolve(ev(s, 2, F), 4);
        CHECK(res.certified());
        res.materialize(3);
        for (int i = 0; i <= 3; ++i) {
            CHECK(res.steps[i].diff->check_equivariant() == "");
            if (i > 0) CHECK(res.steps[i - 1].diff->compose_after(*res.steps[i].diff).is_zero());
        }
    }
}

TEST_CASE("degree zero Ext is the Hom space") {
    auto F = Field::get(3);
    for (const char* a : {"sym(3)", "div(3)", "ten(3)", "twist(id,1)", "sym(2)*id"})
        for (const char* b : {"sym(3)", "div(3)", "ext(3)", "twist(id,1)"}) {
            CAPTURE(a);
            CAPTURE(b);
            auto ma = ev(a, 2, F), mb = ev(b, 2, F);
            auto maps = hom_space(*ma, *mb);
            CHECK(ext(*ma, *mb, 0).at(0) == (long long)maps.size());
            for (const auto& phi : maps) CHECK(phi.check_equivariant() == "");
        }
}

TEST_CASE("Ext does not depend on the cover policy") {
    auto F = Field::get(2);
    for (const char* a : {"sym(4)", "twist(sym(2),1)", "ext(2)*sym(2)"}) {
        CAPTURE(a);
        auto m = ev(a, 3, F), n = ev("twist(id,2)", 3, F);
        ResolveOptions rev;
        rev.policy = CoverPolicy::Reverse;
        CHECK(ext(*m, *n, 3) == ext(*m, *n, 3, rev));
    }
}

TEST_CASE("Ext is additive") {
    auto F = Field::get(2);
    auto n = ev("sym(2)*twist(id,1)", 2, F);
    auto a = ev("div(4)", 2, F), b = ev("twist(sym(2),1)", 2, F), ab = ev("div(4)+twist(sym(2),1)", 2, F);
    auto ea = ext(*a, *n, 3), eb = ext(*b, *n, 3), eab = ext(*ab, *n, 3);
    for (int i = 0; i <= 3; ++i) CHECK(eab.at(i) == ea.at(i) + eb.at(i));
}

TEST_CASE("standard projectives have no higher Ext") {
    auto F = Field::get(2);
    auto n = ev("sym(3)", 3, F);
    for (const auto& lam : compositions(3, 3)) {
        auto r = gamma_recipe(lam, F);
        auto e = ext(*r->module, *n, 2);
        CHECK(e.at(0) == n->block_dim_of(lam));
        CHECK(e.at(1) == 0);
        CHECK(e.at(2) == 0);
    }
}

TEST_CASE("Tor through Kuhn duality matches Ext") {
    for (int p : {2, 3}) {
        auto F = Field::get(p);
        for (const char* e0 : {"twist(id,1)", "sym(2)"})
            for (const char* f : {"twist(id,1)", "div(2)", "sym(2)"}) {
                Expr E0 = parse_expr(e0), Fe = parse_expr(f);
                if (E0.degrees(p) != Fe.degrees(p)) continue;
                CAPTURE(p);
                CAPTURE(e0);
                CAPTURE(f);
                auto t = tor(Expr::contra(E0), Fe, 2, F, 3);
                auto e = ext(*eval_cached(Fe, 2, F), *eval_cached(E0, 2, F), 3);
                CHECK(t.dims == e.dims);
            }
    }
    auto F = Field::get(2);
    CHECK_THROWS_AS(tor(parse_expr("sym(2)"), parse_expr("sym(2)"), 2, F, 1), std::invalid_argument);
}

TEST_CASE("identity and zero chain lifts") {
    auto F = Field::get(2);
    auto m = ev("twist(id,1)", 2, F);
    auto n = ev("twist(id,1)", 2, F);
    auto src = resolve(m, 3), dst = resolve(m, 3);
    auto view = view_of(dst, 2);
    auto lift = chain_lift(src, view, identity_map(*m), 2);
    auto hs = hom_complex(src, *n, 2), hd = hom_complex(dst, *n, 2);
    auto e = cohomology_dims(hs);
    WordCache words(*n);
    ModuleMap zero(m.get(), m.get());
    for (int b = 0; b < m->num_blocks(); ++b) zero.set_block(b, Mat(F, m->block_dim(b), m->block_dim(b)));
    auto zlift = chain_lift(src, view, zero, 2);
    for (int i = 0; i <= 2; ++i) {
        Mat t = induced_cochain_map(dst.steps[i].proj, words, lift[i], src.steps[i].proj.summands, *n);
        CHECK(induced_rank(hd, hs, t, i) == e[i]);
        Mat z = induced_cochain_map(dst.steps[i].proj, words, zlift[i], src.steps[i].proj.summands, *n);
        CHECK(induced_rank(hd, hs, z, i) == 0);
    }
}

TEST_CASE("lift of Div(2) into Ten(2) matches precomposition on Hom") {
    for (int p : {2, 3}) {
        auto F = Field::get(p);
        auto nm = nat_map("div-to-ten", {2}, 2, F);
        for (const char* target : {"sym(2)", "ten(2)", "div(2)", "ext(2)"}) {
            CAPTURE(p);
            CAPTURE(target);
            auto n = ev(target, 2, F);
            auto src = resolve(nm.source, 2), dst = resolve(nm.target, 2);
            auto lift = chain_lift(src, view_of(dst, 1), *nm.map, 1);
            WordCache words(*n);
            auto hs = hom_complex(src, *n, 1), hd = hom_complex(dst, *n, 1);
            Mat t = induced_cochain_map(dst.steps[0].proj, words, lift[0], src.steps[0].proj.summands, *n);
            long long r = induced_rank(hd, hs, t, 0);
            // φ ↦ φ ∘ ι on Hom(Ten(2), N).
            std::vector<Vec> comps;
            for (const auto& phi : hom_space(*nm.target, *n)) {
                Mat c = phi.compose_after(*nm.map).dense();
                Vec v(F, c.rows() * c.cols());
                for (int i = 0; i < c.rows(); ++i)
                    for (int j = 0; j < c.cols(); ++j) v.set(i * c.cols() + j, c.get(i, j));
                comps.push_back(v);
            }
            long long expect = comps.empty() ? 0 : Mat::from_columns(F, comps[0].size(), comps).rank();
            CHECK(r == expect);
        }
    }
}

TEST_CASE("Kuhn dual of Sym(d) is Div(d)") {
    for (int p : {2, 3}) {
        auto F = Field::get(p);
        for (int n = 1; n <= 3; ++n)
            for (int d = 1; d <= 3; ++d) {
                auto s = kuhn_dual(*ev("sym(" + std::to_string(d) + ")", n, F));
                auto g = ev("div(" + std::to_string(d) + ")", n, F);
                auto maps = hom_space(s, *g);
                REQUIRE(maps.size() == 1);
                CHECK(maps[0].is_iso());
            }
    }
}

TEST_CASE("structure maps are equivariant") {
    for (int p : {2, 3}) {
        auto F = Field::get(p);
        std::vector<std::pair<std::string, std::vector<int>>> named = {
            {"div-to-ten", {3}}, {"ten-to-sym", {3}}, {"ten-to-ext", {2}}, {"sym-mult", {1, 2}},
            {"div-comult", {2, 1}}, {"frobenius-power", {1}}};
        for (const auto& [name, args] : named) {
            CAPTURE(name);
            CAPTURE(p);
            auto nm = nat_map(name, args, 2, F);
            CHECK(nm.map->check_equivariant() == "");
            CHECK(!nm.map->is_zero());
        }
        CHECK(nat_map("div-to-ten", {3}, 2, F).map->rank() == 4);
        CHECK(nat_map("ten-to-sym", {3}, 2, F).map->rank() == 4);
        CHECK(nat_map("frobenius-power", {1}, 2, F).map->rank() == 2);
        CHECK_THROWS_AS(nat_map("no-such-map", {1}, 2, F), std::invalid_argument);
    }
}

TEST_CASE("resolution block cap") {
    auto F = Field::get(2);
    ResolveOptions opt;
    opt.block_cap = 2;
    CHECK_THROWS_AS(resolve(ev("sym(3)", 3, F), 2, opt), ResourceCapExceeded);
}

}  // TEST_SUITE
