#include <random>

#include "doctest.h"
#include "spfh/polyfun.hpp"

using namespace spfh;

namespace {

std::vector<std::string> sample_exprs() {
    return {"id",        "sym(2)",          "sym(3)",         "div(2)",        "div(3)",
            "ext(2)",    "ext(3)",          "ten(2)",         "twist(id,1)",   "twist(sym(2),1)",
            "sym(2)*id", "div(2)+ext(2)",   "sym(2)@ext(1)",  "ext(2)@sym(1)", "kuhn(sym(2))",
            "mtwist(id,1,2)", "param(id,[1,1])", "param(sym(2),[1,1])", "kuhn(div(2)*id)"};
}

}  // namespace

TEST_SUITE("polyfun") {

TEST_CASE("parser round trip and errors") {
    for (const auto& s : sample_exprs()) {
        Expr e = parse_expr(s);
        CHECK(parse_expr(e.str()).str() == e.str());
    }
    CHECK(parse_expr(" sym( 2 ) * id + twist(id , 1)").str() == "((sym(2)*id)+twist(id,1))");
    CHECK_THROWS_AS(parse_expr("sym(2"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(1)"), ParseError);
    CHECK_THROWS_AS(parse_expr("mtwist(id,1,0)"), ParseError);
    CHECK(parse_expr("sym(2)").hash() != parse_expr("div(2)").hash());
}

TEST_CASE("degrees scale under twists") {
    CHECK(parse_expr("twist(sym(2),1)").degrees(2) == std::vector<int>{4});
    CHECK(parse_expr("mtwist(id,1,4)").degrees(2) == std::vector<int>{1, 2, 4, 8});
    CHECK(parse_expr("mtwist(sym(2),1,2)").degrees(3) == std::vector<int>{2, 4, 6});
    CHECK(parse_expr("sym(2)@(id+twist(id,1))").degrees(2) == std::vector<int>{2, 3, 4});
}

TEST_CASE("apply is functorial") {
    std::mt19937_64 rng(5);
    for (int q : {2, 3, 4}) {
        auto F = Field::of_order(q);
        for (const auto& s : sample_exprs()) {
            CAPTURE(s);
            CAPTURE(q);
            Expr e = parse_expr(s);
            Mat a = Mat::random(F, 3, 2, rng), b = Mat::random(F, 2, 3, rng);
            CHECK(apply(e, a * b) == apply(e, a) * apply(e, b));
            CHECK(apply(e, Mat::identity(F, 3)).is_identity());
            CHECK(apply(e, a).rows() == functor_dim(e, 3));
            CHECK(apply(e, a).cols() == functor_dim(e, 2));
        }
    }
}

TEST_CASE("apply over the truncated polynomial ring is functorial") {
    std::mt19937_64 rng(9);
    auto F = Field::get(2);
    for (const auto& s : sample_exprs()) {
        CAPTURE(s);
        Expr e = parse_expr(s);
        PolyMat a(F, 2, 2, 5), b(F, 2, 2, 5);
        for (int k = 0; k < 3; ++k) {
            a.coeff(k) = Mat::random(F, 2, 2, rng);
            b.coeff(k) = Mat::random(F, 2, 2, rng);
        }
        PolyMat lhs = apply(e, a * b), rhs = apply(e, a) * apply(e, b);
        for (int k = 0; k < 5; ++k) CHECK(lhs.coeff(k) == rhs.coeff(k));
    }
}

TEST_CASE("symmetric square over GF(2) has the expected operators") {
    auto F = Field::get(2);
    WeightedModule m = eval(parse_expr("sym(2)"), 2, F);
    REQUIRE(m.num_blocks() == 3);
    CHECK(m.weight(0) == Weight{0, 2});
    CHECK(m.weight(2) == Weight{2, 0});
    // f^(1) x^2 = 2xy = 0 and f^(2) x^2 = y^2
    CHECK(m.op({0, 1, false}, 2) == nullptr);
    REQUIRE(m.op({0, 2, false}, 2) != nullptr);
    CHECK(m.op({0, 2, false}, 2)->get(0, 0) == 1);
    // e^(1) xy = x^2
    REQUIRE(m.op({0, 1, true}, 1) != nullptr);
    CHECK(m.op({0, 1, true}, 1)->get(0, 0) == 1);
}

TEST_CASE("hyperalgebra relations hold on evaluated modules") {
    for (int q : {2, 3}) {
        auto F = Field::of_order(q);
        for (const auto& s : sample_exprs()) {
            CAPTURE(s);
            CAPTURE(q);
            for (int n : {2, 3}) CHECK(eval(parse_expr(s), n, F).check_relations().empty());
        }
    }
}

TEST_CASE("Kuhn dual of an evaluation is the evaluation of the Kuhn dual") {
    auto F = Field::get(3);
    for (const auto& s : sample_exprs()) {
        CAPTURE(s);
        Expr e = parse_expr(s);
        CHECK(eval(Expr::kuhn(e), 3, F) == kuhn_dual(eval(e, 3, F)));
    }
}

TEST_CASE("twisting a module matches evaluating the twisted functor") {
    for (int q : {2, 3}) {
        auto F = Field::of_order(q);
        for (const char* s : {"id", "sym(2)", "div(2)", "ext(2)", "twist(id,1)"}) {
            Expr e = parse_expr(s);
            Expr t = Expr::twist(e, 1);
            int D = t.max_degree(q);
            WeightedModule direct = eval(t, 3, F, {D});
            WeightedModule twisted = twist_module(eval(e, 3, F), D);
            CHECK(direct == twisted);
        }
    }
}

TEST_CASE("multitwist is definitionally a composite with a sum of twists") {
    auto F = Field::get(2);
    for (const char* s : {"mtwist(id,1,3)", "mtwist(sym(2),1,2)", "mtwist(ext(2),2,2)"}) {
        Expr e = parse_expr(s);
        Expr x = expand_multitwist(e);
        CHECK(x.str() != e.str());
        CHECK(eval(e, 2, F) == eval(x, 2, F, {e.max_degree(2)}));
    }
}

TEST_CASE("degenerate rank zero") {
    auto F = Field::get(2);
    CHECK(eval(parse_expr("sym(2)"), 0, F).dim() == 0);
    CHECK(eval(parse_expr("sym(0)"), 0, F).dim() == 1);
    CHECK(eval(parse_expr("sym(0)+id"), 0, F).dim() == 1);
}

TEST_CASE("graded parameters record degrees") {
    auto F = Field::get(2);
    WeightedModule m = eval(parse_expr("param(sym(2),[1,0,1])"), 2, F);
    // sym^2 of (degree 0 line + degree 2 line) ⊗ k^2: grades 0, 2, 4
    std::map<int, int> count;
    for (int g : m.grades()) ++count[g];
    CHECK(count[0] == 3);
    CHECK(count[2] == 4);
    CHECK(count[4] == 3);
}

TEST_CASE("block cap names the offending block") {
    auto F = Field::get(2);
    EvalOptions opt;
    opt.block_cap = 10;
    CHECK_THROWS_AS(eval(parse_expr("ten(4)"), 4, F, opt), ResourceCapExceeded);
}

}
