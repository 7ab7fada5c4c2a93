#include <random>

#include "doctest.h"
#include "spfh/field.hpp"
#include "spfh/matrix.hpp"

using namespace spfh;

TEST_SUITE("field") {

TEST_CASE("published Conway polynomials") {
    auto eq = [](int p, int r, std::vector<int> want) { CHECK(conway_polynomial(p, r) == want); };
    eq(2, 2, {1, 1, 1});
    eq(2, 3, {1, 1, 0, 1});
    eq(2, 4, {1, 1, 0, 0, 1});
    eq(2, 8, {1, 0, 1, 1, 1, 0, 0, 0, 1});
    eq(3, 2, {2, 2, 1});
    eq(3, 4, {2, 0, 0, 2, 1});
    eq(5, 2, {2, 4, 1});
    eq(7, 2, {3, 6, 1});
    eq(5, 1, {3, 1});
    CHECK(conway_polynomial(65521, 1).size() == 2);
    CHECK(conway_polynomial(2, 17).empty());
}

TEST_CASE("field axioms on small fields") {
    for (int q : {2, 3, 4, 5, 8, 9, 16, 25, 27}) {
        auto F = Field::of_order(q);
        CAPTURE(q);
        for (int a = 0; a < q; ++a) {
            CHECK(F->add(Elem(a), F->neg(Elem(a))) == 0);
            if (a) CHECK(F->mul(Elem(a), F->inv(Elem(a))) == 1);
            for (int b = 0; b < q; ++b) {
                CHECK(F->add(Elem(a), Elem(b)) == F->add(Elem(b), Elem(a)));
                CHECK(F->mul(Elem(a), Elem(b)) == F->mul(Elem(b), Elem(a)));
                for (int c = 0; c < q; c += 3)
                    CHECK(F->mul(Elem(a), F->add(Elem(b), Elem(c))) ==
                          F->add(F->mul(Elem(a), Elem(b)), F->mul(Elem(a), Elem(c))));
            }
        }
    }
}

TEST_CASE("frobenius is additive and has order r") {
    auto F = Field::get(3, 3);
    for (int a = 0; a < F->q(); ++a) {
        CHECK(F->frobenius(F->frobenius(Elem(a), 1), -1) == a);
        CHECK(F->frobenius(Elem(a), 3) == a);
        for (int b = 0; b < F->q(); b += 5)
            CHECK(F->frobenius(F->add(Elem(a), Elem(b)), 1) ==
                  F->add(F->frobenius(Elem(a), 1), F->frobenius(Elem(b), 1)));
    }
}

TEST_CASE("subfield embedding is a ring map") {
    auto big = Field::get(2, 4);
    auto small = Field::get(2, 2);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            CHECK(big->embed_from(*small, small->add(Elem(a), Elem(b))) ==
                  big->add(big->embed_from(*small, Elem(a)), big->embed_from(*small, Elem(b))));
            CHECK(big->embed_from(*small, small->mul(Elem(a), Elem(b))) ==
                  big->mul(big->embed_from(*small, Elem(a)), big->embed_from(*small, Elem(b))));
        }
}

TEST_CASE("rank-nullity and solve over several fields") {
    std::mt19937_64 rng(7);
    for (int q : {2, 3, 4, 9}) {
        auto F = Field::of_order(q);
        for (int trial = 0; trial < 20; ++trial) {
            int r = 1 + int(rng() % 70), c = 1 + int(rng() % 70);
            Mat a = Mat::random(F, r, c, rng);
            if (trial % 3 == 0) a = a * Mat::random(F, c, c, rng).block(0, 0, c, c);
            Mat k = a.kernel();
            CHECK(a.rank() + k.cols() == c);
            CHECK((a * k).is_zero());
            Mat x = Mat::random(F, c, 2, rng);
            Mat b = a * x;
            auto s = a.solve(b);
            REQUIRE(s);
            CHECK(a * (*s) == b);
            CHECK(a.transpose().rank() == a.rank());
        }
    }
}

TEST_CASE("inverse and echelon membership") {
    std::mt19937_64 rng(11);
    for (int q : {2, 4, 5}) {
        auto F = Field::of_order(q);
        Mat a = Mat::random(F, 40, 40, rng);
        if (auto inv = a.inverse()) CHECK((a * (*inv)).is_identity());
        Echelon e(F, 40);
        for (int i = 0; i < 25; ++i) e.insert(a.row(i));
        Vec combo(F, 40);
        for (int i = 0; i < 25; i += 4) combo.axpy(Elem(1 + i % (q - 1)), a.row(i));
        CHECK(e.contains(combo));
        CHECK(e.dim() == a.block(0, 0, 25, 40).rank());
    }
}

TEST_CASE("packed transpose and products agree with entrywise definitions") {
    std::mt19937_64 rng(3);
    auto F = Field::get(2);
    Mat a = Mat::random(F, 130, 70, rng), b = Mat::random(F, 70, 90, rng);
    Mat c = a * b;
    for (int i = 0; i < 130; i += 13)
        for (int j = 0; j < 90; j += 7) {
            int s = 0;
            for (int k = 0; k < 70; ++k) s ^= a.get(i, k) & b.get(k, j);
            CHECK(c.get(i, j) == s);
        }
    CHECK(a.transpose().transpose() == a);
}

}
