#include <chrono>
#include <functional>
#include <sstream>

#include "spfh/compare.hpp"
#include "spfh/driver.hpp"
#include "spfh/fqcat.hpp"
#include "spfh/generic.hpp"
#include "spfh/oracle.hpp"
#include "spfh/orbit_schur.hpp"
#include "spfh/parallel.hpp"

namespace spfh {

namespace {

using Dims = std::vector<long long>;

std::string str(const Dims& d) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < d.size(); ++i) os << (i ? "," : "") << d[i];
    os << ")";
    return os.str();
}

std::shared_ptr<const WeightedModule> ev(const char* e, int n, const FieldPtr& f) {
    return eval_cached(parse_expr(e), n, f);
}

// Every check appends to the detail and clears ok on failure.
struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) ok = false;
        detail << (detail.tellp() > 0 ? "; " : "") << what << (cond ? "" : " [FAIL]");
    }
};

void twisted_identity(Check& c) {
    auto f = Field::get(2);
    auto m = ev("twist(id,1)", 2, f);
    Dims engine = ext(*m, *m, 2).dims;
    auto alg = orbit::orbit_schur_algebra(f, 2, 2);
    auto frob = alg.functor_module("frob");
    Dims oracle = orbit::ext_dims(alg, frob, frob, 2);
    c.expect(alg.dim() == 10, "dim S(2,2) = " + std::to_string(alg.dim()));
    c.expect(engine == Dims{1, 0, 1}, "engine " + str(engine));
    c.expect(oracle == engine, "orbit-sum oracle " + str(oracle));
}

void stable_range(Check& c) {
    auto rep = twist_map(parse_expr("id"), parse_expr("id"), 1, 3, Field::get(2));
    c.expect(rep.n == 4, "n = " + std::to_string(rep.n));
    for (const auto& d : rep.degrees) {
        std::ostringstream os;
        os << "deg " << d.degree << ": rank " << d.rank << " of " << d.source << " -> " << d.target;
        c.expect(d.injective() && d.iso(), os.str());
    }
    c.expect(rep.degrees.size() == 4, "4 degrees");
}

void ffss_windows(Check& c) {
    auto f = Field::get(2);
    auto c2 = ev("twist(id,2)", 4, f);
    struct Case {
        const char* g;
        FfssPair pair;
        Dims expected;
    };
    for (const auto& [g, pair, expected] :
         {Case{"twist(sym(2),1)", FfssPair::GS, {1, 0, 0, 0}}, Case{"twist(div(2),1)", FfssPair::GG, {0, 0, 1, 0}}}) {
        Dims engine = ext(*c2, *ev(g, 4, f), 3).dims;
        Dims series = ffss_series(pair, 1, 1, 2, 3, 1).by_weight[1].dims;
        c.expect(engine == series && engine == expected,
                 std::string(g) + ": engine " + str(engine) + ", series " + str(series));
    }
}

void counterexample(Check& c) {
    for (int N : {2, 3}) {
        auto cat = std::make_shared<const TruncCat>(2, N);
        auto k = cat->fq();
        long long d = cat_ext(restrict_functor(parse_expr("sym(1)"), cat, k), restrict_functor(parse_expr("sym(2)"), cat, k), 0)
                          .at(0);
        c.expect(d == 1, "N=" + std::to_string(N) + ": Hom = " + std::to_string(d));
    }
    auto f = Field::get(2);
    auto h = hom_space(*ev("sym(1)", 2, f), *ev("sym(2)", 2, f)).size();
    c.expect(h == 0, "strict polynomial Hom = " + std::to_string(h));
}

const char* const kSmallFunctors[] = {"id", "sym(2)", "ext(2)", "div(2)"};

void generalized_sweep(Check& c) {
    int iso = 0, total = 0;
    for (const char* a : kSmallFunctors)
        for (const char* b : kSmallFunctors) {
            auto rep = gen_comp_map(parse_expr(a), parse_expr(b), 2, 2, 2);
            const auto& row = rep.rows.at(0);
            const bool ok = row.verdict == "iso" && row.rank == row.source && row.rank == row.target && row.predicted_iso;
            ++total;
            iso += ok;
            if (!ok)
                c.expect(false, std::string(a) + "/" + b + ": " + row.verdict + " rank " + std::to_string(row.rank));
        }
    c.expect(iso == total, std::to_string(iso) + "/" + std::to_string(total) + " iso with rank = source = target");
}

void strong_q4(Check& c) {
    int iso = 0, total = 0, stable = 0;
    for (const char* a : {"sym(2)", "div(2)", "ext(2)"})
        for (const char* b : {"sym(2)", "div(2)", "ext(2)"}) {
            auto rep = strong_phi(parse_expr(a), parse_expr(b), 4, 2);
            const auto& row = rep.rows.at(0);
            ++total;
            iso += row.verdict == "iso";
            stable += row.stable();
            if (row.verdict != "iso") c.expect(false, std::string(a) + "/" + b + ": " + row.verdict);
        }
    c.expect(iso == total, std::to_string(iso) + "/" + std::to_string(total) + " iso at N=2");
    c.expect(stable >= 1, std::to_string(stable) + " pairs stable at N=3");
}

void identity_category(Check& c) {
    auto k = Field::get(2);
    auto id = functor_recipe(parse_expr("id"), k);
    auto scan = stabilization_scan(id, id, 2, 3, {3, 4});
    const Dims& n3 = scan.tables.at(0).dims;
    const Dims& n4 = scan.tables.at(1).dims;
    c.expect(n3 == n4 && n4 == Dims{1, 0, 1, 0}, "N=3 " + str(n3) + ", N=4 " + str(n4));
    CompareOptions opt;
    opt.max_degree = 3;
    opt.check_stability = false;
    auto rep = gen_comp_map(parse_expr("id"), parse_expr("id"), 2, 1, 3, opt);
    Dims generic, ranks;
    for (const auto& row : rep.rows) {
        generic.push_back(row.source);
        ranks.push_back(row.rank);
    }
    c.expect(generic == n4, "generic side " + str(generic));
    c.expect(ranks == n4, "map ranks " + str(ranks));
}

void duality(Check& c) {
    auto f = Field::get(2);
    struct Pair {
        const char *a, *b;
        int n, L;
    };
    const Pair pairs[] = {{"twist(id,1)", "twist(id,1)", 2, 2},
                          {"twist(id,1)", "twist(id,1)", 4, 3},
                          {"twist(id,2)", "twist(id,2)", 4, 3},
                          {"twist(id,2)", "twist(sym(2),1)", 4, 3},
                          {"twist(id,2)", "twist(div(2),1)", 4, 3}};
    int agree = 0;
    for (const auto& [a, b, n, L] : pairs) {
        Dims e = ext(*ev(a, n, f), *ev(b, n, f), L).dims;
        Dims t = tor(Expr::contra(parse_expr(b)), parse_expr(a), n, f, L).dims;
        if (e == t)
            ++agree;
        else
            c.expect(false, std::string(a) + "/" + b + ": ext " + str(e) + " tor " + str(t));
    }
    c.expect(agree == int(std::size(pairs)), std::to_string(agree) + " tor = ext instances");
    ResolveOptions rev;
    rev.policy = CoverPolicy::Reverse;
    int same = 0;
    const Pair policy_pairs[] = {pairs[0], pairs[3], pairs[4]};
    for (const auto& [a, b, n, L] : policy_pairs) {
        auto m = ev(a, n, f), t = ev(b, n, f);
        if (ext(*m, *t, L) == ext(*m, *t, L, rev))
            ++same;
        else
            c.expect(false, std::string(a) + "/" + b + ": policies disagree");
    }
    c.expect(same == int(std::size(policy_pairs)), std::to_string(same) + " policy-independent instances");
}

void oracle_consistency(Check& c) {
    int tables = 0, mismatched = 0;
    for (int p : {2, 3})
        for (int r = 0; r <= 2; ++r)
            for (long long v : {1, 2, 3}) {
                auto e = ext_table(ffss_series(FfssPair::GS, v, r, p, 20, 3));
                auto t = relabel_tor(tor_series(TorPair::GG, v, r, p, 20, 3));
                bool same = e.size() == t.size();
                for (const auto& [key, x] : e) {
                    auto [i, d, w] = key;
                    auto it = t.find({i, w, d});
                    same = same && it != t.end() && it->second == x;
                }
                ++tables;
                mismatched += !same;
            }
    c.expect(mismatched == 0, std::to_string(tables - mismatched) + "/" + std::to_string(tables) + " tables agree");
    int zero = 0, odd = 0;
    for (int d = 1; d <= 9; d += 2)
        for (int l = 1; l <= 3; ++l)
            for (int m = 1; m <= 3; ++m) {
                auto g = gl_exterior_homology(d, l, m, 20);
                ++odd;
                zero += std::all_of(g.dims.begin(), g.dims.end(), [](long long x) { return x == 0; });
            }
    c.expect(zero == odd, std::to_string(zero) + "/" + std::to_string(odd) + " odd-d evaluations zero");
}

void kuhn_duality(Check& c) {
    int witnessed = 0, total = 0;
    for (int p : {2, 3}) {
        auto f = Field::get(p);
        for (int n = 1; n <= 3; ++n)
            for (int d = 1; d <= 3; ++d) {
                ++total;
                auto s = kuhn_dual(*eval_cached(Expr::sym(d), n, f));
                auto g = eval_cached(Expr::div(d), n, f);
                auto maps = hom_space(s, *g);
                // The commutant basis is one map; it must be invertible and
                // commute with every operator.
                if (maps.size() == 1 && maps[0].is_iso() && maps[0].check_equivariant().empty())
                    ++witnessed;
                else
                    c.expect(false, "p=" + std::to_string(p) + " n=" + std::to_string(n) + " d=" + std::to_string(d));
            }
    }
    c.expect(witnessed == total, std::to_string(witnessed) + "/" + std::to_string(total) + " certified isomorphisms");
}

struct Criterion {
    int id;
    double limit_seconds;
    std::function<void(Check&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, 1.0, twisted_identity},     {2, 300.0, stable_range},       {3, 1200.0, ffss_windows},
        {4, 1.0, counterexample},       {5, 600.0, generalized_sweep},  {6, 1800.0, strong_q4},
        {7, 3600.0, identity_category}, {8, 600.0, duality},            {9, 1.0, oracle_consistency},
        {10, 60.0, kuhn_duality},
    };
    return all;
}

}  // namespace

std::vector<CriterionResult> acceptance_suite(int workers, const std::vector<int>& only) {
    set_worker_budget(workers);
    std::vector<CriterionResult> out;
    for (const auto& crit : criteria()) {
        if (!only.empty() && std::find(only.begin(), only.end(), crit.id) == only.end()) continue;
        CriterionResult res;
        res.id = crit.id;
        res.limit_seconds = crit.limit_seconds;
        Check check;
        auto t0 = std::chrono::steady_clock::now();
        try {
            crit.run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("error: ") + e.what());
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = res.seconds < res.limit_seconds;
        if (!in_time) check.expect(false, "over time limit");
        res.pass = check.ok;
        res.detail = check.detail.str();
        out.push_back(std::move(res));
    }
    return out;
}

std::string format_criterion(const CriterionResult& c) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(3);
    os << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << " (" << c.seconds << " s, limit "
       << c.limit_seconds << " s) " << c.detail;
    return os.str();
}

}  // namespace spfh
