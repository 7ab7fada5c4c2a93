#include "spfh/natmap.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "spfh/polyfun.hpp"

namespace spfh {

namespace {

void need(const std::vector<int>& args, std::size_t k, const std::string& name) {
    if (args.size() != k) throw std::invalid_argument(name + " expects " + std::to_string(k) + " arguments");
    for (int a : args)
        if (a < 0) throw std::invalid_argument(name + " expects nonnegative arguments");
}

std::vector<std::vector<int>> words(int d, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(d, 0);
    long long total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    for (long long idx = 0; idx < total; ++idx) {
        long long x = idx;
        for (int k = d - 1; k >= 0; --k) {
            w[k] = int(x % n);
            x /= n;
        }
        out.push_back(w);
    }
    return out;
}

Weight content(const std::vector<int>& w, int n) {
    Weight c(n, 0);
    for (int x : w) ++c[x];
    return c;
}

std::map<Weight, int> index_of(const std::vector<Weight>& v) {
    std::map<Weight, int> m;
    for (int i = 0; i < int(v.size()); ++i) m[v[i]] = i;
    return m;
}

}  // namespace

std::pair<Expr, Expr> nat_map_exprs(const std::string& name, const std::vector<int>& args, int p) {
    if (name == "div-to-ten") {
        need(args, 1, name);
        return {Expr::div(args[0]), Expr::ten(args[0])};
    }
    if (name == "ten-to-sym") {
        need(args, 1, name);
        return {Expr::ten(args[0]), Expr::sym(args[0])};
    }
    if (name == "ten-to-ext") {
        need(args, 1, name);
        return {Expr::ten(args[0]), Expr::ext(args[0])};
    }
    if (name == "sym-mult") {
        need(args, 2, name);
        return {Expr::tensor({Expr::sym(args[0]), Expr::sym(args[1])}), Expr::sym(args[0] + args[1])};
    }
    if (name == "div-comult") {
        need(args, 2, name);
        return {Expr::div(args[0] + args[1]), Expr::tensor({Expr::div(args[0]), Expr::div(args[1])})};
    }
    if (name == "frobenius-power") {
        need(args, 1, name);
        if (args[0] < 1) throw std::invalid_argument("frobenius-power needs r >= 1");
        return {Expr::twist(Expr::id(), args[0]), Expr::compose(Expr::sym(p), Expr::twist(Expr::id(), args[0] - 1))};
    }
    throw std::invalid_argument("unknown structure map: " + name);
}

Mat nat_map_matrix(const std::string& name, const std::vector<int>& args, int n, const FieldPtr& f) {
    if (name == "frobenius-power") {
        need(args, 1, name);
        const int p = f->p();
        auto mons = compositions(p, n);
        auto idx = index_of(mons);
        Mat m(f, int(mons.size()), n);
        for (int j = 0; j < n; ++j) {
            Weight w(n, 0);
            w[j] = p;
            m.set(idx[w], j, 1);
        }
        return m;
    }
    if (name == "div-to-ten" || name == "ten-to-sym" || name == "ten-to-ext") {
        need(args, 1, name);
        const int d = args[0];
        auto ws = words(d, n);
        if (name == "ten-to-ext") {
            // Lexicographic d-subsets, as in the exterior power basis.
            std::vector<std::vector<int>> subs;
            for (const auto& w : ws)
                if (std::is_sorted(w.begin(), w.end()) && std::adjacent_find(w.begin(), w.end()) == w.end())
                    subs.push_back(w);
            std::map<std::vector<int>, int> sidx;
            for (int i = 0; i < int(subs.size()); ++i) sidx[subs[i]] = i;
            Mat m(f, int(subs.size()), int(ws.size()));
            for (int c = 0; c < int(ws.size()); ++c) {
                auto w = ws[c];
                if (std::set<int>(w.begin(), w.end()).size() != w.size()) continue;
                int inversions = 0;
                for (int i = 0; i < d; ++i)
                    for (int j = i + 1; j < d; ++j)
                        if (w[i] > w[j]) ++inversions;
                std::sort(w.begin(), w.end());
                m.set(sidx[w], c, inversions % 2 ? f->neg(1) : Elem(1));
            }
            return m;
        }
        auto mons = compositions(d, n);
        auto idx = index_of(mons);
        bool to_sym = name == "ten-to-sym";
        Mat m(f, to_sym ? int(mons.size()) : int(ws.size()), to_sym ? int(ws.size()) : int(mons.size()));
        for (int c = 0; c < int(ws.size()); ++c) {
            int mi = idx[content(ws[c], n)];
            if (to_sym) m.set(mi, c, 1);
            else m.set(c, mi, 1);
        }
        return m;
    }
    if (name == "sym-mult" || name == "div-comult") {
        need(args, 2, name);
        const int a = args[0], b = args[1];
        auto ma = compositions(a, n), mb = compositions(b, n), mc = compositions(a + b, n);
        auto ic = index_of(mc);
        const int tens = int(ma.size() * mb.size());
        bool mult = name == "sym-mult";
        Mat m(f, mult ? int(mc.size()) : tens, mult ? tens : int(mc.size()));
        for (int i = 0; i < int(ma.size()); ++i)
            for (int j = 0; j < int(mb.size()); ++j) {
                Weight s(n);
                for (int k = 0; k < n; ++k) s[k] = ma[i][k] + mb[j][k];
                int t = i * int(mb.size()) + j;
                if (mult) m.set(ic[s], t, 1);
                else m.set(t, ic[s], 1);
            }
        return m;
    }
    throw std::invalid_argument("unknown structure map: " + name);
}

ModuleMap module_map_from_eval(const WeightedModule* src, const WeightedModule* dst, const Mat& m) {
    Mat dense(src->field(), dst->dim(), src->dim());
    const auto& rp = dst->eval_position();
    const auto& cp = src->eval_position();
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (Elem e = m.get(i, j)) dense.set(rp[i], cp[j], e);
    return ModuleMap::from_dense(src, dst, dense);
}

NatMap nat_map(const std::string& name, const std::vector<int>& args, int n, const FieldPtr& f) {
    auto [se, te] = nat_map_exprs(name, args, f->p());
    NatMap out{se, te, nullptr, nullptr, nullptr};
    int D = std::max(se.max_degree(f->p()), te.max_degree(f->p()));
    EvalOptions opt{std::max(1, D)};
    out.source = std::make_shared<WeightedModule>(eval(se, n, f, opt));
    out.target = std::make_shared<WeightedModule>(eval(te, n, f, opt));
    Mat m = nat_map_matrix(name, args, n, f);
    out.map = std::make_shared<ModuleMap>(module_map_from_eval(out.source.get(), out.target.get(), m));
    return out;
}

}  // namespace spfh
