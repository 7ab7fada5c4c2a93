#include <deque>
#include <stdexcept>

#include "spfh/fqcat.hpp"

namespace spfh {

long long ProjSum::dim(int m) const {
    long long d = 0;
    for (int j : objects) d += cat->hom_count(j, m);
    return d;
}

long long ProjSum::offset(int s, int m) const {
    long long d = 0;
    for (int t = 0; t < s; ++t) d += cat->hom_count(objects[t], m);
    return d;
}

bool CatResolution::certified() const {
    for (const auto& st : steps)
        for (std::size_t m = 0; m < st.rank.size(); ++m)
            if (st.rank[m] < 0 || st.rank[m] != st.expected[m]) return false;
    return !steps.empty();
}

namespace {

// The action of every category generator on P(m), as index permutations
// (maps, in general) of the basis (s, φ).
struct ProjAction {
    // perm[m][g][x] = image index in P(target) of basis x of P(m)
    std::vector<std::vector<std::vector<int>>> perm;

    ProjAction(const ProjSum& p) {
        const auto& cat = *p.cat;
        perm.resize(cat.N() + 1);
        for (int m = 0; m <= cat.N(); ++m) {
            const auto& gens = cat.generators(m);
            perm[m].resize(gens.size());
            for (std::size_t g = 0; g < gens.size(); ++g) {
                const int t = gens[g].target;
                auto table = cat.vector_table(gens[g].matrix);
                auto& out = perm[m][g];
                out.resize(p.dim(m));
                for (std::size_t s = 0; s < p.objects.size(); ++s) {
                    const int j = p.objects[s];
                    const long long src = p.offset(int(s), m), dst = p.offset(int(s), t);
                    for (long long x = 0; x < cat.hom_count(j, m); ++x)
                        out[src + x] = int(dst + cat.compose(table, j, m, t, x));
                }
            }
        }
    }

    Vec apply(int m, int g, const Vec& v, int target_dim) const {
        Vec out(v.field(), target_dim);
        const auto& pm = perm[m][g];
        const auto& F = *v.field();
        for (int x = 0; x < v.size(); ++x)
            if (Elem c = v.get(x)) out.set(pm[x], F.add(out.get(pm[x]), c));
        return out;
    }
};

// Matrix of d at object m: column (s, φ) is P_prev(φ) applied to image s.
Mat proj_differential(const ProjSum& src, const std::vector<Vec>& images, const ProjSum& prev, int m,
                      const FieldPtr& k) {
    const auto& cat = *src.cat;
    const auto& F = *k;
    Mat d(k, int(prev.dim(m)), int(src.dim(m)));
    for (std::size_t s = 0; s < src.objects.size(); ++s) {
        const int j = src.objects[s];
        const Vec& y = images[s];
        struct Term {
            int t;
            long long psi;
            Elem c;
        };
        std::vector<Term> terms;
        for (std::size_t t = 0; t < prev.objects.size(); ++t) {
            const long long off = prev.offset(int(t), j);
            for (long long x = 0; x < cat.hom_count(prev.objects[t], j); ++x)
                if (Elem c = y.get(int(off + x))) terms.push_back({int(t), x, c});
        }
        const long long col0 = src.offset(int(s), m);
        for (long long phi = 0; phi < cat.hom_count(j, m); ++phi) {
            auto table = cat.vector_table(cat.decode(j, m, phi));
            for (const auto& term : terms) {
                const int jt = prev.objects[term.t];
                const long long row = prev.offset(term.t, m) + cat.compose(table, jt, j, m, term.psi);
                d.set(int(row), int(col0 + phi), F.add(d.get(int(row), int(col0 + phi)), term.c));
            }
        }
    }
    return d;
}

// Matrix of the step-0 map ⊕P^(j_s)(m) -> M(m).
Mat module_augmentation(const CatModule& mod, const ProjSum& src, const std::vector<Vec>& images, int m) {
    const auto& cat = *src.cat;
    Mat d(mod.field(), mod.dim(m), int(src.dim(m)));
    for (std::size_t s = 0; s < src.objects.size(); ++s) {
        const int j = src.objects[s];
        const long long col0 = src.offset(int(s), m);
        for (long long phi = 0; phi < cat.hom_count(j, m); ++phi)
            d.set_col(int(col0 + phi), mod.act(cat.decode(j, m, phi), images[s]));
    }
    return d;
}

// Greedy generators of the submodule with values kernel[m] (column bases)
// inside an ambient functor with dimensions ambient[m]: at each object,
// vectors outside the submodule generated so far are added and closed under
// the category generators. closure[m] receives the dimension reached.
template <class Act>
std::vector<std::pair<int, Vec>> cover(const TruncCat& cat, const FieldPtr& k, const std::vector<int>& ambient,
                                       const std::vector<Mat>& kernel, Act act, std::vector<long long>& closure) {
    const int N = cat.N();
    std::vector<Echelon> span;
    for (int m = 0; m <= N; ++m) span.emplace_back(k, ambient[m]);
    std::vector<std::pair<int, Vec>> gens;
    std::deque<std::pair<int, Vec>> queue;
    auto close = [&] {
        while (!queue.empty()) {
            auto [m, v] = std::move(queue.front());
            queue.pop_front();
            const auto& cg = cat.generators(m);
            for (int g = 0; g < int(cg.size()); ++g) {
                const int t = cg[g].target;
                Vec w = act(m, g, v);
                if (span[t].insert(w)) queue.emplace_back(t, std::move(w));
            }
        }
    };
    for (int m = 0; m <= N; ++m) {
        const Mat& kb = kernel[m];
        for (int c = 0; c < kb.cols() && span[m].dim() < kb.cols(); ++c) {
            Vec v = kb.col(c);
            if (span[m].contains(v)) continue;
            span[m].insert(v);
            gens.emplace_back(m, v);
            queue.emplace_back(m, v);
            close();
        }
    }
    closure.assign(N + 1, 0);
    for (int m = 0; m <= N; ++m) closure[m] = span[m].dim();
    return gens;
}

void check_cap(const ProjSum& p, const CatOptions& opt) {
    for (int m = 0; m <= p.cat->N(); ++m)
        if (p.dim(m) > opt.dim_cap)
            throw ResourceCapExceeded("projective term of dimension " + std::to_string(p.dim(m)) + " at object " +
                                      std::to_string(m) + " exceeds the cap " + std::to_string(opt.dim_cap));
}

}  // namespace

CatResolution cat_resolve(const CatModule& mod, int length, const CatOptions& opt) {
    const auto& cat = mod.cat();
    const auto& k = mod.field();
    const int N = cat->N();
    CatResolution res{cat, k, {}};

    // Step 0 covers M itself.
    {
        std::vector<Mat> full;
        for (int m = 0; m <= N; ++m) full.push_back(Mat::identity(k, mod.dim(m)));
        CatResolutionStep st;
        auto gens = cover(*cat, k, mod.dims(), full,
                          [&](int m, int g, const Vec& v) { return mod.gen_action(m, g) * v; }, st.rank);
        st.proj.cat = cat;
        for (auto& [m, v] : gens) {
            st.proj.objects.push_back(m);
            st.images.push_back(std::move(v));
        }
        for (int m = 0; m <= N; ++m) st.expected.push_back(mod.dim(m));
        check_cap(st.proj, opt);
        res.steps.push_back(std::move(st));
    }

    for (int i = 1; i <= length; ++i) {
        auto& prev = res.steps[i - 1];
        // ker d_{i-1}, objectwise; the rank of d_{i-1} is checked against
        // the closure dimension recorded when its generators were chosen.
        std::vector<Mat> kernel;
        std::vector<int> ambient;
        for (int m = 0; m <= N; ++m) {
            Mat d = i == 1 ? module_augmentation(mod, prev.proj, prev.images, m)
                           : proj_differential(prev.proj, prev.images, res.steps[i - 2].proj, m, k);
            kernel.push_back(d.kernel());
            ambient.push_back(int(prev.proj.dim(m)));
            if (prev.proj.dim(m) - kernel.back().cols() != prev.rank[m])
                throw std::logic_error("resolution differential rank disagrees with the generated submodule");
        }
        ProjAction pa(prev.proj);
        CatResolutionStep st;
        auto gens = cover(*cat, k, ambient, kernel,
                          [&](int m, int g, const Vec& v) {
                              return pa.apply(m, g, v, ambient[cat->generators(m)[g].target]);
                          },
                          st.rank);
        st.proj.cat = cat;
        for (auto& [m, v] : gens) {
            st.proj.objects.push_back(m);
            st.images.push_back(std::move(v));
        }
        for (int m = 0; m <= N; ++m) st.expected.push_back(kernel[m].cols());
        if (i < length) check_cap(st.proj, opt);
        res.steps.push_back(std::move(st));
    }
    return res;
}

CatHomComplex cat_hom_complex(const CatResolution& res, const CatModule& n, int max_degree) {
    const auto& cat = *res.cat;
    const auto& k = n.field();
    if (res.length() < max_degree + 1) throw std::invalid_argument("resolution too short for the requested degree");
    CatHomComplex c;
    for (int i = 0; i <= max_degree + 1; ++i) {
        const auto& objs = res.steps[i].proj.objects;
        std::vector<int> off;
        int d = 0;
        for (int j : objs) {
            off.push_back(d);
            d += n.dim(j);
        }
        c.dims.push_back(d);
        c.offsets.push_back(std::move(off));
    }
    for (int i = 0; i <= max_degree; ++i) {
        const auto& src = res.steps[i].proj;
        const auto& st = res.steps[i + 1];
        Mat delta(k, c.dims[i + 1], c.dims[i]);
        // (δf)(generator t) = f(d g_t) = Σ c N(ψ) f(g_s) over the terms (s, ψ).
        for (std::size_t t = 0; t < st.proj.objects.size(); ++t) {
            const int jt = st.proj.objects[t];
            const Vec& y = st.images[t];
            for (std::size_t s = 0; s < src.objects.size(); ++s) {
                const int js = src.objects[s];
                if (n.dim(js) == 0 || n.dim(jt) == 0) continue;
                const long long off = src.offset(int(s), jt);
                Mat block(k, n.dim(jt), n.dim(js));
                bool any = false;
                for (long long x = 0; x < cat.hom_count(js, jt); ++x)
                    if (Elem cf = y.get(int(off + x))) {
                        block.axpy(cf, n.act(cat.decode(js, jt, x)));
                        any = true;
                    }
                if (any) delta.set_block(c.offsets[i + 1][t], c.offsets[i][s], block);
            }
        }
        c.delta.push_back(std::move(delta));
    }
    return c;
}

std::vector<long long> cat_cohomology_dims(const CatHomComplex& c) {
    std::vector<long long> out;
    long long prev_rank = 0;
    for (std::size_t i = 0; i < c.delta.size(); ++i) {
        long long r = c.delta[i].rank();
        out.push_back(c.dims[i] - r - prev_rank);
        prev_rank = r;
    }
    return out;
}

long long cat_top_cocycles(const CatResolution& res, const CatModule& mod, const CatModule& n, const CatOptions& opt) {
    const auto& cat = *res.cat;
    const auto& k = n.field();
    const int L = res.length();
    const auto& top = res.steps[L];
    std::vector<int> off;
    int unknowns = 0;
    for (int j : top.proj.objects) {
        off.push_back(unknowns);
        unknowns += n.dim(j);
    }
    if (unknowns == 0) return 0;
    // Columns of `residues` are indexed by unknowns; each row is one linear
    // condition (object m, row r of N(m), column of P_L(m) after reduction).
    std::vector<Mat> conditions;
    for (int m = 0; m <= cat.N(); ++m) {
        if (n.dim(m) == 0) continue;
        const long long pdim = top.proj.dim(m);
        if (pdim > opt.top_dim_cap)
            throw ResourceCapExceeded("top projective term of dimension " + std::to_string(pdim) + " at object " +
                                      std::to_string(m) + " exceeds the cap " + std::to_string(opt.top_dim_cap));
        if (pdim == 0) continue;
        Mat d = L == 0 ? module_augmentation(mod, top.proj, top.images, m)
                       : proj_differential(top.proj, top.images, res.steps[L - 1].proj, m, k);
        auto ech = d.rref_inplace();
        Mat basis = d.block(0, 0, ech.rank, int(pdim));
        // Row (u, r): row r of f_m for the unit cochain u.
        Mat rows(k, unknowns * n.dim(m), int(pdim));
        for (std::size_t s = 0; s < top.proj.objects.size(); ++s) {
            const int j = top.proj.objects[s];
            if (n.dim(j) == 0) continue;
            const long long col0 = top.proj.offset(int(s), m);
            for (long long phi = 0; phi < cat.hom_count(j, m); ++phi) {
                Mat a = n.act(cat.decode(j, m, phi));
                for (int r = 0; r < n.dim(m); ++r)
                    for (int c = 0; c < n.dim(j); ++c)
                        if (Elem x = a.get(r, c)) rows.set((off[s] + c) * n.dim(m) + r, int(col0 + phi), x);
            }
        }
        // Reduce against the reduced row echelon basis of the row space.
        if (ech.rank > 0) rows = rows - rows.select_cols(ech.pivots) * basis;
        // Condition matrix for this object: for each r, Σ_u c_u residue(u, r) = 0.
        for (int r = 0; r < n.dim(m); ++r) {
            std::vector<int> pick;
            for (int u = 0; u < unknowns; ++u) pick.push_back(u * n.dim(m) + r);
            conditions.push_back(rows.select_rows(pick).transpose());
        }
    }
    if (conditions.empty()) return unknowns;
    Mat all = conditions[0];
    for (std::size_t t = 1; t < conditions.size(); ++t) all = all.vstack(conditions[t]);
    return unknowns - all.rank();
}

namespace {

std::string trunc_tag(const TruncCat& cat) {
    return "q=" + std::to_string(cat.q()) + ",N=" + std::to_string(cat.N());
}

// Size of the linear system solved by cat_hom, in entries.
long long hom_system_size(const CatModule& a, const CatModule& b) {
    long long unknowns = 0, rows = 0;
    const auto& cat = *a.cat();
    for (int m = 0; m <= cat.N(); ++m) {
        unknowns += (long long)a.dim(m) * b.dim(m);
        for (const auto& g : cat.generators(m)) rows += (long long)b.dim(g.target) * a.dim(m);
    }
    return unknowns * rows;
}

}  // namespace

GradedDims cat_ext(const CatModule& m, const CatModule& n, int max_degree, const CatOptions& opt) {
    GradedDims g;
    const std::string tag = trunc_tag(*m.cat());
    if (max_degree == 0) {
        g.dims = {(long long)cat_hom(m, n).size()};
        g.certificate = "exact (direct Hom, " + tag + ")";
        return g;
    }
    if (opt.top_by_rowspace) {
        auto res = cat_resolve(m, max_degree, opt);
        if (!res.certified()) throw std::logic_error("truncated-category resolution failed its rank certificate");
        auto c = cat_hom_complex(res, n, max_degree - 1);
        g.dims = cat_cohomology_dims(c);
        const long long below = c.delta.back().rank();
        g.dims.push_back(cat_top_cocycles(res, m, n, opt) - below);
    } else {
        auto res = cat_resolve(m, max_degree + 1, opt);
        if (!res.certified()) throw std::logic_error("truncated-category resolution failed its rank certificate");
        g.dims = cat_cohomology_dims(cat_hom_complex(res, n, max_degree));
    }
    std::string cross;
    if (hom_system_size(m, n) <= (1LL << 32)) {
        long long h0 = (long long)cat_hom(m, n).size();
        if (h0 != g.dims[0]) throw std::logic_error("degree 0 disagrees with the direct Hom solver");
        cross = ", degree 0 cross-checked";
    }
    g.certificate = "exact (" + tag + cross + ")";
    return g;
}

GradedDims cat_tor(const CatModule& x, const CatModule& b, int max_degree, const CatOptions& opt) {
    const auto& cat = *x.cat();
    const auto& k = b.field();
    auto res = cat_resolve(cat_kuhn_dual(x), max_degree + 1, opt);
    if (!res.certified()) throw std::logic_error("truncated-category resolution failed its rank certificate");
    // C_i = ⊕ B(j_s); the term c·e_ψ of d g_t, ψ: j_s -> j_t, contributes
    // c·B(ψ^T): B(j_t) -> B(j_s).
    std::vector<int> dims;
    std::vector<std::vector<int>> offsets;
    for (int i = 0; i <= max_degree + 1; ++i) {
        std::vector<int> off;
        int d = 0;
        for (int j : res.steps[i].proj.objects) {
            off.push_back(d);
            d += b.dim(j);
        }
        dims.push_back(d);
        offsets.push_back(std::move(off));
    }
    std::vector<long long> ranks;  // ranks[i] = rank of ∂_{i+1}: C_{i+1} -> C_i
    for (int i = 0; i <= max_degree; ++i) {
        const auto& src = res.steps[i].proj;
        const auto& st = res.steps[i + 1];
        Mat dd(k, dims[i], dims[i + 1]);
        for (std::size_t t = 0; t < st.proj.objects.size(); ++t) {
            const int jt = st.proj.objects[t];
            const Vec& y = st.images[t];
            for (std::size_t s = 0; s < src.objects.size(); ++s) {
                const int js = src.objects[s];
                if (b.dim(js) == 0 || b.dim(jt) == 0) continue;
                const long long off = src.offset(int(s), jt);
                Mat block(k, b.dim(js), b.dim(jt));
                bool any = false;
                for (long long u = 0; u < cat.hom_count(js, jt); ++u)
                    if (Elem cf = y.get(int(off + u))) {
                        block.axpy(cf, b.act(cat.decode(js, jt, u).transpose()));
                        any = true;
                    }
                if (any) dd.set_block(offsets[i][s], offsets[i + 1][t], block);
            }
        }
        ranks.push_back(dd.rank());
    }
    GradedDims g;
    for (int i = 0; i <= max_degree; ++i) g.dims.push_back(dims[i] - (i > 0 ? ranks[i - 1] : 0) - ranks[i]);
    g.certificate = "exact (" + trunc_tag(cat) + ", Tor chain)";
    return g;
}

CatRecipe functor_recipe(const Expr& e, const FieldPtr& k) {
    return [e, k](const CatPtr& cat) { return restrict_functor(e, cat, k); };
}

std::string StabilizationReport::certificate(int degree) const {
    if (truncations.empty()) return "no truncations";
    std::string span = "N=" + std::to_string(truncations.front()) + ".." + std::to_string(truncations.back());
    if (degree < 0 || degree >= int(stable.size())) return "degree not computed";
    return stable[degree] ? "stable over " + span : "not yet stable over " + span;
}

StabilizationReport stabilization_scan(const CatRecipe& m, const CatRecipe& n, int q, int max_degree,
                                       const std::vector<int>& truncations, const CatOptions& opt) {
    StabilizationReport rep;
    for (int N : truncations) {
        auto cat = std::make_shared<const TruncCat>(q, N);
        rep.tables.push_back(cat_ext(m(cat), n(cat), max_degree, opt));
        rep.truncations.push_back(N);
    }
    for (int i = 0; i <= max_degree; ++i) {
        std::size_t t = rep.tables.size();
        rep.stable.push_back(t >= 2 && rep.tables[t - 1].at(i) == rep.tables[t - 2].at(i));
    }
    return rep;
}

}  // namespace spfh
