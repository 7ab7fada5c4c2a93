#include "spfh/compare.hpp"

#include <random>
#include <stdexcept>

#include "spfh/parallel.hpp"

namespace spfh {

bool ComparisonReport::contradiction() const {
    for (const auto& r : rows)
        if (r.contradiction()) return true;
    return false;
}

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Offset of every block of w inside the restriction to object m, -1 when
// the block is not supported on the first m coordinates.
std::vector<int> restricted_offsets(const WeightedModule& w, int m) {
    std::vector<int> out(w.num_blocks(), -1);
    int off = 0;
    for (int b : supported_blocks(w, m)) {
        out[b] = off;
        off += w.block_dim(b);
    }
    return out;
}

int restricted_dim(const WeightedModule& w, int m) {
    int d = 0;
    for (int b : supported_blocks(w, m)) d += w.block_dim(b);
    return d;
}

// A module map restricted to object m.
Mat restricted_map(const ModuleMap& f, int m) {
    const auto& src = f.source();
    const auto& dst = f.target();
    auto so = restricted_offsets(src, m), to = restricted_offsets(dst, m);
    Mat out(src.field(), restricted_dim(dst, m), restricted_dim(src, m));
    for (int b = 0; b < src.num_blocks(); ++b) {
        if (so[b] < 0) continue;
        const int tb = f.target_block(b);
        if (tb < 0 || src.block_dim(b) == 0 || dst.block_dim(tb) == 0) continue;
        out.set_block(to[tb], so[b], f.block(b));
    }
    return out;
}

HomComplex as_hom_complex(const CatHomComplex& c) { return HomComplex{c.dims, c.offsets, c.delta}; }

// The strict polynomial side and the category side of one comparison.
struct Sides {
    std::shared_ptr<const WeightedModule> wf;  // F at the twist level, rank n
    std::shared_ptr<const WeightedModule> wc;  // coefficients at the twist level
    CatPtr cat;
    CatModule target;          // coefficients of the category side
    std::vector<Mat> push;     // natural map t*wc -> target, per object
};

struct CoreResult {
    std::vector<long long> source, target, rank;
    std::vector<Mat> cochain_maps;  // degree i: Hom(P_i, wc) -> Hom(Q_i, target)
    HomComplex source_complex, cat_complex;
    bool degree0_crosschecked = false;
};

// Degree 0 through module maps restricted objectwise.
std::pair<long long, long long> direct_degree0(const Sides& sd, long long* target_dim) {
    const auto& cat = *sd.cat;
    auto tf = restrict_module(*sd.wf, sd.cat);
    auto maps = hom_space(*sd.wf, *sd.wc);
    const auto& k = sd.wf->field();
    std::vector<Vec> flat;
    for (const auto& c : maps) {
        CatMap cm;
        for (int m = 0; m <= cat.N(); ++m) cm.components.push_back(sd.push[m] * restricted_map(c, m));
        auto err = check_natural(tf, sd.target, cm);
        if (!err.empty()) throw std::logic_error("restricted module map is not natural: " + err);
        Vec v;
        bool first = true;
        for (const auto& x : cm.components)
            for (int col = 0; col < x.cols(); ++col) {
                if (first) {
                    v = x.col(col);
                    first = false;
                } else {
                    v = v.concat(x.col(col));
                }
            }
        flat.push_back(first ? Vec(k, 0) : v);
    }
    long long rank = 0;
    if (!flat.empty() && flat[0].size() > 0) rank = Mat::from_columns(k, flat[0].size(), flat).rank();
    *target_dim = (long long)cat_hom(tf, sd.target).size();
    return {(long long)maps.size(), rank};
}

CoreResult compare_core(const Sides& sd, int L, const CompareOptions& opt) {
    const auto& cat = *sd.cat;
    const auto& k = sd.wf->field();
    const int N = cat.N();
    CoreResult out;

    auto res = resolve(sd.wf, L + 1, opt.resolve);
    if (!res.certified()) throw std::logic_error("strict polynomial resolution failed its rank certificate");
    res.materialize(L);
    HomComplex hp = hom_complex(res, *sd.wc, L);
    out.source = cohomology_dims(hp);
    out.source_complex = hp;

    CatModule tf = restrict_module(*sd.wf, sd.cat);
    auto q = cat_resolve(tf, L + 1, opt.cat);
    if (!q.certified()) throw std::logic_error("category resolution failed its rank certificate");
    out.cat_complex = as_hom_complex(cat_hom_complex(q, sd.target, L));
    out.target = cohomology_dims(out.cat_complex);

    // t*P_i and the restricted differentials, objectwise.
    std::vector<CatModule> tp;
    std::vector<std::vector<Mat>> diff(L + 1);
    for (int i = 0; i <= L; ++i) {
        tp.push_back(restrict_module(res.module(i), sd.cat));
        for (int m = 0; m <= N; ++m) diff[i].push_back(restricted_map(*res.steps[i].diff, m));
    }

    std::mt19937_64 rng(opt.lift_seed);
    std::vector<std::vector<Mat>> kernels(L + 1, std::vector<Mat>(N + 1));
    auto solve = [&](int i, int m, const Vec& z) {
        const Mat& d = diff[i][m];
        auto x = d.solve(Mat::from_columns(k, z.size(), {z}));
        if (!x) throw std::logic_error("chain lift has no solution at degree " + std::to_string(i));
        Vec v = x->col(0);
        if (opt.lift_seed) {
            if (kernels[i][m].rows() == 0 && kernels[i][m].cols() == 0) kernels[i][m] = d.kernel();
            const Mat& ker = kernels[i][m];
            for (int c = 0; c < ker.cols(); ++c)
                if (Elem e = Elem(rng() % k->q())) v.axpy(e, ker.col(c));
        }
        return v;
    };

    // lifts[i][s]: image in t*P_i(j_s) of generator s of Q_i.
    std::vector<std::vector<Vec>> lifts(L + 1);
    for (int i = 0; i <= L; ++i) {
        const auto& st = q.steps[i];
        for (std::size_t s = 0; s < st.proj.objects.size(); ++s) {
            const int j = st.proj.objects[s];
            Vec z;
            if (i == 0) {
                z = st.images[s];
            } else {
                const auto& prev = q.steps[i - 1].proj;
                z = Vec(k, tp[i - 1].dim(j));
                const Vec& y = st.images[s];
                for (std::size_t t = 0; t < prev.objects.size(); ++t) {
                    const int jt = prev.objects[t];
                    const long long off = prev.offset(int(t), j);
                    for (long long x = 0; x < cat.hom_count(jt, j); ++x)
                        if (Elem c = y.get(int(off + x)))
                            z.axpy(c, tp[i - 1].act(cat.decode(jt, j, x), lifts[i - 1][t]));
                }
            }
            lifts[i].push_back(solve(i, j, z));
        }
    }

    // Cochain maps: for each generator s of Q_i, evaluate cocycles of
    // Hom(P_i, wc) on its lift, then push forward into target(j_s).
    for (int i = 0; i <= L; ++i) {
        const auto& st = q.steps[i];
        const auto& P = res.module(i);
        const GammaSum& gs = res.steps[i].proj;
        WordCache words(*sd.wc);
        Mat t(k, out.cat_complex.dims[i], hp.dims[i]);
        for (std::size_t s = 0; s < st.proj.objects.size(); ++s) {
            const int j = st.proj.objects[s];
            if (sd.target.dim(j) == 0) continue;
            auto po = restricted_offsets(P, j);
            auto co = restricted_offsets(*sd.wc, j);
            std::vector<std::pair<int, Vec>> xs;
            std::vector<int> rows, place;
            for (int b = 0; b < P.num_blocks(); ++b) {
                if (po[b] < 0 || P.block_dim(b) == 0) continue;
                Vec xb = lifts[i][s].slice(po[b], P.block_dim(b));
                if (xb.is_zero()) continue;
                auto cb = sd.wc->find_block(P.weight(b));
                if (!cb || sd.wc->block_dim(*cb) == 0) continue;
                xs.emplace_back(b, std::move(xb));
                rows.push_back(sd.wc->block_dim(*cb));
                place.push_back(co[*cb]);
            }
            if (xs.empty()) continue;
            Mat ev = evaluation_matrix(gs, words, xs, rows);
            Mat inwc(k, restricted_dim(*sd.wc, j), hp.dims[i]);
            int r0 = 0;
            for (std::size_t u = 0; u < xs.size(); ++u) {
                inwc.add_block(place[u], 0, ev.block(r0, 0, rows[u], hp.dims[i]));
                r0 += rows[u];
            }
            t.set_block(out.cat_complex.offsets[i][s], 0, sd.push[j] * inwc);
        }
        out.rank.push_back(induced_rank(hp, out.cat_complex, t, i));
        out.cochain_maps.push_back(std::move(t));
    }
    return out;
}

// Builds both sides. f_expr and c_expr are the strict polynomial functors
// before the twist level; component < 0 keeps all of c_expr, otherwise the
// homogeneous component of that degree (after twisting) is used.
struct SideSpec {
    Expr f_expr, c_expr;
    int component = -1;
    // Evaluation-order map c_expr(k^m) -> G(k^m) over F_q, per m; empty for
    // the identity (strong map).
    std::function<Mat(int m)> push_eval;
};

Sides build_sides(const SideSpec& spec, const Expr& g, int q, int N, int level, int rank_n) {
    const FieldPtr k = Field::of_order(q);
    Sides sd;
    sd.cat = std::make_shared<const TruncCat>(q, N);
    Expr fe = level > 0 ? Expr::twist(spec.f_expr, level) : spec.f_expr;
    Expr ce = level > 0 ? Expr::twist(spec.c_expr, level) : spec.c_expr;
    sd.wf = std::make_shared<WeightedModule>(eval(fe, rank_n, k));
    auto wfull = std::make_shared<WeightedModule>(eval(ce, rank_n, k));
    sd.wc = spec.component < 0 ? wfull : std::make_shared<WeightedModule>(wfull->component(spec.component));
    sd.target = restrict_functor(g, sd.cat, k);
    for (int m = 0; m <= N; ++m) {
        // t*wc(m) in restricted coordinates -> eval order of ce(k^m).
        auto pos = restriction_positions(ce, *wfull, m);
        const int full_dim = restricted_dim(*wfull, m);
        Mat to_eval(k, int(pos.size()), full_dim);
        for (int x = 0; x < int(pos.size()); ++x) to_eval.set(x, pos[x], 1);
        // Columns of the component inside the full restriction.
        std::vector<int> cols;
        auto off = restricted_offsets(*wfull, m);
        for (int b : supported_blocks(*wfull, m))
            if (spec.component < 0 || weight_degree(wfull->weight(b)) == spec.component)
                for (int x = 0; x < wfull->block_dim(b); ++x) cols.push_back(off[b] + x);
        Mat comp = to_eval.select_cols(cols);
        sd.push.push_back(spec.push_eval ? spec.push_eval(m) * comp : comp);
    }
    // The push-forward must be natural from t*wc to t*G.
    CatModule twc = restrict_module(*sd.wc, sd.cat);
    auto err = check_natural(twc, sd.target, CatMap{sd.push});
    if (!err.empty()) throw std::logic_error("coefficient identification is not natural: " + err);
    return sd;
}

std::string verdict_of(long long source, long long target, long long rank) {
    if (rank == source && rank == target) return "iso";
    if (rank == source) return "not surjective";
    if (rank == target) return "not injective";
    return "neither";
}

int default_level(int p, int r, int L) {
    int level = 0;
    while (2 * ipow(p, level) <= L) level += r;
    return level;
}

struct RunResult {
    std::vector<long long> source, target, rank;
    bool crosschecked = false;
};

RunResult run_once(const SideSpec& spec, const Expr& g, int q, int N, int level, int rank_n,
                   const CompareOptions& opt) {
    Sides sd = build_sides(spec, g, q, N, level, rank_n);
    RunResult rr;
    long long t0 = 0;
    auto [s0, r0] = direct_degree0(sd, &t0);
    if (opt.max_degree == 0) {
        rr.source = {s0};
        rr.target = {t0};
        rr.rank = {r0};
        return rr;
    }
    auto core = compare_core(sd, opt.max_degree, opt);
    if (core.source[0] != s0 || core.target[0] != t0 || core.rank[0] != r0)
        throw std::logic_error("degree 0 of the chain-level comparison disagrees with the direct one");
    rr.source = core.source;
    rr.target = core.target;
    rr.rank = core.rank;
    rr.crosschecked = true;
    return rr;
}

ComparisonReport run_comparison(const std::string& map, const SideSpec& spec, const Expr& f, const Expr& g, int q,
                                int s, int N, int fdeg_before_level, int pred_bound, const CompareOptions& opt) {
    const FieldPtr fq = Field::of_order(q);
    const int p = fq->p(), r = fq->r();
    const int L = opt.max_degree;
    ComparisonReport rep;
    rep.map = map;
    rep.f = f.str();
    rep.g = g.str();
    rep.q = q;
    rep.r = r;
    rep.s = s;
    rep.N = N;
    rep.twist_level = opt.twist_level >= 0 ? opt.twist_level : default_level(p, r, L);
    if (rep.twist_level % r != 0)
        throw std::invalid_argument("twist level must be a multiple of r so that t*F^(n) = t*F");
    auto rank_for = [&](int level) {
        const int D = std::max(fdeg_before_level * int(ipow(p, level)), 1);
        return std::max(N, D);
    };
    rep.rank_n = rank_for(rep.twist_level);

    SideSpec sp = spec;
    auto with_level = [&](int level) {
        SideSpec t = sp;
        if (t.component >= 0) t.component = int(spec.component * ipow(p, level));
        return t;
    };
    RunResult main = run_once(with_level(rep.twist_level), g, q, N, rep.twist_level, rep.rank_n, opt);

    std::string level_note = "twist level " + std::to_string(rep.twist_level);
    if (opt.verify_next_level) {
        const int next = rep.twist_level + r;
        try {
            RunResult again = run_once(with_level(next), g, q, N, next, rank_for(next), opt);
            level_note += again.source == main.source && again.rank == main.rank
                              ? ", unchanged at " + std::to_string(next)
                              : ", CHANGED at " + std::to_string(next);
        } catch (const ResourceCapExceeded&) {
            level_note += ", level " + std::to_string(next) + " over caps";
        }
    }

    std::vector<long long> next_target;
    std::string stab_note = "unchecked";
    if (opt.check_stability) {
        try {
            auto c2 = std::make_shared<const TruncCat>(q, N + 1);
            next_target = cat_ext(restrict_functor(f, c2, fq), restrict_functor(g, c2, fq), L, opt.cat).dims;
        } catch (const ResourceCapExceeded&) {
        }
    }
    // The target recomputed from t*F and t*G directly.
    auto c1 = std::make_shared<const TruncCat>(q, N);
    auto direct_target = cat_ext(restrict_functor(f, c1, fq), restrict_functor(g, c1, fq), L, opt.cat).dims;

    const int maxdeg = std::max(f.max_degree(p), g.max_degree(p));
    for (int i = 0; i <= L; ++i) {
        ComparisonRow row;
        row.degree = i;
        row.source = main.source[i];
        row.target = main.target[i];
        row.rank = main.rank[i];
        if (direct_target[i] != row.target)
            throw std::logic_error("comparison target disagrees with the directly restricted functors");
        row.verdict = verdict_of(row.source, row.target, row.rank);
        row.predicted_iso = maxdeg < pred_bound;
        if (!next_target.empty())
            row.stability = next_target[i] == row.target
                                ? "stable N=" + std::to_string(N) + ".." + std::to_string(N + 1)
                                : "unstable N=" + std::to_string(N) + ".." + std::to_string(N + 1);
        row.certificate = "exact rank (q=" + std::to_string(q) + ",N=" + std::to_string(N) + ", " + level_note +
                          (main.crosschecked ? ", degree 0 cross-checked" : "") + ")";
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

Mat fold_eval(const Expr& g, int copies, int m, const FieldPtr& k) {
    Mat fold(k, m, copies * m);
    for (int c = 0; c < copies; ++c)
        for (int i = 0; i < m; ++i) fold.set(i, c * m + i, 1);
    return apply(g, fold);
}

}  // namespace

ComparisonReport strong_phi(const Expr& f, const Expr& g, int q, int N, const CompareOptions& opt) {
    const FieldPtr fq = Field::of_order(q);
    SideSpec spec{f, g, -1, nullptr};
    return run_comparison("strong", spec, f, g, q, 1, N, f.max_degree(fq->p()), q, opt);
}

ComparisonReport gen_comp_map(const Expr& f, const Expr& g, int q, int s, int N, const CompareOptions& opt) {
    if (s < 1) throw std::invalid_argument("s must be positive");
    const FieldPtr fq = Field::of_order(q);
    const int p = fq->p(), r = fq->r();
    if (!f.homogeneous(p)) throw std::invalid_argument("gen_comp_map expects a homogeneous F");
    Expr fs = r * s - r > 0 ? Expr::twist(f, r * s - r) : f;
    Expr gs = Expr::multitwist(g, r, s * s);
    const int D = fs.max_degree(p);
    SideSpec spec{fs, gs, D, [g, s, fq](int m) { return fold_eval(g, s * s, m, fq); }};
    // Report which components of G^(r|s^2) exist and which one pairs.
    std::string comps = "F-side degree " + std::to_string(D) + "; G-side degrees";
    bool present = false;
    for (int d : gs.degrees(p)) {
        comps += " " + std::to_string(d);
        present = present || d == D;
    }
    comps += present ? "; matched component " + std::to_string(D) : "; no matching component";
    long long bound = ipow(q, s);
    auto rep = run_comparison("generalized-second-form", spec, f, g, q, s, N, D, int(std::min<long long>(bound, 1 << 30)),
                              opt);
    rep.components = comps;
    return rep;
}

bool lift_independent(const Expr& f, const Expr& g, int q, int N, int max_degree, unsigned seed_a, unsigned seed_b) {
    const FieldPtr fq = Field::of_order(q);
    const int p = fq->p(), r = fq->r();
    CompareOptions oa, ob;
    oa.max_degree = ob.max_degree = max_degree;
    oa.lift_seed = seed_a;
    ob.lift_seed = seed_b;
    const int level = default_level(p, r, max_degree);
    const int rank_n = std::max(N, std::max(1, f.max_degree(p) * int(ipow(p, level))));
    SideSpec spec{f, g, -1, nullptr};
    Sides sd = build_sides(spec, g, q, N, level, rank_n);
    auto a = compare_core(sd, max_degree, oa);
    auto b = compare_core(sd, max_degree, ob);
    // Both lifts are built against the same deterministic resolutions, so
    // their cochain maps share source and target; on cocycles their
    // difference must be a coboundary.
    for (int i = 0; i <= max_degree; ++i) {
        Mat z = a.source_complex.delta[i].kernel();
        Mat d = (a.cochain_maps[i] - b.cochain_maps[i]) * z;
        if (i == 0) {
            if (!d.is_zero()) return false;
            continue;
        }
        const Mat& bd = a.cat_complex.delta[i - 1];
        if (joint_rank(d, bd) != bd.rank()) return false;
    }
    return true;
}

std::vector<SuiteInstance> default_verdict_config() {
    return {
        {"strong", "div(2)", "sym(2)", 4, 1, 2, 0},
        {"strong", "sym(1)", "sym(2)", 2, 1, 2, 0},
        {"strong", "id", "ext(2)", 4, 1, 2, 0},
    };
}

std::vector<ComparisonReport> verdict_suite(const std::vector<SuiteInstance>& config, int workers) {
    std::vector<ComparisonReport> out(config.size());
    if (workers > 0) set_worker_budget(workers);
    parallel_for(int(config.size()), [&](int i) {
        const auto& c = config[i];
        CompareOptions opt;
        opt.max_degree = c.max_degree;
        Expr f = parse_expr(c.f), g = parse_expr(c.g);
        if (c.map == "strong")
            out[i] = strong_phi(f, g, c.q, c.N, opt);
        else if (c.map == "generalized-second-form")
            out[i] = gen_comp_map(f, g, c.q, c.s, c.N, opt);
        else
            throw std::invalid_argument("unknown comparison map " + c.map);
    });
    return out;
}

}  // namespace spfh
