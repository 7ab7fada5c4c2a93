#include "spfh/generic.hpp"

#include <deque>
#include <stdexcept>

namespace spfh {

std::string StableRangeCert::str() const {
    return "stable-range r=" + std::to_string(r) + " bound=" + std::to_string(bound) + " " + status;
}

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Homogeneous component of degree deg·p^twist of E^(twist) at k^n.
std::shared_ptr<const WeightedModule> component_module(const Expr& e, int twist, int deg, int n, const FieldPtr& f) {
    auto m = eval_cached(twist > 0 ? Expr::twist(e, twist) : e, n, f);
    const int d = int(deg * ipow(f->p(), twist));
    auto ds = m->degrees();
    if (ds.size() == 1 && ds[0] == d) return m;
    return std::make_shared<WeightedModule>(m->component(d));
}

int pair_degree(const MatchedPair& m, int p, int r) { return int(m.f_degree * ipow(p, m.f_twist + r)); }

void accumulate(GradedDims& acc, const GradedDims& x) {
    if (acc.dims.size() < x.dims.size()) acc.dims.resize(x.dims.size(), 0);
    for (std::size_t i = 0; i < x.dims.size(); ++i) acc.dims[i] += x.dims[i];
}

using PairFn = GradedDims (*)(const WeightedModule&, const WeightedModule&, int, const ResolveOptions&);

GradedDims ext_pair(const WeightedModule& m, const WeightedModule& n, int L, const ResolveOptions& opt) {
    return ext(m, n, L, opt);
}

// The second argument of the Tor path is the covariant side; the first is
// the functor under cdual.
GradedDims tor_pair(const WeightedModule& e0, const WeightedModule& g, int L, const ResolveOptions& opt) {
    return tor_dual(e0, g, L, opt);
}

struct LevelResult {
    GradedDims dims;
    int n = 0;
};

LevelResult at_level(const Expr& f, const Expr& g, const std::vector<MatchedPair>& pairs, int r, int L,
                     const FieldPtr& field, const GenericOptions& opt, PairFn fn) {
    const int p = field->p();
    LevelResult out;
    out.dims.dims.assign(L + 1, 0);
    for (const auto& mp : pairs) {
        const int D = pair_degree(mp, p, r);
        const int n = opt.n > 0 ? opt.n : std::max(D, 1);
        out.n = std::max(out.n, n);
        auto fm = component_module(f, mp.f_twist + r, mp.f_degree, n, field);
        auto gm = component_module(g, mp.g_twist + r, mp.g_degree, n, field);
        accumulate(out.dims, fn(*fm, *gm, L, opt.resolve));
    }
    return out;
}

GenericResult generic_impl(const Expr& f, const Expr& g, int L, const FieldPtr& field, const GenericOptions& opt,
                           PairFn fn) {
    if (L < 0) throw std::invalid_argument("max degree must be nonnegative");
    const int p = field->p();
    GenericResult res;
    res.pairs = match_components(f, g, p, opt.align_twists);
    res.cert.r = stable_twist_level(p, L);
    res.cert.bound = 2 * ipow(p, res.cert.r);
    auto lvl = at_level(f, g, res.pairs, res.cert.r, L, field, opt, fn);
    res.dims = lvl.dims;
    res.n = lvl.n;
    if (opt.verify) {
        try {
            auto next = at_level(f, g, res.pairs, res.cert.r + 1, L, field, opt, fn);
            res.cert.status = next.dims == res.dims ? "verified" : "contradiction";
        } catch (const ResourceCapExceeded&) {
            res.cert.status = "claimed";
        }
    }
    res.dims.certificate = res.cert.str();
    return res;
}

}  // namespace

int stable_twist_level(int p, int max_degree) {
    int r = 0;
    while (2 * ipow(p, r) <= max_degree) ++r;
    return r;
}

std::vector<MatchedPair> match_components(const Expr& f, const Expr& g, int p, bool align) {
    std::vector<MatchedPair> out;
    for (int df : f.degrees(p))
        for (int dg : g.degrees(p)) {
            if (df == dg) {
                out.push_back({df, dg, 0, 0});
                continue;
            }
            if (!align || df == 0 || dg == 0) continue;
            long long a = df, b = dg;
            int k = 0;
            while (a < b) a *= p, ++k;
            if (a == b) {
                out.push_back({df, dg, k, 0});
                continue;
            }
            a = df, k = 0;
            while (b < a) b *= p, ++k;
            if (a == b) out.push_back({df, dg, 0, k});
        }
    return out;
}

GradedDims ext_at_level(const Expr& f, int a, const Expr& g, int b, int max_degree, const FieldPtr& field, int n,
                        const ResolveOptions& opt) {
    const int p = field->p();
    GradedDims out;
    out.dims.assign(max_degree + 1, 0);
    for (int df : f.degrees(p))
        for (int dg : g.degrees(p)) {
            long long D = df * ipow(p, a);
            if (D != dg * ipow(p, b)) continue;
            int nn = n > 0 ? n : std::max<int>(int(D), 1);
            auto fm = component_module(f, a, df, nn, field);
            auto gm = component_module(g, b, dg, nn, field);
            accumulate(out, ext(*fm, *gm, max_degree, opt));
        }
    return out;
}

GenericResult generic_ext(const Expr& f, const Expr& g, int max_degree, const FieldPtr& field,
                          const GenericOptions& opt) {
    if (f.contravariant() || g.contravariant()) throw std::invalid_argument("generic ext expects covariant functors");
    return generic_impl(f, g, max_degree, field, opt, ext_pair);
}

GenericResult generic_tor(const Expr& e, const Expr& g, int max_degree, const FieldPtr& field,
                          const GenericOptions& opt) {
    if (e.kind() != ExprKind::Contra) throw std::invalid_argument("generic tor expects a contravariant first argument cdual(E)");
    if (g.contravariant()) throw std::invalid_argument("generic tor expects a covariant second argument");
    return generic_impl(e.child(), g, max_degree, field, opt, tor_pair);
}

TwistMapReport twist_map(const Expr& f, const Expr& g, int r, int max_degree, const FieldPtr& field,
                         const GenericOptions& opt) {
    if (r < 0 || max_degree < 0) throw std::invalid_argument("twist level and max degree must be nonnegative");
    const int p = field->p();
    const int L = max_degree;
    TwistMapReport rep;
    rep.r = r;
    rep.degrees.resize(L + 1);
    for (int i = 0; i <= L; ++i) rep.degrees[i].degree = i;

    for (const auto& mp : match_components(f, g, p, opt.align_twists)) {
        const int D1 = pair_degree(mp, p, r + 1);
        const int n = opt.n > 0 ? opt.n : std::max(D1, 1);
        rep.n = std::max(rep.n, n);
        auto M = component_module(f, mp.f_twist + r, mp.f_degree, n, field);
        auto N = component_module(g, mp.g_twist + r, mp.g_degree, n, field);
        auto M1 = component_module(f, mp.f_twist + r + 1, mp.f_degree, n, field);
        const int max_m = std::max(M1->max_m(), 1);
        WeightedModule TM = twist_module(*M, max_m);
        if (!(TM == *M1)) throw std::logic_error("twisted evaluation differs from the twist of the evaluation");
        WeightedModule N1 = twist_module(*N, std::max(max_m, N->max_m() * p));

        Resolution P = resolve(M, L + 1, opt.resolve);
        Resolution Q = resolve(M1, L + 1, opt.resolve);
        P.materialize(L);

        // T_i = P_i^(1) with the same differentials, an exact complex over M^(1).
        std::deque<WeightedModule> tmods;
        std::deque<ModuleMap> tdiffs;
        ComplexView view;
        view.augmented = &TM;
        for (int i = 0; i <= L; ++i) {
            tmods.push_back(twist_module(P.module(i), max_m));
            const WeightedModule* prev = i == 0 ? &TM : &tmods[i - 1];
            ModuleMap d(&tmods.back(), prev);
            const ModuleMap& pd = *P.steps[i].diff;
            for (int b = 0; b < tmods.back().num_blocks(); ++b)
                if (pd.target_block(b) >= 0) d.set_block(b, pd.block(b));
            tdiffs.push_back(std::move(d));
            view.modules.push_back(&tmods.back());
            view.diffs.push_back(&tdiffs.back());
        }
        ModuleMap ident(M1.get(), &TM);
        for (int b = 0; b < M1->num_blocks(); ++b) ident.set_block(b, Mat::identity(field, M1->block_dim(b)));
        ChainLift lift = chain_lift(Q, view, ident, L);

        HomComplex hp = hom_complex(P, *N, L), hq = hom_complex(Q, N1, L);
        auto src = cohomology_dims(hp), tgt = cohomology_dims(hq);
        WordCache words(*N);
        for (int i = 0; i <= L; ++i) {
            std::vector<int> rows;
            for (const auto& w : Q.steps[i].proj.summands) rows.push_back(N1.block_dim_of(w));
            Mat t = evaluation_matrix(P.steps[i].proj, words, lift[i], rows);
            rep.degrees[i].source += src[i];
            rep.degrees[i].target += tgt[i];
            rep.degrees[i].rank += induced_rank(hp, hq, t, i);
        }
    }
    return rep;
}

}  // namespace spfh
