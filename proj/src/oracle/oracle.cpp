#include "spfh/oracle.hpp"

#include <stdexcept>

namespace spfh {

namespace {

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

GradedSpace zeros(int max_degree) { return GradedSpace{std::vector<long long>(max_degree + 1, 0)}; }

GradedSpace unit(int max_degree) {
    GradedSpace s = zeros(max_degree);
    s.dims[0] = 1;
    return s;
}

GradedSpace add(const GradedSpace& a, const GradedSpace& b) {
    GradedSpace out = a;
    for (int i = 0; i <= out.max_degree(); ++i) out.dims[i] += b.at(i);
    return out;
}

GradedSpace convolve(const GradedSpace& a, const GradedSpace& b) {
    GradedSpace out = zeros(a.max_degree());
    for (int i = 0; i <= a.max_degree(); ++i)
        for (int j = 0; i + j <= a.max_degree(); ++j) out.dims[i + j] += a.at(i) * b.at(j);
    return out;
}

// The twist V^(r) is graded by p^r times the degree, as forced by the
// Frobenius inclusion I^(r) -> S^(p^r).
GradedSpace regrade(const GradedSpace& v, long long scale) {
    GradedSpace out = zeros(v.max_degree());
    for (int j = 0; j <= v.max_degree() && j * scale <= v.max_degree(); ++j) out.dims[j * scale] += v.at(j);
    return out;
}

// Weight-truncated algebra on a graded space: each basis vector of degree j
// multiplies by 1/(1 - y x^j) (unbounded) or 1 + y x^j (exterior).
std::vector<GradedSpace> free_algebra(const GradedSpace& v, int max_weight, bool exterior) {
    const int M = v.max_degree();
    std::vector<GradedSpace> poly(max_weight + 1, zeros(M));
    poly[0].dims[0] = 1;
    for (int j = 0; j <= M; ++j)
        for (long long c = 0; c < v.at(j); ++c) {
            if (exterior) {
                for (int w = max_weight; w >= 1; --w)
                    for (int t = M; t >= j; --t) poly[w].dims[t] += poly[w - 1].dims[t - j];
            } else {
                for (int w = 1; w <= max_weight; ++w)
                    for (int t = j; t <= M; ++t) poly[w].dims[t] += poly[w - 1].dims[t - j];
            }
        }
    return poly;
}

enum class Algebra { Sym, Ext, Div };

struct SeriesShape {
    Algebra algebra;
    int s;
};

SeriesShape shape_of(FfssPair pair) {
    switch (pair) {
        case FfssPair::GS: return {Algebra::Sym, 0};
        case FfssPair::GL: return {Algebra::Ext, 1};
        case FfssPair::LS: return {Algebra::Ext, 0};
        case FfssPair::LL: return {Algebra::Div, 1};
        case FfssPair::SS: return {Algebra::Div, 0};
        case FfssPair::GG: return {Algebra::Div, 2};
    }
    throw std::invalid_argument("unknown pair");
}

SeriesShape shape_of(TorPair pair) {
    switch (pair) {
        case TorPair::GG: return {Algebra::Div, 0};
        case TorPair::LG: return {Algebra::Ext, 1};
        case TorPair::GL: return {Algebra::Ext, 0};
        case TorPair::LL: return {Algebra::Sym, 1};
        case TorPair::GS: return {Algebra::Sym, 0};
        case TorPair::SG: return {Algebra::Sym, 2};
    }
    throw std::invalid_argument("unknown pair");
}

TriGradedSeries build_series(SeriesShape shape, long long v_dim, int r, int p, int max_degree, int max_weight) {
    if (max_degree < 0 || max_weight < 0 || r < 0 || v_dim < 0)
        throw std::invalid_argument("series bounds must be nonnegative");
    TriGradedSeries out;
    out.p = p;
    out.r = r;
    out.max_degree = max_degree;
    out.max_weight = max_weight;
    const long long q = ipow(p, r);
    GradedSpace gens = zeros(max_degree);
    for (long long i = 0;; ++i) {
        long long deg = 2 * i * q + shape.s * (q - 1);
        if (deg > max_degree) break;
        gens.dims[deg] += v_dim;
    }
    out.by_weight = free_algebra(gens, max_weight, shape.algebra == Algebra::Ext);
    return out;
}

}  // namespace

GradedSpace GradedSpace::e_r(int p, int r, int max_degree) {
    GradedSpace s = zeros(max_degree);
    const long long q = ipow(p, r);
    for (long long i = 0; i < q && 2 * i <= max_degree; ++i) s.dims[2 * i] = 1;
    return s;
}

GradedSpace GradedSpace::e_infinity(int max_degree) {
    GradedSpace s = zeros(max_degree);
    for (int i = 0; i <= max_degree; i += 2) s.dims[i] = 1;
    return s;
}

GradedSpace GradedSpace::t_lm(int l, int m, int max_degree) {
    GradedSpace s = zeros(max_degree);
    for (int i = 0; i <= max_degree; i += 2) s.dims[i] = (long long)l * m;
    return s;
}

std::vector<GradedSpace> sym_algebra(const GradedSpace& v, int max_weight) {
    return free_algebra(v, max_weight, false);
}

std::vector<GradedSpace> ext_algebra(const GradedSpace& v, int max_weight) {
    return free_algebra(v, max_weight, true);
}

FfssPair parse_ffss_pair(const std::string& name) {
    if (name == "GS") return FfssPair::GS;
    if (name == "GL") return FfssPair::GL;
    if (name == "LS") return FfssPair::LS;
    if (name == "LL") return FfssPair::LL;
    if (name == "SS") return FfssPair::SS;
    if (name == "GG") return FfssPair::GG;
    throw std::invalid_argument("unknown Ext pair '" + name + "' (expected GS, GL, LS, LL, SS or GG)");
}

std::string ffss_pair_name(FfssPair pair) {
    switch (pair) {
        case FfssPair::GS: return "GS";
        case FfssPair::GL: return "GL";
        case FfssPair::LS: return "LS";
        case FfssPair::LL: return "LL";
        case FfssPair::SS: return "SS";
        case FfssPair::GG: return "GG";
    }
    return "?";
}

TorPair parse_tor_pair(const std::string& name) {
    if (name == "GG") return TorPair::GG;
    if (name == "LG") return TorPair::LG;
    if (name == "GL") return TorPair::GL;
    if (name == "LL") return TorPair::LL;
    if (name == "GS") return TorPair::GS;
    if (name == "SG") return TorPair::SG;
    throw std::invalid_argument("unknown Tor pair '" + name + "' (expected GG, LG, GL, LL, GS or SG)");
}

std::string tor_pair_name(TorPair pair) {
    switch (pair) {
        case TorPair::GG: return "GG";
        case TorPair::LG: return "LG";
        case TorPair::GL: return "GL";
        case TorPair::LL: return "LL";
        case TorPair::GS: return "GS";
        case TorPair::SG: return "SG";
    }
    return "?";
}

long long TriGradedSeries::param_weight(int twisted_weight) const { return twisted_weight * ipow(p, r); }

long long TriGradedSeries::dim(int degree, int twisted_weight, long long pw) const {
    if (twisted_weight < 0 || twisted_weight >= int(by_weight.size())) return 0;
    if (pw != param_weight(twisted_weight)) return 0;
    return by_weight[twisted_weight].at(degree);
}

TriGradedSeries ffss_series(FfssPair pair, long long v_dim, int r, int p, int max_degree, int max_weight) {
    return build_series(shape_of(pair), v_dim, r, p, max_degree, max_weight);
}

TriGradedSeries tor_series(TorPair pair, long long v_dim, int r, int p, int max_degree, int max_weight) {
    return build_series(shape_of(pair), v_dim, r, p, max_degree, max_weight);
}

TorTable relabel_tor(const TriGradedSeries& s) {
    TorTable out;
    for (int d = 0; d < int(s.by_weight.size()); ++d)
        for (int i = 0; i <= s.max_degree; ++i)
            if (long long x = s.by_weight[d].at(i)) out[{i, s.param_weight(d), d}] = x;
    return out;
}

std::map<std::tuple<int, int, long long>, long long> ext_table(const TriGradedSeries& s) {
    std::map<std::tuple<int, int, long long>, long long> out;
    for (int d = 0; d < int(s.by_weight.size()); ++d)
        for (int i = 0; i <= s.max_degree; ++i)
            if (long long x = s.by_weight[d].at(i)) out[{i, d, s.param_weight(d)}] = x;
    return out;
}

GradedSpace param_graded(const Expr& g, const GradedSpace& v, int p) {
    const int M = v.max_degree();
    switch (g.kind()) {
        case ExprKind::Id: return v;
        case ExprKind::Sym:
        case ExprKind::Div: return sym_algebra(v, g.arg())[g.arg()];
        case ExprKind::Ext: return ext_algebra(v, g.arg())[g.arg()];
        case ExprKind::Ten: {
            GradedSpace out = unit(M);
            for (int k = 0; k < g.arg(); ++k) out = convolve(out, v);
            return out;
        }
        case ExprKind::Twist: return param_graded(g.child(), regrade(v, ipow(p, g.arg())), p);
        case ExprKind::Kuhn: return param_graded(g.child(), v, p);
        case ExprKind::MultiTwist: {
            GradedSpace w = zeros(M);
            for (int k = 0; k < g.arg2(); ++k) w = add(w, regrade(v, ipow(p, k * g.arg())));
            return param_graded(g.child(), w, p);
        }
        case ExprKind::Param: {
            GradedSpace w = zeros(M);
            for (int i = 0; i < int(g.dims().size()) && i <= M; ++i) w.dims[i] = g.dims()[i];
            return param_graded(g.child(), convolve(w, v), p);
        }
        case ExprKind::Sum: {
            GradedSpace out = zeros(M);
            for (const auto& c : g.children()) out = add(out, param_graded(c, v, p));
            return out;
        }
        case ExprKind::Tensor: {
            GradedSpace out = unit(M);
            for (const auto& c : g.children()) out = convolve(out, param_graded(c, v, p));
            return out;
        }
        case ExprKind::Compose:
            return param_graded(g.children()[0], param_graded(g.children()[1], v, p), p);
        case ExprKind::Contra: break;
    }
    throw std::invalid_argument("parametrization grading is not supported for " + g.str());
}

GradedSpace e_infty_ext(const Expr& g, int max_degree, int p) {
    return param_graded(g, GradedSpace::e_infinity(max_degree), p);
}

WeightedModule grade_component(const WeightedModule& m, int grade) {
    if (m.grades().size() != std::size_t(m.dim())) throw std::invalid_argument("module carries no grades");
    WeightedModule out(m.field(), m.rank(), m.max_m());
    out.set_generators_only(m.generators_only());
    std::vector<std::vector<int>> keep(m.num_blocks());
    std::vector<int> kept(m.num_blocks(), -1);
    for (int b = 0; b < m.num_blocks(); ++b) {
        for (int k = 0; k < m.block_dim(b); ++k)
            if (m.grades()[m.block_offset(b) + k] == grade) keep[b].push_back(k);
        if (!keep[b].empty()) kept[b] = out.add_block(m.weight(b), int(keep[b].size()));
    }
    for (const OpId& op : m.op_ids())
        for (int b = 0; b < m.num_blocks(); ++b) {
            if (kept[b] < 0) continue;
            auto t = m.op_target(op, b);
            if (!t || kept[*t] < 0) continue;
            if (const Mat* a = m.op(op, b)) out.set_op(op, kept[b], a->select_rows(keep[*t]).select_cols(keep[b]));
        }
    out.set_grades(std::vector<int>(out.dim(), grade));
    return out;
}

GradedDims e_infty_ext_engine(const Expr& f, const Expr& g, int max_degree, const FieldPtr& field, int n,
                              const ResolveOptions& opt) {
    const int p = field->p();
    auto fd = f.degrees(p);
    if (fd.size() != 1) throw std::invalid_argument("first argument must be homogeneous: " + f.str());
    const int d = fd[0];
    const int rank = n > 0 ? n : std::max(d, 1);
    GradedSpace e = GradedSpace::e_infinity(max_degree);
    std::vector<int> edims(e.dims.begin(), e.dims.end());
    WeightedModule ge = eval(Expr::param(g, edims), rank, field);
    auto fm = eval_cached(f, rank, field);
    GradedDims out;
    out.dims.assign(max_degree + 1, 0);
    for (int j = 0; j <= max_degree; ++j) {
        WeightedModule piece = grade_component(ge, j).component(d);
        if (piece.dim() == 0) continue;
        auto x = ext(*fm, piece, max_degree - j, opt);
        for (int i = 0; i + j <= max_degree; ++i) out.dims[i + j] += x.at(i);
    }
    return out;
}

GradedSpace gl_exterior_homology(int d, int l, int m, int max_degree) {
    if (d < 0) throw std::invalid_argument("degree must be nonnegative");
    if (d % 2) return zeros(max_degree);
    return sym_algebra(GradedSpace::t_lm(l, m, max_degree), d / 2)[d / 2];
}

GenericResult gl_factor(const Expr& f, const Expr& g, int l, int m, int max_degree, const FieldPtr& field,
                        const GenericOptions& opt) {
    return generic_tor(Expr::contra(Expr::param(f, {l * m})), g, max_degree, field, opt);
}

GradedDims gl_exterior_homology_engine(int d, int l, int m, int max_degree, const FieldPtr& field, const GenericOptions& opt) {
    GenericOptions o = opt;
    o.align_twists = false;
    GradedDims out;
    out.dims.assign(max_degree + 1, 0);
    if (d == 0) {
        out.dims[0] = 1;
        return out;
    }
    // Λ^0 is the constant functor; it only pairs with itself.
    for (int i = 1; i < d; ++i) {
        auto x = gl_factor(Expr::ext(i), Expr::ext(d - i), l, m, max_degree, field, o);
        for (int k = 0; k <= max_degree; ++k) out.dims[k] += x.dims.at(k);
        if (x.pairs.empty()) continue;
        // Keep the weakest certificate: contradiction, then claimed.
        auto rank = [](const std::string& c) {
            return c.ends_with("contradiction") ? 0 : c.ends_with("claimed") ? 1 : 2;
        };
        if (out.certificate == "exact" || rank(x.cert.str()) < rank(out.certificate)) out.certificate = x.cert.str();
    }
    return out;
}

}  // namespace spfh
