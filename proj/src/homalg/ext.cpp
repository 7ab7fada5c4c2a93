#include <map>
#include <stdexcept>

#include "spfh/homalg.hpp"
#include "spfh/parallel.hpp"

namespace spfh {

const std::vector<Mat>& WordCache::get(const GammaRecipe& r) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(r.lambda);
        if (it != cache_.end()) return it->second;
    }
    auto w = word_matrices(r, *n_);
    std::lock_guard lock(mutex_);
    return cache_.emplace(r.lambda, std::move(w)).first->second;
}

Mat evaluation_matrix(const GammaSum& p, WordCache& words, const std::vector<std::pair<int, Vec>>& xs,
                      const std::vector<int>& row_dims) {
    const WeightedModule& n = words.target();
    const auto& f = n.field();
    std::vector<int> col_off(p.summands.size() + 1, 0);
    for (std::size_t c = 0; c < p.summands.size(); ++c)
        col_off[c + 1] = col_off[c] + n.block_dim_of(p.summands[c]);
    std::vector<int> row_off(xs.size() + 1, 0);
    for (std::size_t b = 0; b < xs.size(); ++b) row_off[b + 1] = row_off[b] + row_dims[b];

    // Warm the cache for every summand before the parallel loop.
    parallel_for(int(p.summands.size()), [&](int c) {
        if (col_off[c + 1] > col_off[c]) words.get(*p.recipes[c]);
    });

    std::vector<std::vector<std::pair<int, Mat>>> pieces(xs.size());
    parallel_for(int(xs.size()), [&](int b) {
        const auto& [pb, x] = xs[b];
        if (pb < 0 || row_dims[b] == 0) return;
        if (n.block_dim_of(p.block_weights[pb]) != row_dims[b])
            throw std::logic_error("evaluation rows do not match the coefficient module");
        for (std::size_t k = 0; k < p.parts[pb].size(); ++k) {
            auto [c, rb] = p.parts[pb][k];
            int width = col_off[c + 1] - col_off[c];
            if (width == 0) continue;
            const GammaRecipe& r = *p.recipes[c];
            Vec xc = x.slice(p.part_offsets[pb][k], r.module->block_dim(rb));
            if (xc.is_zero()) continue;
            Vec y = r.block_inverse[rb] * xc;
            const auto& w = words.get(r);
            Mat acc(f, row_dims[b], width);
            const auto& ids = r.block_words[rb];
            for (int j = 0; j < int(ids.size()); ++j)
                if (Elem e = y.get(j)) acc.axpy(e, w[ids[j]]);
            pieces[b].push_back({int(c), std::move(acc)});
        }
    });
    Mat out(f, row_off.back(), col_off.back());
    for (std::size_t b = 0; b < xs.size(); ++b)
        for (auto& [c, m] : pieces[b]) out.set_block(row_off[b], col_off[c], m);
    return out;
}

HomComplex hom_complex(const Resolution& res, const WeightedModule& n, int max_degree) {
    if (res.length() < max_degree + 1) throw std::invalid_argument("resolution too short for the requested degrees");
    HomComplex c;
    for (int i = 0; i <= max_degree + 1; ++i) {
        std::vector<int> offs{0};
        for (const auto& w : res.steps[i].proj.summands) offs.push_back(offs.back() + n.block_dim_of(w));
        c.dims.push_back(offs.back());
        c.offsets.push_back(std::move(offs));
    }
    WordCache words(n);
    for (int i = 0; i <= max_degree; ++i) {
        std::vector<int> rows;
        for (const auto& w : res.steps[i + 1].proj.summands) rows.push_back(n.block_dim_of(w));
        c.delta.push_back(evaluation_matrix(res.steps[i].proj, words, res.steps[i + 1].images, rows));
    }
    return c;
}

std::vector<long long> cohomology_dims(const HomComplex& c) {
    std::vector<long long> out;
    int prev_rank = 0;
    for (std::size_t i = 0; i < c.delta.size(); ++i) {
        int r = c.delta[i].rank();
        out.push_back(c.dims[i] - r - prev_rank);
        prev_rank = r;
    }
    return out;
}

Mat cohomology_basis(const HomComplex& c, int i) {
    const auto& f = c.delta[i].field();
    Mat z = c.delta[i].kernel();
    Echelon span(f, c.dims[i]);
    if (i > 0) {
        const Mat& d = c.delta[i - 1];
        for (int j = 0; j < d.cols(); ++j) span.insert(d.col(j));
    }
    std::vector<Vec> reps;
    for (int j = 0; j < z.cols(); ++j) {
        Vec v = z.col(j);
        if (span.insert(v)) reps.push_back(v);
    }
    return Mat::from_columns(f, c.dims[i], reps);
}

GradedDims ext(const Resolution& res, const WeightedModule& n, int max_degree) {
    if (!res.certified()) throw std::logic_error("resolution failed its exactness certificate");
    GradedDims g;
    g.dims = cohomology_dims(hom_complex(res, n, max_degree));
    g.certificate = "exact";
    return g;
}

GradedDims ext(const WeightedModule& m, const WeightedModule& n, int max_degree, const ResolveOptions& opt) {
    auto res = resolve(std::make_shared<WeightedModule>(m), max_degree + 1, opt);
    return ext(res, n, max_degree);
}

std::vector<ModuleMap> hom_space(const WeightedModule& m, const WeightedModule& n) {
    const auto& f = m.field();
    // Unknown X_b : m_b -> n_b, stored row-major from var_off[b].
    std::vector<int> var_off(m.num_blocks() + 1, 0), nblk(m.num_blocks(), -1);
    for (int b = 0; b < m.num_blocks(); ++b) {
        if (auto t = n.find_block(m.weight(b))) nblk[b] = *t;
        int size = nblk[b] >= 0 ? n.block_dim(nblk[b]) * m.block_dim(b) : 0;
        var_off[b + 1] = var_off[b] + size;
    }
    const int vars = var_off.back();
    std::vector<ModuleMap> out;
    if (vars == 0) return out;

    Echelon eqs(f, vars);
    const auto ops = generating_ops(m.max_m() >= n.max_m() ? m : n);
    for (const OpId& op : ops)
        for (int b = 0; b < m.num_blocks(); ++b) {
            Weight w = m.weight(b);
            op.shift(w);
            if (w[op.i] < 0 || w[op.i + 1] < 0) continue;
            auto tn = n.find_block(w);
            if (!tn) continue;
            auto sm = m.find_block(w);
            const Mat* am = (sm && op.m <= m.max_m()) ? m.op(op, b) : nullptr;
            const Mat* an = (nblk[b] >= 0 && op.m <= n.max_m()) ? n.op(op, nblk[b]) : nullptr;
            int rows = n.block_dim(*tn), cols = m.block_dim(b);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) {
                    Vec eq(f, vars);
                    if (am && var_off[*sm + 1] > var_off[*sm]) {
                        int ds = m.block_dim(*sm);
                        for (int j = 0; j < ds; ++j)
                            if (Elem a = am->get(j, c)) eq.set(var_off[*sm] + r * ds + j, a);
                    }
                    if (an) {
                        int dn = n.block_dim(nblk[b]);
                        for (int j = 0; j < dn; ++j)
                            if (Elem a = an->get(r, j)) {
                                int v = var_off[b] + j * cols + c;
                                eq.set(v, f->sub(eq.get(v), a));
                            }
                    }
                    if (!eq.is_zero()) eqs.insert(std::move(eq));
                }
        }
    Mat sys = Mat::from_rows(f, vars, eqs.rows());
    Mat sol = eqs.dim() ? sys.kernel() : Mat::identity(f, vars);
    for (int k = 0; k < sol.cols(); ++k) {
        ModuleMap phi(&m, &n);
        for (int b = 0; b < m.num_blocks(); ++b) {
            if (nblk[b] < 0) continue;
            int rows = n.block_dim(nblk[b]), cols = m.block_dim(b);
            Mat x(f, rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c) x.set(r, c, sol.get(var_off[b] + r * cols + c, k));
            phi.set_block(b, std::move(x));
        }
        out.push_back(std::move(phi));
    }
    return out;
}

GradedDims tor_dual(const WeightedModule& e0, const WeightedModule& f, int max_degree, const ResolveOptions& opt) {
    GradedDims g = ext(kuhn_dual(e0), kuhn_dual(f), max_degree, opt);
    g.certificate = "exact";
    return g;
}

GradedDims tor(const Expr& e, const Expr& f, int n, const FieldPtr& field, int max_degree, const ResolveOptions& opt) {
    if (e.kind() != ExprKind::Contra) throw std::invalid_argument("tor expects a contravariant first argument cdual(E)");
    if (f.contravariant()) throw std::invalid_argument("tor expects a covariant second argument");
    return tor_dual(eval(e.child(), n, field), eval(f, n, field), max_degree, opt);
}

// ---------------------------------------------------------------- chain maps

ComplexView view_of(Resolution& res, int upto) {
    res.materialize(upto);
    ComplexView v;
    v.augmented = res.target.get();
    for (int i = 0; i <= upto; ++i) {
        v.modules.push_back(res.steps[i].proj.module.get());
        v.diffs.push_back(res.steps[i].diff.get());
    }
    return v;
}

namespace {

// Solves d(w_b) = z_b for every b, where z_b lies in the codomain block of
// d over the weight of T-block tb[b].
std::vector<std::pair<int, Vec>> solve_lifts(const ModuleMap& d, const WeightedModule& t,
                                             const std::vector<Weight>& weights,
                                             const std::vector<std::pair<int, Vec>>& z) {
    std::vector<std::pair<int, Vec>> out(z.size(), {-1, Vec()});
    std::map<int, std::vector<int>> by_block;
    for (std::size_t b = 0; b < z.size(); ++b) {
        if (z[b].first < 0 || z[b].second.is_zero()) continue;
        auto tb = t.find_block(weights[b]);
        if (!tb || d.target_block(*tb) < 0) throw std::logic_error("chain lift: no preimage for weight " + weight_str(weights[b]));
        by_block[*tb].push_back(int(b));
    }
    std::vector<std::pair<int, std::vector<int>>> jobs(by_block.begin(), by_block.end());
    parallel_for(int(jobs.size()), [&](int j) {
        auto& [tb, list] = jobs[j];
        const Mat& a = d.block(tb);
        std::vector<Vec> cols;
        for (int b : list) cols.push_back(z[b].second);
        auto x = a.solve(Mat::from_columns(a.field(), a.rows(), cols));
        if (!x) throw std::logic_error("chain lift: target complex is not exact at weight " + weight_str(t.weight(tb)));
        for (std::size_t k = 0; k < list.size(); ++k) out[list[k]] = {tb, x->col(int(k))};
    });
    return out;
}

}  // namespace

ChainLift chain_lift(Resolution& src, const ComplexView& tgt, const ModuleMap& f, int max_degree) {
    if (src.length() < max_degree) throw std::invalid_argument("source resolution too short for the chain lift");
    if (int(tgt.modules.size()) <= max_degree) throw std::invalid_argument("target complex too short for the chain lift");
    ChainLift lift;
    // Degree 0: lift f(ε γ_b) through T_0 -> M'.
    {
        const auto& s = src.steps[0];
        std::vector<std::pair<int, Vec>> z;
        for (const auto& [blk, v] : s.images) {
            int tb = f.target_block(blk);
            z.push_back(tb < 0 ? std::pair{-1, Vec()} : std::pair{tb, f.block(blk) * v});
        }
        lift.push_back(solve_lifts(*tgt.diffs[0], *tgt.modules[0], s.proj.summands, z));
    }
    for (int i = 1; i <= max_degree; ++i) {
        const GammaSum& q = src.steps[i - 1].proj;
        const WeightedModule& t = *tgt.modules[i - 1];
        const auto& prev = lift[i - 1];
        // Word images of each c_{i-1}(γ_c) inside T_{i-1}.
        std::vector<std::vector<Vec>> words(q.summands.size());
        parallel_for(int(q.summands.size()), [&](int c) {
            if (prev[c].first >= 0) words[c] = word_images(*q.recipes[c], t, prev[c].second);
        });
        const auto& s = src.steps[i];
        std::vector<std::pair<int, Vec>> z(s.images.size(), {-1, Vec()});
        parallel_for(int(s.images.size()), [&](int b) {
            const auto& [qb, x] = s.images[b];
            auto tb = t.find_block(q.block_weights[qb]);
            if (!tb) return;
            Vec acc(t.field(), t.block_dim(*tb));
            for (std::size_t k = 0; k < q.parts[qb].size(); ++k) {
                auto [c, rb] = q.parts[qb][k];
                if (words[c].empty()) continue;
                const GammaRecipe& r = *q.recipes[c];
                Vec xc = x.slice(q.part_offsets[qb][k], r.module->block_dim(rb));
                if (xc.is_zero()) continue;
                Vec y = r.block_inverse[rb] * xc;
                const auto& ids = r.block_words[rb];
                for (int j = 0; j < int(ids.size()); ++j)
                    if (Elem e = y.get(j)) acc.axpy(e, words[c][ids[j]]);
            }
            z[b] = {*tb, std::move(acc)};
        });
        lift.push_back(solve_lifts(*tgt.diffs[i], *tgt.modules[i], s.proj.summands, z));
    }
    return lift;
}

Mat induced_cochain_map(const GammaSum& tgt, WordCache& words, const std::vector<std::pair<int, Vec>>& gen_images,
                        const std::vector<Weight>& src_summands, const WeightedModule& src_coeffs) {
    std::vector<int> rows;
    for (const auto& w : src_summands) rows.push_back(src_coeffs.block_dim_of(w));
    return evaluation_matrix(tgt, words, gen_images, rows);
}

long long induced_rank(const HomComplex& a, const HomComplex& b, const Mat& t, int i) {
    Mat z = a.delta[i].kernel();
    Mat tz = t * z;
    if (!(b.delta[i] * tz).is_zero()) throw std::logic_error("induced map does not preserve cocycles");
    if (i == 0) return tz.rank();
    const Mat& bd = b.delta[i - 1];
    return joint_rank(tz, bd) - bd.rank();
}

}  // namespace spfh
