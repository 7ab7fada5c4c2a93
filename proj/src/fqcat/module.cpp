#include <algorithm>
#include <random>
#include <stdexcept>

#include "spfh/fqcat.hpp"

namespace spfh {

CatModule::CatModule(CatPtr cat, FieldPtr k) : cat_(std::move(cat)), k_(std::move(k)) {
    if (!k_->contains(*cat_->fq()))
        throw std::invalid_argument("coefficient field " + k_->name() + " does not contain " + cat_->fq()->name());
    dims_.assign(cat_->N() + 1, 0);
    gens_.resize(cat_->N() + 1);
    for (int m = 0; m <= cat_->N(); ++m) gens_[m].resize(cat_->generators(m).size());
}

long long CatModule::total_dim() const {
    long long s = 0;
    for (int d : dims_) s += d;
    return s;
}

void CatModule::set_dims(std::vector<int> d) {
    if (int(d.size()) != cat_->N() + 1) throw std::invalid_argument("one dimension per object expected");
    dims_ = std::move(d);
}

Mat CatModule::act(const Mat& psi) const {
    const int a = psi.cols(), b = psi.rows();
    std::tuple<int, int, long long> key{a, b, cat_->encode(psi)};
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->maps.find(key);
        if (it != cache_->maps.end()) return it->second;
    }
    Mat m = Mat::identity(k_, dims_[a]);
    for (const auto& s : cat_->factor(psi)) m = gens_[s.object][s.index] * m;
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->maps.emplace(key, m);
    return m;
}

Vec CatModule::act(const Mat& psi, const Vec& v) const {
    Vec x = v;
    for (const auto& s : cat_->factor(psi)) x = gens_[s.object][s.index] * x;
    return x;
}

std::string CatModule::check_functorial(int samples, unsigned seed) const {
    const int N = cat_->N();
    for (int m = 0; m <= N; ++m)
        for (int g = 0; g < int(gens_[m].size()); ++g) {
            const auto& gen = cat_->generators(m)[g];
            const Mat& a = gens_[m][g];
            if (a.rows() != dims_[gen.target] || a.cols() != dims_[m])
                return "generator " + std::to_string(g) + " at object " + std::to_string(m) + " has the wrong shape";
        }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> obj(0, N);
    for (int t = 0; t < samples; ++t) {
        int a = obj(rng), b = obj(rng), c = obj(rng);
        Mat f = Mat::random(cat_->fq(), b, a, rng), g = Mat::random(cat_->fq(), c, b, rng);
        if (!(act(g * f) == act(g) * act(f)))
            return "functoriality fails on objects " + std::to_string(a) + " -> " + std::to_string(b) + " -> " +
                   std::to_string(c);
    }
    if (!(act(Mat::identity(cat_->fq(), N)) == Mat::identity(k_, dims_[N]))) return "identity does not act trivially";
    return {};
}

Mat embed_matrix(const Mat& over_fq, const FieldPtr& k) {
    const Field& src = *over_fq.field();
    Mat out(k, over_fq.rows(), over_fq.cols());
    for (int i = 0; i < over_fq.rows(); ++i)
        for (int j = 0; j < over_fq.cols(); ++j)
            if (Elem e = over_fq.get(i, j)) out.set(i, j, k->embed_from(src, e));
    return out;
}

CatModule build_proj(const CatPtr& cat, int j, const FieldPtr& k) {
    if (j < 0 || j > cat->N()) throw std::invalid_argument("projective index outside the category");
    CatModule out(cat, k);
    std::vector<int> dims;
    for (int m = 0; m <= cat->N(); ++m) {
        long long d = cat->hom_count(j, m);
        if (d > 1 << 14) throw ResourceCapExceeded("standard projective too large to store densely");
        dims.push_back(int(d));
    }
    out.set_dims(dims);
    for (int m = 0; m <= cat->N(); ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const auto& gen = cat->generators(m)[g];
            auto table = cat->vector_table(gen.matrix);
            Mat a(k, dims[gen.target], dims[m]);
            for (long long x = 0; x < dims[m]; ++x) a.set(int(cat->compose(table, j, m, gen.target, x)), int(x), 1);
            out.set_gen_action(m, g, std::move(a));
        }
    return out;
}

CatModule restrict_functor(const Expr& e, const CatPtr& cat, const FieldPtr& k) {
    if (e.contravariant()) throw std::invalid_argument("restriction expects a covariant functor");
    CatModule out(cat, k);
    std::vector<int> dims;
    for (int m = 0; m <= cat->N(); ++m) dims.push_back(int(functor_dim(e, m)));
    out.set_dims(dims);
    for (int m = 0; m <= cat->N(); ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const auto& gen = cat->generators(m)[g];
            Mat a = dims[m] == 0 || dims[gen.target] == 0 ? Mat(k, dims[gen.target], dims[m])
                                                           : apply(e, embed_matrix(gen.matrix, k));
            out.set_gen_action(m, g, std::move(a));
        }
    return out;
}

std::vector<int> supported_blocks(const WeightedModule& w, int m) {
    std::vector<int> out;
    for (int b = 0; b < w.num_blocks(); ++b) {
        const auto& wt = w.weight(b);
        bool ok = true;
        for (int j = m; j < int(wt.size()); ++j) ok = ok && wt[j] == 0;
        if (ok) out.push_back(b);
    }
    return out;
}

namespace {

// Matrix of e_i^(k) (or f_i^(k)) out of block b and its target block, or
// nullopt when it vanishes. Missing non-p-power degrees are rebuilt from
// the p-power ones: e^(k) = Π_t (e^(p^t))^(k_t) / k_t!.
std::optional<std::pair<int, Mat>> divided_power(const WeightedModule& w, int i, int k, bool raise, int b) {
    const auto& F = *w.field();
    if (w.has_op_degree(k)) {
        OpId op{i, k, raise};
        auto t = w.op_target(op, b);
        if (!t) return std::nullopt;
        const Mat* m = w.op(op, b);
        if (!m) return std::nullopt;
        return std::make_pair(*t, *m);
    }
    const int p = F.p();
    int cur = b;
    Mat acc = Mat::identity(w.field(), w.block_dim(b));
    Elem fact = 1;
    long long pp = 1;
    for (int rest = k; rest > 0; rest /= p, pp *= p) {
        int digit = rest % p;
        for (int u = 1; u <= digit; ++u) {
            OpId op{i, int(pp), raise};
            auto t = w.op_target(op, cur);
            if (!t) return std::nullopt;
            const Mat* m = w.op(op, cur);
            if (!m) return std::nullopt;
            acc = (*m) * acc;
            cur = *t;
            fact = F.mul(fact, F.from_int(u));
        }
    }
    return std::make_pair(cur, acc.scaled(F.inv(fact)));
}

}  // namespace

CatModule restrict_module(const WeightedModule& w, const CatPtr& cat) {
    const int N = cat->N();
    if (w.rank() < N) throw std::invalid_argument("restriction needs rank n >= N");
    const FieldPtr& k = w.field();
    CatModule out(cat, k);
    std::vector<std::vector<int>> blocks(N + 1);
    std::vector<std::vector<int>> pos(N + 1, std::vector<int>(w.num_blocks(), -1));
    std::vector<int> dims(N + 1, 0);
    for (int m = 0; m <= N; ++m) {
        blocks[m] = supported_blocks(w, m);
        for (int b : blocks[m]) {
            pos[m][b] = dims[m];
            dims[m] += w.block_dim(b);
        }
    }
    out.set_dims(dims);
    const Elem omega = embed_matrix(Mat::identity(cat->fq(), 1).scaled(cat->fq()->primitive()), k).get(0, 0);
    for (int m = 0; m <= N; ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const auto& gen = cat->generators(m)[g];
            const int t = gen.target;
            Mat a(k, dims[t], dims[m]);
            for (int b : blocks[m]) {
                const int d = w.block_dim(b);
                if (d == 0) continue;
                const auto& wt = w.weight(b);
                switch (gen.kind) {
                    case CatGenerator::Inclusion:
                    case CatGenerator::Projection:
                        if (pos[t][b] >= 0) a.set_block(pos[t][b], pos[m][b], Mat::identity(k, d));
                        break;
                    case CatGenerator::Scaling:
                        a.set_block(pos[t][b], pos[m][b], Mat::identity(k, d).scaled(k->pow(omega, wt[gen.i])));
                        break;
                    case CatGenerator::RaiseTransvection:
                    case CatGenerator::LowerTransvection: {
                        const bool raise = gen.kind == CatGenerator::RaiseTransvection;
                        // I + E_{i,i+1} acts as Σ_k e_i^(k); k is bounded by the
                        // coordinate being lowered.
                        const int kmax = raise ? wt[gen.i + 1] : wt[gen.i];
                        a.add_block(pos[t][b], pos[m][b], Mat::identity(k, d));
                        for (int kk = 1; kk <= kmax; ++kk) {
                            auto dp = divided_power(w, gen.i, kk, raise, b);
                            if (!dp) continue;
                            a.add_block(pos[t][dp->first], pos[m][b], dp->second);
                        }
                        break;
                    }
                }
            }
            out.set_gen_action(m, g, std::move(a));
        }
    return out;
}

std::vector<int> restriction_positions(const Expr& e, const WeightedModule& w, int m) {
    const int n = w.rank();
    const auto& k = w.field();
    Mat incl(k, n, m);
    for (int i = 0; i < m; ++i) incl.set(i, i, 1);
    const long long dm = functor_dim(e, m);
    if (dm == 0) return {};
    Mat img = apply(e, incl);
    auto blocks = supported_blocks(w, m);
    std::vector<int> restricted(w.dim(), -1);
    int off = 0;
    for (int b : blocks) {
        for (int x = 0; x < w.block_dim(b); ++x) restricted[w.block_offset(b) + x] = off + x;
        off += w.block_dim(b);
    }
    const auto& ep = w.eval_position();
    std::vector<int> out(dm, -1);
    for (int c = 0; c < img.cols(); ++c) {
        int hit = -1;
        for (int r = 0; r < img.rows(); ++r)
            if (Elem x = img.get(r, c)) {
                if (hit >= 0 || x != 1) throw std::logic_error("inclusion does not map basis vectors to basis vectors");
                hit = r;
            }
        if (hit < 0) throw std::logic_error("inclusion kills a basis vector");
        int mp = ep.empty() ? hit : ep[hit];
        out[c] = restricted[mp];
        if (out[c] < 0) throw std::logic_error("restricted basis vector outside the supported blocks");
    }
    return out;
}

CatModule cat_kuhn_dual(const CatModule& x) {
    const auto& cat = x.cat();
    CatModule out(cat, x.field());
    out.set_dims(x.dims());
    for (int m = 0; m <= cat->N(); ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const auto& gen = cat->generators(m)[g];
            out.set_gen_action(m, g, x.act(gen.matrix.transpose()).transpose());
        }
    return out;
}

CatModule cat_direct_sum(const CatModule& a, const CatModule& b) {
    const auto& cat = a.cat();
    CatModule out(cat, a.field());
    std::vector<int> dims;
    for (int m = 0; m <= cat->N(); ++m) dims.push_back(a.dim(m) + b.dim(m));
    out.set_dims(dims);
    for (int m = 0; m <= cat->N(); ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g)
            out.set_gen_action(m, g, direct_sum(a.gen_action(m, g), b.gen_action(m, g)));
    return out;
}

std::string check_natural(const CatModule& src, const CatModule& dst, const CatMap& f) {
    const auto& cat = src.cat();
    for (int m = 0; m <= cat->N(); ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const int t = cat->generators(m)[g].target;
            if (!(f.components[t] * src.gen_action(m, g) == dst.gen_action(m, g) * f.components[m]))
                return "not natural at generator " + std::to_string(g) + " of object " + std::to_string(m);
        }
    return {};
}

std::vector<CatMap> cat_hom(const CatModule& src, const CatModule& dst) {
    const auto& cat = src.cat();
    const auto& k = src.field();
    const int N = cat->N();
    std::vector<int> off(N + 2, 0);
    for (int m = 0; m <= N; ++m) off[m + 1] = off[m] + src.dim(m) * dst.dim(m);
    const int unknowns = off[N + 1];
    // X_m stored column-major: entry (r, c) at off[m] + c * dst(m) + r.
    auto var = [&](int m, int r, int c) { return off[m] + c * dst.dim(m) + r; };
    int rows = 0;
    for (int m = 0; m <= N; ++m)
        for (const auto& gen : cat->generators(m)) rows += dst.dim(gen.target) * src.dim(m);
    Mat eq(k, rows, unknowns);
    int row = 0;
    for (int m = 0; m <= N; ++m)
        for (int g = 0; g < int(cat->generators(m).size()); ++g) {
            const int t = cat->generators(m)[g].target;
            const Mat& A = src.gen_action(m, g);
            const Mat& B = dst.gen_action(m, g);
            // X_t A - B X_m = 0, entry (r, c).
            for (int c = 0; c < src.dim(m); ++c)
                for (int r = 0; r < dst.dim(t); ++r, ++row) {
                    for (int u = 0; u < src.dim(t); ++u)
                        if (Elem x = A.get(u, c)) eq.add_to(row, var(t, r, u), x);
                    for (int u = 0; u < dst.dim(m); ++u)
                        if (Elem x = B.get(r, u)) eq.add_to(row, var(m, u, c), k->neg(x));
                }
        }
    Mat ker = unknowns == 0 ? Mat(k, 0, 0) : eq.kernel();
    std::vector<CatMap> out;
    for (int s = 0; s < ker.cols(); ++s) {
        CatMap f;
        for (int m = 0; m <= N; ++m) {
            Mat x(k, dst.dim(m), src.dim(m));
            for (int c = 0; c < src.dim(m); ++c)
                for (int r = 0; r < dst.dim(m); ++r) x.set(r, c, ker.get(var(m, r, c), s));
            f.components.push_back(std::move(x));
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace spfh
