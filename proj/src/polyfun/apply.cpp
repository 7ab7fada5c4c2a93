#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

#include "spfh/polyfun.hpp"

namespace spfh {

// ---------------------------------------------------------------- PolyMat

PolyMat::PolyMat(FieldPtr f, int rows, int cols, int T) : f_(std::move(f)), rows_(rows), cols_(cols), T_(T) {
    c_.reserve(T);
    for (int k = 0; k < T; ++k) c_.emplace_back(f_, rows, cols);
}

PolyMat PolyMat::constant(const Mat& m, int T) {
    PolyMat p(m.field(), m.rows(), m.cols(), T);
    p.c_[0] = m;
    return p;
}

PolyMat PolyMat::transpose() const {
    PolyMat t(f_, cols_, rows_, T_);
    for (int k = 0; k < T_; ++k) t.c_[k] = c_[k].transpose();
    return t;
}

PolyMat PolyMat::operator*(const PolyMat& o) const {
    int T = std::min(T_, o.T_);
    PolyMat out(f_, rows_, o.cols_, T);
    for (int i = 0; i < T; ++i) {
        if (c_[i].is_zero()) continue;
        for (int j = 0; i + j < T; ++j) {
            if (o.c_[j].is_zero()) continue;
            out.c_[i + j] += c_[i] * o.c_[j];
        }
    }
    return out;
}

PolyMat PolyMat::frobenius(int r) const {
    long long step = 1;
    for (int i = 0; i < r; ++i) step *= f_->p();
    PolyMat out(f_, rows_, cols_, T_);
    for (long long k = 0; k < T_ && k * step < T_; ++k) out.c_[k * step] = c_[k].frobenius(r);
    return out;
}

PolyMat kron(const PolyMat& a, const PolyMat& b) {
    int T = std::min(a.trunc(), b.trunc());
    PolyMat out(a.field(), a.rows() * b.rows(), a.cols() * b.cols(), T);
    for (int i = 0; i < T; ++i) {
        if (a.coeff(i).is_zero()) continue;
        for (int j = 0; i + j < T; ++j) {
            if (b.coeff(j).is_zero()) continue;
            out.coeff(i + j) += kron(a.coeff(i), b.coeff(j));
        }
    }
    return out;
}

PolyMat block_diag(const std::vector<PolyMat>& parts) {
    int rows = 0, cols = 0, T = parts.empty() ? 1 : parts[0].trunc();
    for (const auto& p : parts) {
        rows += p.rows();
        cols += p.cols();
    }
    PolyMat out(parts[0].field(), rows, cols, T);
    int r0 = 0, c0 = 0;
    for (const auto& p : parts) {
        for (int k = 0; k < T; ++k) out.coeff(k).set_block(r0, c0, p.coeff(k));
        r0 += p.rows();
        c0 += p.cols();
    }
    return out;
}

// ---------------------------------------------------------------- combinatorics

namespace {

long long binom_ll(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

void compositions_rec(int d, int n, int pos, Weight& cur, std::vector<Weight>& out) {
    if (pos == n - 1) {
        cur[pos] = d;
        out.push_back(cur);
        return;
    }
    for (int v = d; v >= 0; --v) {
        cur[pos] = v;
        compositions_rec(d - v, n, pos + 1, cur, out);
    }
}

// Ranks compositions of a fixed degree in the enumeration order above.
class CompositionRank {
public:
    CompositionRank(int nvars, int maxdeg) : n_(nvars) {
        cnt_.assign(std::size_t(nvars + 1) * (maxdeg + 1), 0);
        for (int k = 0; k <= nvars; ++k)
            for (int s = 0; s <= maxdeg; ++s) cnt_[k * (maxdeg + 1) + s] = k == 0 ? (s == 0) : binom_ll(s + k - 1, k - 1);
        md_ = maxdeg;
    }
    long long count(int parts, int s) const { return cnt_[std::size_t(parts) * (md_ + 1) + s]; }
    long long rank(const int* v, int s) const {
        long long r = 0;
        for (int j = 0; j < n_; ++j) {
            for (int x = s; x > v[j]; --x) r += count(n_ - j - 1, s - x);
            s -= v[j];
        }
        return r;
    }

private:
    int n_, md_;
    std::vector<long long> cnt_;
};

// Ring element of GF(q)[t]/(t^T), stored inline in a flat buffer.
struct RingOps {
    const Field& f;
    int T;
    // out += a * b
    void mul_add(Elem* out, const Elem* a, const Elem* b) const {
        for (int i = 0; i < T; ++i) {
            if (!a[i]) continue;
            for (int j = 0; i + j < T; ++j)
                if (b[j]) out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
        }
    }
    void scale_add(Elem* out, Elem c, const Elem* a) const {
        if (!c) return;
        for (int i = 0; i < T; ++i)
            if (a[i]) out[i] = f.add(out[i], f.mul(c, a[i]));
    }
    bool is_zero(const Elem* a) const {
        for (int i = 0; i < T; ++i)
            if (a[i]) return false;
        return true;
    }
};

// Dense copy of the entries of a PolyMat: entry (i, j) at (i * cols + j) * T.
std::vector<Elem> entries_of(const PolyMat& f) {
    const int T = f.trunc();
    std::vector<Elem> e(std::size_t(f.rows()) * f.cols() * T, 0);
    for (int k = 0; k < T; ++k) {
        const Mat& c = f.coeff(k);
        if (c.is_zero()) continue;
        for (int i = 0; i < f.rows(); ++i)
            for (int j = 0; j < f.cols(); ++j)
                if (Elem v = c.get(i, j)) e[(std::size_t(i) * f.cols() + j) * T + k] = v;
    }
    return e;
}

void store_column(PolyMat& out, int col, const std::vector<Elem>& poly, int T) {
    const int rows = out.rows();
    for (int r = 0; r < rows; ++r)
        for (int k = 0; k < T; ++k)
            if (Elem v = poly[std::size_t(r) * T + k]) out.coeff(k).set(r, col, v);
}

PolyMat apply_sym(int d, const PolyMat& f) {
    const int a = f.cols(), b = f.rows(), T = f.trunc();
    const auto& F = *f.field();
    RingOps R{F, T};
    auto src = compositions(d, a);
    CompositionRank tr(b, d);
    std::vector<std::vector<Weight>> mons(d + 1);
    for (int s = 0; s <= d; ++s) mons[s] = compositions(s, b);
    const int out_rows = int(mons[d].size());
    PolyMat out(f.field(), out_rows, int(src.size()), T);
    auto fe = entries_of(f);
    for (int c = 0; c < int(src.size()); ++c) {
        std::vector<Elem> cur(T, 0);
        cur[0] = 1;
        int s = 0;
        for (int j = 0; j < a; ++j)
            for (int rep = 0; rep < src[c][j]; ++rep) {
                std::vector<Elem> next(mons[s + 1].size() * T, 0);
                for (int mi = 0; mi < int(mons[s].size()); ++mi) {
                    const Elem* cm = &cur[std::size_t(mi) * T];
                    if (R.is_zero(cm)) continue;
                    Weight nu = mons[s][mi];
                    for (int i = 0; i < b; ++i) {
                        const Elem* fij = &fe[(std::size_t(i) * a + j) * T];
                        if (R.is_zero(fij)) continue;
                        ++nu[i];
                        long long idx = tr.rank(nu.data(), s + 1);
                        --nu[i];
                        R.mul_add(&next[std::size_t(idx) * T], cm, fij);
                    }
                }
                cur = std::move(next);
                ++s;
            }
        store_column(out, c, cur, T);
    }
    return out;
}

PolyMat apply_div(int d, const PolyMat& f) {
    const int a = f.cols(), b = f.rows(), T = f.trunc();
    const auto& F = *f.field();
    RingOps R{F, T};
    auto src = compositions(d, a);
    CompositionRank tr(b, d);
    std::vector<std::vector<Weight>> mons(d + 1);
    for (int s = 0; s <= d; ++s) mons[s] = compositions(s, b);
    PolyMat out(f.field(), int(mons[d].size()), int(src.size()), T);
    auto fe = entries_of(f);
    // powers[(i*a+j)*(d+1)+k] = f_ij^k
    std::vector<Elem> powers(std::size_t(b) * a * (d + 1) * T, 0);
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < a; ++j) {
            Elem* base = &powers[(std::size_t(i) * a + j) * (d + 1) * T];
            base[0] = 1;
            for (int k = 1; k <= d; ++k) R.mul_add(base + std::size_t(k) * T, base + std::size_t(k - 1) * T, &fe[(std::size_t(i) * a + j) * T]);
        }
    // binomials mod p
    std::vector<std::vector<Elem>> C(2 * d + 1, std::vector<Elem>(2 * d + 1, 0));
    for (int n = 0; n <= 2 * d; ++n) {
        C[n][0] = 1;
        for (int k = 1; k <= n; ++k) C[n][k] = F.add(C[n - 1][k - 1], k <= n - 1 ? C[n - 1][k] : Elem(0));
    }
    for (int c = 0; c < int(src.size()); ++c) {
        std::vector<Elem> cur(T, 0);
        cur[0] = 1;
        int s = 0;
        for (int j = 0; j < a; ++j) {
            int m = src[c][j];
            if (m == 0) continue;
            // (sum_i f_ij y_i)^(m) = sum_nu prod_i f_ij^nu_i y^(nu)
            const auto& qmons = mons[m];
            std::vector<Elem> q(qmons.size() * T, 0);
            for (int qi = 0; qi < int(qmons.size()); ++qi) {
                std::vector<Elem> acc(T, 0);
                acc[0] = 1;
                bool zero = false;
                for (int i = 0; i < b && !zero; ++i) {
                    int e = qmons[qi][i];
                    if (!e) continue;
                    const Elem* pw = &powers[((std::size_t(i) * a + j) * (d + 1) + e) * T];
                    if (R.is_zero(pw)) {
                        zero = true;
                        break;
                    }
                    std::vector<Elem> nxt(T, 0);
                    R.mul_add(nxt.data(), acc.data(), pw);
                    acc = std::move(nxt);
                }
                if (!zero) std::copy(acc.begin(), acc.end(), q.begin() + std::size_t(qi) * T);
            }
            std::vector<Elem> next(mons[s + m].size() * T, 0);
            for (int pi = 0; pi < int(mons[s].size()); ++pi) {
                const Elem* pc = &cur[std::size_t(pi) * T];
                if (R.is_zero(pc)) continue;
                for (int qi = 0; qi < int(qmons.size()); ++qi) {
                    const Elem* qc = &q[std::size_t(qi) * T];
                    if (R.is_zero(qc)) continue;
                    Weight sum(b);
                    Elem coef = 1;
                    for (int i = 0; i < b; ++i) {
                        sum[i] = mons[s][pi][i] + qmons[qi][i];
                        coef = F.mul(coef, C[sum[i]][qmons[qi][i]]);
                    }
                    if (!coef) continue;
                    std::vector<Elem> prod(T, 0);
                    R.mul_add(prod.data(), pc, qc);
                    long long idx = tr.rank(sum.data(), s + m);
                    R.scale_add(&next[std::size_t(idx) * T], coef, prod.data());
                }
            }
            cur = std::move(next);
            s += m;
        }
        store_column(out, c, cur, T);
    }
    return out;
}

// Lexicographically ordered d-subsets of [n] as bitmasks.
std::vector<std::uint64_t> subsets(int d, int n) {
    std::vector<std::uint64_t> out;
    std::vector<int> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    if (d > n) return out;
    while (true) {
        std::uint64_t m = 0;
        for (int x : idx) m |= std::uint64_t(1) << x;
        out.push_back(m);
        int k = d - 1;
        while (k >= 0 && idx[k] == n - d + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

PolyMat apply_ext(int d, const PolyMat& f) {
    const int a = f.cols(), b = f.rows(), T = f.trunc();
    if (a > 64 || b > 64) throw ResourceCapExceeded("exterior power on more than 64 variables");
    const auto& F = *f.field();
    RingOps R{F, T};
    auto src = subsets(d, a);
    std::vector<std::unordered_map<std::uint64_t, int>> rank(d + 1);
    std::vector<std::vector<std::uint64_t>> sets(d + 1);
    for (int s = 0; s <= d; ++s) {
        sets[s] = subsets(s, b);
        for (int k = 0; k < int(sets[s].size()); ++k) rank[s][sets[s][k]] = k;
    }
    PolyMat out(f.field(), int(sets[d].size()), int(src.size()), T);
    auto fe = entries_of(f);
    const Elem minus_one = F.neg(1);
    for (int c = 0; c < int(src.size()); ++c) {
        std::vector<Elem> cur(T, 0);
        cur[0] = 1;
        int s = 0;
        for (int j = 0; j < a; ++j) {
            if (!((src[c] >> j) & 1u)) continue;
            std::vector<Elem> next(sets[s + 1].size() * T, 0);
            for (int ui = 0; ui < int(sets[s].size()); ++ui) {
                const Elem* cu = &cur[std::size_t(ui) * T];
                if (R.is_zero(cu)) continue;
                std::uint64_t U = sets[s][ui];
                for (int i = 0; i < b; ++i) {
                    if ((U >> i) & 1u) continue;
                    const Elem* fij = &fe[(std::size_t(i) * a + j) * T];
                    if (R.is_zero(fij)) continue;
                    int above = std::popcount(U >> (i + 1));
                    std::vector<Elem> prod(T, 0);
                    R.mul_add(prod.data(), cu, fij);
                    int idx = rank[s + 1][U | (std::uint64_t(1) << i)];
                    R.scale_add(&next[std::size_t(idx) * T], (above & 1) ? minus_one : Elem(1), prod.data());
                }
            }
            cur = std::move(next);
            ++s;
        }
        store_column(out, c, cur, T);
    }
    return out;
}

PolyMat unit(const FieldPtr& f, int T) { return PolyMat::constant(Mat::identity(f, 1), T); }

}  // namespace

std::vector<Weight> compositions(int d, int n) {
    std::vector<Weight> out;
    if (n == 0) {
        if (d == 0) out.push_back({});
        return out;
    }
    Weight cur(n, 0);
    compositions_rec(d, n, 0, cur, out);
    return out;
}

// ---------------------------------------------------------------- apply

PolyMat apply(const Expr& e, const PolyMat& f) {
    const int T = f.trunc();
    switch (e.kind()) {
        case ExprKind::Id: return f;
        case ExprKind::Sym: return e.arg() == 0 ? unit(f.field(), T) : apply_sym(e.arg(), f);
        case ExprKind::Div: return e.arg() == 0 ? unit(f.field(), T) : apply_div(e.arg(), f);
        case ExprKind::Ext: return e.arg() == 0 ? unit(f.field(), T) : apply_ext(e.arg(), f);
        case ExprKind::Ten: {
            PolyMat acc = unit(f.field(), T);
            for (int k = 0; k < e.arg(); ++k) acc = kron(acc, f);
            return acc;
        }
        case ExprKind::Twist: return apply(e.child(), f.frobenius(e.arg()));
        case ExprKind::MultiTwist: {
            std::vector<PolyMat> parts;
            for (int i = 0; i < e.arg2(); ++i) parts.push_back(f.frobenius(i * e.arg()));
            return apply(e.child(), block_diag(parts));
        }
        case ExprKind::Param: {
            int v = std::accumulate(e.dims().begin(), e.dims().end(), 0);
            if (v == 0) return apply(e.child(), PolyMat(f.field(), 0, 0, T));
            return apply(e.child(), block_diag(std::vector<PolyMat>(v, f)));
        }
        case ExprKind::Tensor: {
            PolyMat acc = unit(f.field(), T);
            for (const auto& c : e.children()) acc = kron(acc, apply(c, f));
            return acc;
        }
        case ExprKind::Sum: {
            std::vector<PolyMat> parts;
            for (const auto& c : e.children()) parts.push_back(apply(c, f));
            return block_diag(parts);
        }
        case ExprKind::Compose: return apply(e.children()[0], apply(e.children()[1], f));
        case ExprKind::Kuhn: return apply(e.child(), f.transpose()).transpose();
        case ExprKind::Contra:
            throw std::invalid_argument("contravariant expression cannot be applied covariantly: " + e.str());
    }
    throw std::logic_error("unreachable");
}

Mat apply(const Expr& e, const Mat& f) { return apply(e, PolyMat::constant(f, 1)).coeff(0); }

long long functor_dim(const Expr& e, int n) {
    switch (e.kind()) {
        case ExprKind::Id: return n;
        case ExprKind::Sym:
        case ExprKind::Div: return binom_ll(n + e.arg() - 1, e.arg());
        case ExprKind::Ext: return binom_ll(n, e.arg());
        case ExprKind::Ten: {
            long long r = 1;
            for (int k = 0; k < e.arg(); ++k) r *= n;
            return r;
        }
        case ExprKind::Twist:
        case ExprKind::Kuhn:
        case ExprKind::Contra: return functor_dim(e.child(), n);
        case ExprKind::MultiTwist: return functor_dim(e.child(), n * e.arg2());
        case ExprKind::Param:
            return functor_dim(e.child(), n * std::accumulate(e.dims().begin(), e.dims().end(), 0));
        case ExprKind::Tensor: {
            long long r = 1;
            for (const auto& c : e.children()) r *= functor_dim(c, n);
            return r;
        }
        case ExprKind::Sum: {
            long long r = 0;
            for (const auto& c : e.children()) r += functor_dim(c, n);
            return r;
        }
        case ExprKind::Compose: return functor_dim(e.children()[0], int(functor_dim(e.children()[1], n)));
    }
    return 0;
}

// ---------------------------------------------------------------- weights

BasisLabels basis_labels(const Expr& e, int n, int p) {
    BasisLabels out;
    auto zero_grades = [&](std::size_t k) { out.grades.assign(k, 0); };
    switch (e.kind()) {
        case ExprKind::Id:
            for (int j = 0; j < n; ++j) {
                Weight w(n, 0);
                w[j] = 1;
                out.weights.push_back(w);
            }
            zero_grades(out.weights.size());
            return out;
        case ExprKind::Sym:
        case ExprKind::Div:
            out.weights = compositions(e.arg(), n);
            zero_grades(out.weights.size());
            return out;
        case ExprKind::Ext:
            if (n > 64) throw ResourceCapExceeded("exterior power on more than 64 variables");
            for (auto m : subsets(e.arg(), n)) {
                Weight w(n, 0);
                for (int j = 0; j < n; ++j) w[j] = int((m >> j) & 1u);
                out.weights.push_back(w);
            }
            zero_grades(out.weights.size());
            return out;
        case ExprKind::Ten: {
            long long total = functor_dim(e, n);
            for (long long idx = 0; idx < total; ++idx) {
                Weight w(n, 0);
                long long t = idx;
                for (int k = 0; k < e.arg(); ++k) {
                    ++w[t % n];
                    t /= n;
                }
                out.weights.push_back(w);
            }
            zero_grades(out.weights.size());
            return out;
        }
        case ExprKind::Twist: {
            out = basis_labels(e.child(), n, p);
            long long s = 1;
            for (int i = 0; i < e.arg(); ++i) s *= p;
            for (auto& w : out.weights)
                for (auto& x : w) x = int(x * s);
            return out;
        }
        case ExprKind::MultiTwist: {
            int s = e.arg2();
            auto inner = basis_labels(e.child(), n * s, p);
            for (auto& w : inner.weights) {
                Weight v(n, 0);
                long long scale = 1;
                for (int i = 0; i < s; ++i) {
                    for (int j = 0; j < n; ++j) v[j] += int(w[i * n + j] * scale);
                    for (int k = 0; k < e.arg(); ++k) scale *= p;
                }
                out.weights.push_back(v);
            }
            out.grades = inner.grades;
            return out;
        }
        case ExprKind::Param: {
            std::vector<int> vdeg;
            for (int g = 0; g < int(e.dims().size()); ++g)
                for (int k = 0; k < e.dims()[g]; ++k) vdeg.push_back(g);
            int v = int(vdeg.size());
            auto inner = basis_labels(e.child(), n * v, p);
            for (std::size_t b = 0; b < inner.weights.size(); ++b) {
                const auto& w = inner.weights[b];
                Weight u(n, 0);
                int grade = inner.grades[b];
                for (int a = 0; a < v; ++a)
                    for (int j = 0; j < n; ++j) {
                        u[j] += w[a * n + j];
                        grade += vdeg[a] * w[a * n + j];
                    }
                out.weights.push_back(u);
                out.grades.push_back(grade);
            }
            return out;
        }
        case ExprKind::Tensor: {
            out.weights = {Weight(n, 0)};
            out.grades = {0};
            for (const auto& c : e.children()) {
                auto cl = basis_labels(c, n, p);
                BasisLabels next;
                for (std::size_t x = 0; x < out.weights.size(); ++x)
                    for (std::size_t y = 0; y < cl.weights.size(); ++y) {
                        Weight w = out.weights[x];
                        for (int j = 0; j < n; ++j) w[j] += cl.weights[y][j];
                        next.weights.push_back(std::move(w));
                        next.grades.push_back(out.grades[x] + cl.grades[y]);
                    }
                out = std::move(next);
            }
            return out;
        }
        case ExprKind::Sum:
            for (const auto& c : e.children()) {
                auto cl = basis_labels(c, n, p);
                out.weights.insert(out.weights.end(), cl.weights.begin(), cl.weights.end());
                out.grades.insert(out.grades.end(), cl.grades.begin(), cl.grades.end());
            }
            return out;
        case ExprKind::Compose: {
            auto inner = basis_labels(e.children()[1], n, p);
            int m = int(inner.weights.size());
            auto outer = basis_labels(e.children()[0], m, p);
            for (std::size_t b = 0; b < outer.weights.size(); ++b) {
                Weight u(n, 0);
                int grade = outer.grades[b];
                for (int j = 0; j < m; ++j) {
                    int c = outer.weights[b][j];
                    if (!c) continue;
                    for (int t = 0; t < n; ++t) u[t] += c * inner.weights[j][t];
                    grade += c * inner.grades[j];
                }
                out.weights.push_back(u);
                out.grades.push_back(grade);
            }
            return out;
        }
        case ExprKind::Kuhn: return basis_labels(e.child(), n, p);
        case ExprKind::Contra:
            throw std::invalid_argument("contravariant expression has no covariant weight basis: " + e.str());
    }
    return out;
}

std::vector<int> support_positions(const BasisLabels& labels, int m) {
    std::vector<int> order(labels.weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return labels.weights[x] < labels.weights[y]; });
    std::vector<int> out;
    for (int i : order) {
        const auto& w = labels.weights[i];
        bool ok = true;
        for (int j = m; j < int(w.size()); ++j)
            if (w[j]) ok = false;
        if (ok) out.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------- eval

WeightedModule eval(const Expr& e, int n, const FieldPtr& f, const EvalOptions& opt) {
    if (e.contravariant()) throw std::invalid_argument("cannot evaluate contravariant expression " + e.str());
    const int p = f->p();
    long long total = functor_dim(e, n);
    if (total > 60000) throw ResourceCapExceeded("evaluation of " + e.str() + " at n=" + std::to_string(n) +
                                                  " has dimension " + std::to_string(total));
    auto labels = basis_labels(e, n, p);
    const int D = std::max(1, e.max_degree(p));
    const int max_m = opt.max_m > 0 ? opt.max_m : D;

    std::vector<int> order(labels.weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return labels.weights[x] < labels.weights[y]; });

    std::vector<Weight> block_w;
    std::vector<std::vector<int>> block_pos;  // evaluation positions per block
    std::vector<int> eval_pos(order.size());
    std::vector<int> grades;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& w = labels.weights[order[k]];
        if (block_w.empty() || block_w.back() != w) {
            block_w.push_back(w);
            block_pos.emplace_back();
        }
        block_pos.back().push_back(order[k]);
        eval_pos[order[k]] = int(k);
        grades.push_back(labels.grades[order[k]]);
    }
    WeightedModule out(f, n, max_m);
    for (std::size_t b = 0; b < block_w.size(); ++b) {
        if (static_cast<long long>(block_pos[b].size()) > opt.block_cap)
            throw ResourceCapExceeded("weight block " + weight_str(block_w[b]) + " of " + e.str() + " has " +
                                      std::to_string(block_pos[b].size()) + " columns");
        out.add_block(block_w[b], int(block_pos[b].size()));
    }
    out.set_grades(std::move(grades));
    out.set_eval_position(std::move(eval_pos));
    if (n < 2) return out;

    for (int i = 0; i + 1 < n; ++i) {
        for (bool raise : {true, false}) {
            PolyMat g(f, n, n, max_m + 1);
            g.coeff(0) = Mat::identity(f, n);
            if (raise)
                g.coeff(1).set(i, i + 1, 1);
            else
                g.coeff(1).set(i + 1, i, 1);
            PolyMat img = apply(e, g);
            for (int m = 1; m <= max_m; ++m) {
                const Mat& c = img.coeff(m);
                if (c.is_zero()) continue;
                OpId op{i, m, raise};
                for (int b = 0; b < out.num_blocks(); ++b) {
                    auto t = out.op_target(op, b);
                    if (!t) continue;
                    Mat blk = c.select_rows(block_pos[*t]).select_cols(block_pos[b]);
                    if (!blk.is_zero()) out.set_op(op, b, std::move(blk));
                }
            }
        }
    }
    return out;
}

namespace {

struct EvalCache {
    std::shared_mutex mu;
    std::unordered_map<std::string, std::shared_ptr<const WeightedModule>> map;
};

EvalCache& eval_cache() {
    static EvalCache c;
    return c;
}

}  // namespace

std::shared_ptr<const WeightedModule> eval_cached(const Expr& e, int n, const FieldPtr& f, const EvalOptions& opt) {
    std::string key = e.str() + "|" + std::to_string(n) + "|" + std::to_string(f->p()) + "^" +
                      std::to_string(f->r()) + "|" + std::to_string(opt.max_m);
    auto& c = eval_cache();
    {
        std::shared_lock lock(c.mu);
        auto it = c.map.find(key);
        if (it != c.map.end()) return it->second;
    }
    auto mod = std::make_shared<const WeightedModule>(eval(e, n, f, opt));
    std::unique_lock lock(c.mu);
    auto [it, inserted] = c.map.emplace(key, mod);
    return it->second;
}

void clear_eval_cache() {
    auto& c = eval_cache();
    std::unique_lock lock(c.mu);
    c.map.clear();
}

}  // namespace spfh
