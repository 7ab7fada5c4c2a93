#include <stdexcept>

#include "spfh/fqcat.hpp"

namespace spfh {

namespace {

long long ipow(long long b, long long e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

}  // namespace

TruncCat::TruncCat(int q, int N, bool enforce_caps) : q_(q), n_(N) {
    if (N < 0) throw std::invalid_argument("truncation must be nonnegative");
    if (enforce_caps) {
        if (q != 2 && q != 3 && q != 4) throw ResourceCapExceeded("truncated category supports q in {2, 3, 4}");
        if (N > (q == 2 ? 4 : 3))
            throw ResourceCapExceeded("truncation N = " + std::to_string(N) + " exceeds the cap at q = " +
                                      std::to_string(q));
    }
    fq_ = Field::of_order(q);
    if (ipow(q, (long long)N * N) > (1LL << 40)) throw ResourceCapExceeded("morphism sets too large to index");
    for (int m = 0; m <= N; ++m) pow_q_.push_back(ipow(q, m));
    gens_.resize(N + 1);
    for (int m = 0; m <= N; ++m) {
        auto& g = gens_[m];
        for (int i = 0; i + 1 < m; ++i) {
            Mat t = Mat::identity(fq_, m);
            t.set(i, i + 1, 1);
            g.push_back({CatGenerator::RaiseTransvection, m, m, i, t});
        }
        for (int i = 0; i + 1 < m; ++i) {
            Mat t = Mat::identity(fq_, m);
            t.set(i + 1, i, 1);
            g.push_back({CatGenerator::LowerTransvection, m, m, i, t});
        }
        if (q > 2)
            for (int i = 0; i < m; ++i) {
                Mat t = Mat::identity(fq_, m);
                t.set(i, i, fq_->primitive());
                g.push_back({CatGenerator::Scaling, m, m, i, t});
            }
        if (m < N) {
            Mat t(fq_, m + 1, m);
            for (int i = 0; i < m; ++i) t.set(i, i, 1);
            g.push_back({CatGenerator::Inclusion, m, m + 1, 0, t});
        }
        if (m > 0) {
            Mat t(fq_, m - 1, m);
            for (int i = 0; i + 1 < m; ++i) t.set(i, i, 1);
            g.push_back({CatGenerator::Projection, m, m - 1, 0, t});
        }
    }
}

long long TruncCat::hom_count(int a, int b) const { return ipow(q_, (long long)a * b); }

Mat TruncCat::decode(int a, int b, long long code) const {
    Mat m(fq_, b, a);
    for (int c = 0; c < a; ++c) {
        long long v = code % pow_q_[b];
        code /= pow_q_[b];
        for (int r = 0; r < b; ++r) {
            m.set(r, c, Elem(v % q_));
            v /= q_;
        }
    }
    return m;
}

long long TruncCat::encode(const Mat& m) const {
    long long code = 0;
    for (int c = m.cols() - 1; c >= 0; --c) {
        long long v = 0;
        for (int r = m.rows() - 1; r >= 0; --r) v = v * q_ + m.get(r, c);
        code = code * pow_q_[m.rows()] + v;
    }
    return code;
}

std::vector<long long> TruncCat::vector_table(const Mat& phi) const {
    const int a = phi.cols(), b = phi.rows();
    std::vector<long long> out(pow_q_[a], 0);
    std::vector<Elem> x(a, 0), y(b);
    for (long long v = 0; v < pow_q_[a]; ++v) {
        long long t = v;
        for (int c = 0; c < a; ++c) x[c] = Elem(t % q_), t /= q_;
        long long code = 0;
        for (int r = b - 1; r >= 0; --r) {
            Elem s = 0;
            for (int c = 0; c < a; ++c)
                if (x[c]) s = fq_->add(s, fq_->mul(phi.get(r, c), x[c]));
            code = code * q_ + s;
        }
        out[v] = code;
    }
    return out;
}

long long TruncCat::compose(const std::vector<long long>& table, int j, int a, int b, long long psi) const {
    long long out = 0, scale = 1;
    for (int c = 0; c < j; ++c) {
        out += table[psi % pow_q_[a]] * scale;
        psi /= pow_q_[a];
        scale *= pow_q_[b];
    }
    return out;
}

int TruncCat::gen_index(int m, CatGenerator::Kind kind, int i) const {
    const auto& g = gens_[m];
    for (int k = 0; k < int(g.size()); ++k)
        if (g[k].kind == kind && g[k].i == i) return k;
    throw std::logic_error("missing category generator");
}

void TruncCat::emit_transvection(int i, int j, Elem c, int m, std::vector<GenStep>& out) const {
    if (c == 0) return;
    if (i - j == 1 || j - i == 1) {
        int idx = gen_index(m, i < j ? CatGenerator::RaiseTransvection : CatGenerator::LowerTransvection,
                            std::min(i, j));
        for (int k = 0; k < fq_->p(); ++k)
            if (fq_->from_int(k) == c) {
                for (int t = 0; t < k; ++t) out.push_back({m, idx});
                return;
            }
        // c outside the prime field: conjugate by a scaling of row i.
        emit({true, i, 0, fq_->inv(c)}, m, out);
        out.push_back({m, idx});
        emit({true, i, 0, c}, m, out);
        return;
    }
    // Commutator [T_ik(c), T_kj(1)] with k the neighbour of i towards j.
    int k = i < j ? i + 1 : i - 1;
    Elem one = 1, neg_one = fq_->neg(1);
    emit_transvection(k, j, neg_one, m, out);
    emit_transvection(i, k, fq_->neg(c), m, out);
    emit_transvection(k, j, one, m, out);
    emit_transvection(i, k, c, m, out);
}

void TruncCat::emit(const ElemOp& op, int m, std::vector<GenStep>& out) const {
    if (!op.scale) {
        emit_transvection(op.i, op.j, op.c, m, out);
        return;
    }
    if (op.c == 1) return;
    int idx = gen_index(m, CatGenerator::Scaling, op.i);
    for (int t = 0; t < fq_->log(op.c); ++t) out.push_back({m, idx});
}

std::vector<GenStep> TruncCat::factor(const Mat& psi) const {
    const int a = psi.cols(), b = psi.rows();
    if (a > n_ || b > n_) throw std::invalid_argument("morphism outside the truncated category");
    Mat r = psi;
    const auto& F = *fq_;
    std::vector<ElemOp> left, right;
    auto row_axpy = [&](int dst, Elem x, int src) {  // row dst += x row src
        for (int c = 0; c < a; ++c) r.set(dst, c, F.add(r.get(dst, c), F.mul(x, r.get(src, c))));
        left.push_back({false, dst, src, x});
    };
    auto col_axpy = [&](int dst, Elem x, int src) {  // col dst += x col src
        for (int k = 0; k < b; ++k) r.set(k, dst, F.add(r.get(k, dst), F.mul(x, r.get(k, src))));
        right.push_back({false, src, dst, x});
    };
    std::vector<int> pivots;
    int row = 0;
    for (int c = 0; c < a && row < b; ++c) {
        int k = row;
        while (k < b && r.get(k, c) == 0) ++k;
        if (k == b) continue;
        if (k != row) row_axpy(row, 1, k);
        Elem s = F.inv(r.get(row, c));
        if (s != 1) {
            for (int cc = 0; cc < a; ++cc) r.set(row, cc, F.mul(s, r.get(row, cc)));
            left.push_back({true, row, 0, s});
        }
        for (int k2 = 0; k2 < b; ++k2)
            if (k2 != row && r.get(k2, c) != 0) row_axpy(k2, F.neg(r.get(k2, c)), row);
        pivots.push_back(c);
        ++row;
    }
    const int rank = int(pivots.size());
    for (int t = 0; t < rank; ++t)
        for (int j = 0; j < a; ++j)
            if (j != pivots[t] && r.get(t, j) != 0) col_axpy(j, F.neg(r.get(t, j)), pivots[t]);
    for (int t = 0; t < rank; ++t) {
        int c = pivots[t];
        if (c == t) continue;
        col_axpy(t, 1, c);
        col_axpy(c, F.neg(1), t);
    }
    for (int i = 0; i < b; ++i)
        for (int j = 0; j < a; ++j)
            if (r.get(i, j) != ((i == j && i < rank) ? 1 : 0)) throw std::logic_error("factorization failed");

    auto inverse = [&](ElemOp op) {
        op.c = op.scale ? F.inv(op.c) : F.neg(op.c);
        return op;
    };
    std::vector<GenStep> word;
    for (const auto& op : right) emit(inverse(op), a, word);
    for (int m = a; m > rank; --m) word.push_back({m, gen_index(m, CatGenerator::Projection, 0)});
    for (int m = rank; m < b; ++m) word.push_back({m, gen_index(m, CatGenerator::Inclusion, 0)});
    for (auto it = left.rbegin(); it != left.rend(); ++it) emit(inverse(*it), b, word);
    return word;
}

Mat TruncCat::evaluate(const std::vector<GenStep>& word, int a) const {
    Mat m = Mat::identity(fq_, a);
    int cur = a;
    for (const auto& s : word) {
        if (s.object != cur) throw std::logic_error("word is not composable");
        const auto& g = gens_[s.object][s.index];
        m = g.matrix * m;
        cur = g.target;
    }
    return m;
}

}  // namespace spfh
