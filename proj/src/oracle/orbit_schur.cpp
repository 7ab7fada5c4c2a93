#include "spfh/orbit_schur.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace spfh::orbit {

namespace {

using Word = std::vector<int>;

int word_index(const Word& w, int n) {
    int idx = 0;
    for (int x : w) idx = idx * n + x;
    return idx;
}

std::vector<Word> all_words(int n, int d) {
    std::vector<Word> out;
    int total = 1;
    for (int k = 0; k < d; ++k) total *= n;
    for (int idx = 0; idx < total; ++idx) {
        Word w(d);
        int x = idx;
        for (int k = d - 1; k >= 0; --k) {
            w[k] = x % n;
            x /= n;
        }
        out.push_back(w);
    }
    return out;
}

Vec flatten(const Mat& m) {
    Vec v(m.field(), m.rows() * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) v.set(i * m.cols() + j, m.get(i, j));
    return v;
}


// Closure of the given vectors under the action, as a column basis.
Mat closure(const AlgebraModule& m, const std::vector<Vec>& seeds) {
    Echelon span(m.f, m.dim);
    std::vector<Vec> queue, basis;
    for (const auto& s : seeds)
        if (span.insert(s)) {
            queue.push_back(s);
            basis.push_back(s);
        }
    for (std::size_t k = 0; k < queue.size(); ++k)
        for (const auto& a : m.act) {
            Vec u = a * queue[k];
            if (span.insert(u)) {
                queue.push_back(u);
                basis.push_back(u);
            }
        }
    return Mat::from_columns(m.f, m.dim, basis);
}

}  // namespace

OrbitSchurAlgebra orbit_schur_algebra(const FieldPtr& f, int n, int d) {
    OrbitSchurAlgebra a;
    a.f = f;
    a.n = n;
    a.d = d;
    auto words = all_words(n, d);
    const int N = int(words.size());
    // Orbits of pairs (i, j) under simultaneous permutation of positions.
    std::set<std::pair<Word, Word>> seen;
    for (const auto& i : words)
        for (const auto& j : words) {
            if (seen.count({i, j})) continue;
            std::vector<int> perm(d);
            for (int k = 0; k < d; ++k) perm[k] = k;
            Mat m(f, N, N);
            std::set<std::pair<Word, Word>> orbit;
            do {
                Word pi(d), pj(d);
                for (int k = 0; k < d; ++k) {
                    pi[k] = i[perm[k]];
                    pj[k] = j[perm[k]];
                }
                orbit.insert({pi, pj});
            } while (std::next_permutation(perm.begin(), perm.end()));
            for (const auto& [pi, pj] : orbit) {
                seen.insert({pi, pj});
                m.set(word_index(pi, n), word_index(pj, n), 1);
            }
            a.basis.push_back(std::move(m));
        }
    return a;
}

AlgebraModule OrbitSchurAlgebra::tensor_space() const {
    return {f, basis.empty() ? 0 : basis[0].rows(), basis};
}

AlgebraModule OrbitSchurAlgebra::regular() const {
    std::vector<Vec> flat;
    for (const auto& b : basis) flat.push_back(flatten(b));
    Mat B = Mat::from_columns(f, flat[0].size(), flat);
    AlgebraModule m{f, dim(), {}};
    for (const auto& x : basis) {
        std::vector<Vec> prods;
        for (const auto& y : basis) prods.push_back(flatten(x * y));
        m.act.push_back(coordinates(B, Mat::from_columns(f, flat[0].size(), prods)));
    }
    return m;
}

AlgebraModule subquotient(const AlgebraModule& m, const Mat& sub, const Mat& rel) {
    // Basis of sub extended from rel; coordinates modulo rel.
    Echelon span(m.f, m.dim);
    std::vector<Vec> relv, extra;
    for (int j = 0; j < rel.cols(); ++j)
        if (span.insert(rel.col(j))) relv.push_back(rel.col(j));
    for (int j = 0; j < sub.cols(); ++j)
        if (span.insert(sub.col(j))) extra.push_back(sub.col(j));
    std::vector<Vec> all = relv;
    all.insert(all.end(), extra.begin(), extra.end());
    Mat B = Mat::from_columns(m.f, m.dim, all);
    Mat E = Mat::from_columns(m.f, m.dim, extra);
    AlgebraModule out{m.f, int(extra.size()), {}};
    const int r = int(relv.size());
    for (const auto& a : m.act) {
        Mat c = coordinates(B, a * E);
        out.act.push_back(c.block(r, 0, int(extra.size()), int(extra.size())));
    }
    return out;
}

AlgebraModule OrbitSchurAlgebra::functor_module(const std::string& which) const {
    AlgebraModule t = tensor_space();
    auto words = all_words(n, d);
    const int N = t.dim;
    auto unit = [&](const Word& w) {
        Vec v(f, N);
        v.set(word_index(w, n), 1);
        return v;
    };
    Mat all = Mat::identity(f, N), none(f, N, 0);
    std::vector<Vec> sym_rel;
    for (const auto& w : words)
        for (int k = 0; k + 1 < d; ++k) {
            Word s = w;
            std::swap(s[k], s[k + 1]);
            Vec v = unit(w);
            v.axpy(f->neg(1), unit(s));
            if (!v.is_zero()) sym_rel.push_back(v);
        }
    if (which == "ten") return t;
    if (which == "sym") return subquotient(t, all, Mat::from_columns(f, N, sym_rel));
    if (which == "div") {
        std::map<Word, Vec> orbit_sums;
        for (const auto& w : words) {
            Word key = w;
            std::sort(key.begin(), key.end());
            auto it = orbit_sums.try_emplace(key, Vec(f, N)).first;
            it->second.set(word_index(w, n), 1);
        }
        std::vector<Vec> inv;
        for (auto& [k, v] : orbit_sums) inv.push_back(v);
        return subquotient(t, Mat::from_columns(f, N, inv), none);
    }
    if (which == "ext") {
        std::vector<Vec> rel;
        for (const auto& w : words)
            for (int k = 0; k + 1 < d; ++k) {
                Word s = w;
                std::swap(s[k], s[k + 1]);
                Vec v = unit(w);
                v.axpy(1, unit(s));
                rel.push_back(v);
                if (w[k] == w[k + 1]) rel.push_back(unit(w));
            }
        return subquotient(t, all, Mat::from_columns(f, N, rel));
    }
    if (which == "frob") {
        if (d != f->p()) throw std::invalid_argument("frob needs d = p");
        std::vector<Vec> sub = sym_rel;
        for (int i = 0; i < n; ++i) sub.push_back(unit(Word(d, i)));
        return subquotient(t, Mat::from_columns(f, N, sub), Mat::from_columns(f, N, sym_rel));
    }
    throw std::invalid_argument("unknown functor " + which);
}

AlgebraModule kuhn_transpose(const OrbitSchurAlgebra& a, const AlgebraModule& m) {
    AlgebraModule out{m.f, m.dim, {}};
    for (int k = 0; k < a.dim(); ++k) {
        Mat t = a.basis[k].transpose();
        int j = 0;
        while (j < a.dim() && !(a.basis[j] == t)) ++j;
        if (j == a.dim()) throw std::logic_error("orbit basis not closed under transpose");
        out.act.push_back(m.act[j].transpose());
    }
    return out;
}

long long hom_dim(const AlgebraModule& a, const AlgebraModule& b) {
    const auto& f = a.f;
    const int vars = a.dim * b.dim;
    if (vars == 0) return 0;
    // X a_k = b_k X, X stored row-major (b.dim x a.dim).
    Echelon eqs(f, vars);
    for (std::size_t k = 0; k < a.act.size(); ++k)
        for (int r = 0; r < b.dim; ++r)
            for (int c = 0; c < a.dim; ++c) {
                Vec eq(f, vars);
                for (int j = 0; j < a.dim; ++j)
                    if (Elem x = a.act[k].get(j, c)) eq.set(r * a.dim + j, f->add(eq.get(r * a.dim + j), x));
                for (int j = 0; j < b.dim; ++j)
                    if (Elem x = b.act[k].get(r, j)) eq.set(j * a.dim + c, f->sub(eq.get(j * a.dim + c), x));
                if (!eq.is_zero()) eqs.insert(std::move(eq));
            }
    return vars - eqs.dim();
}

std::vector<long long> ext_dims(const OrbitSchurAlgebra& alg, const AlgebraModule& m, const AlgebraModule& nmod,
                                int max_degree) {
    const auto& f = alg.f;
    AlgebraModule reg = alg.regular();
    const int A = alg.dim();
    const int N = alg.basis[0].rows();
    // Diagonal orbit sums are the weight idempotents e_λ; A e_λ is spanned by
    // the orbit sums whose column word has the content of λ.
    auto content = [&](int word) {
        std::vector<int> c(alg.n, 0);
        for (int k = 0; k < alg.d; ++k) {
            c[word % alg.n]++;
            word /= alg.n;
        }
        return c;
    };
    std::map<std::vector<int>, int> idem;
    std::vector<std::vector<int>> col_content(A);
    for (int a = 0; a < A; ++a) {
        bool diagonal = true;
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c)
                if (alg.basis[a].get(r, c)) {
                    if (r != c) diagonal = false;
                    col_content[a] = content(c);
                }
        if (diagonal) idem[col_content[a]] = a;
    }
    std::vector<int> idem_order;  // dominant weights first
    for (auto it = idem.rbegin(); it != idem.rend(); ++it) idem_order.push_back(it->second);
    std::map<int, std::vector<int>> proj_basis;  // idempotent -> basis elements of A e
    for (int e : idem_order)
        for (int a = 0; a < A; ++a)
            if (col_content[a] == col_content[e]) proj_basis[e].push_back(a);
    auto restrict = [&](const Mat& act, const std::vector<int>& idx) { return act.select_rows(idx).select_cols(idx); };

    AlgebraModule cur = m;
    Mat incl;
    std::vector<std::vector<Vec>> images;
    std::vector<std::vector<int>> gen_idem;
    for (int i = 0; i <= max_degree + 1; ++i) {
        std::vector<Vec> gens;
        std::vector<int> gi;
        Echelon span(f, cur.dim);
        if (cur.dim > 0)
            for (int e : idem_order) {
                Mat w = column_space(cur.act[e]);
                for (int j = 0; j < w.cols() && span.dim() < cur.dim; ++j) {
                    Vec v = w.col(j);
                    if (span.contains(v)) continue;
                    gens.push_back(v);
                    gi.push_back(e);
                    Mat c = closure(cur, {v});
                    for (int k = 0; k < c.cols(); ++k) span.insert(c.col(k));
                }
            }
        std::vector<Vec> img;
        for (auto& g : gens) img.push_back(i == 0 ? g : incl * g);
        images.push_back(img);
        gen_idem.push_back(gi);
        if (i == max_degree + 1) break;
        // Cover ⊕ A e_g -> cur, ξ ↦ ξ g.
        int total = 0;
        std::vector<int> offs;
        for (int e : gi) {
            offs.push_back(total);
            total += int(proj_basis[e].size());
        }
        Mat cover(f, cur.dim, total);
        for (std::size_t g = 0; g < gens.size(); ++g)
            for (std::size_t k = 0; k < proj_basis[gi[g]].size(); ++k)
                cover.set_col(offs[g] + int(k), cur.act[proj_basis[gi[g]][k]] * gens[g]);
        Mat ker = total ? cover.kernel() : Mat(f, 0, 0);
        AlgebraModule next{f, ker.cols(), {}};
        for (int a = 0; a < A; ++a) {
            if (ker.cols() == 0) {
                next.act.push_back(Mat(f, 0, 0));
                continue;
            }
            Mat act(f, total, total);
            for (std::size_t g = 0; g < gens.size(); ++g)
                act.set_block(offs[g], offs[g], restrict(reg.act[a], proj_basis[gi[g]]));
            next.act.push_back(coordinates(ker, act * ker));
        }
        incl = ker;
        cur = std::move(next);
    }
    // Hom(A e, N) = e N, φ ↦ φ(e). Cochains are kept in ambient coordinates
    // and restricted through a basis of ⊕ e_g N.
    auto cochain_basis = [&](int i) {
        std::vector<Mat> parts;
        int rows = 0, cols = 0;
        for (int e : gen_idem[i]) {
            parts.push_back(column_space(nmod.act[e]));
            rows += nmod.dim;
            cols += parts.back().cols();
        }
        Mat b(f, rows, cols);
        int r = 0, c = 0;
        for (const auto& p : parts) {
            b.set_block(r, c, p);
            r += nmod.dim;
            c += p.cols();
        }
        return b;
    };
    auto delta = [&](int i) {
        const auto& img = images[i + 1];
        const auto& gi = gen_idem[i];
        Mat d(f, int(img.size()) * nmod.dim, int(gi.size()) * nmod.dim);
        for (std::size_t b = 0; b < img.size(); ++b) {
            int off = 0;
            for (std::size_t g = 0; g < gi.size(); ++g) {
                const auto& pb = proj_basis[gi[g]];
                for (std::size_t k = 0; k < pb.size(); ++k)
                    if (Elem c = img[b].get(off + int(k)))
                        d.add_block(int(b) * nmod.dim, int(g) * nmod.dim, nmod.act[pb[k]].scaled(c));
                off += int(pb.size());
            }
        }
        return d;
    };
    std::vector<long long> out;
    long long prev = 0;
    for (int i = 0; i <= max_degree; ++i) {
        Mat b = cochain_basis(i);
        long long r = b.cols() ? (delta(i) * b).rank() : 0;
        out.push_back(b.cols() - r - prev);
        prev = r;
    }
    return out;
}

}  // namespace spfh::orbit
