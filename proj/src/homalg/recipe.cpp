#include <deque>
#include <map>
#include <mutex>
#include <stdexcept>

#include "spfh/homalg.hpp"

namespace spfh {

namespace {

// Evaluation index of x_1^(λ_1) ⊗ ... ⊗ x_n^(λ_n) in Γ^λ(k^n).
long long generator_eval_index(const Weight& lambda) {
    const int n = int(lambda.size());
    long long idx = 0;
    for (int j = 0; j < n; ++j) {
        auto comps = compositions(lambda[j], n);
        Weight want(n, 0);
        want[j] = lambda[j];
        long long k = 0;
        while (k < (long long)comps.size() && comps[k] != want) ++k;
        if (k == (long long)comps.size()) throw std::logic_error("generator composition not found");
        idx = idx * (long long)comps.size() + k;
    }
    return idx;
}

std::shared_ptr<const GammaRecipe> build_recipe(const Weight& lambda, const FieldPtr& f) {
    auto r = std::make_shared<GammaRecipe>();
    r->lambda = lambda;
    const int n = int(lambda.size());
    r->module = eval_cached(Expr::gamma(lambda), n, f);
    const WeightedModule& m = *r->module;

    int pos = m.eval_position()[generator_eval_index(lambda)];
    for (int b = 0; b < m.num_blocks(); ++b)
        if (pos < m.block_offset(b) + m.block_dim(b)) {
            r->gen_block = b;
            r->gen_offset = pos - m.block_offset(b);
            break;
        }
    if (m.weight(r->gen_block) != lambda) throw std::logic_error("generator has the wrong weight");

    std::vector<Echelon> span;
    std::vector<std::vector<Vec>> cols(m.num_blocks());
    for (int b = 0; b < m.num_blocks(); ++b) span.emplace_back(f, m.block_dim(b));
    r->block_words.resize(m.num_blocks());

    std::vector<Vec> vecs;
    auto add_word = [&](GammaRecipe::Word w, Vec v) {
        r->block_words[w.block].push_back(int(r->words.size()));
        cols[w.block].push_back(v);
        r->words.push_back(w);
        vecs.push_back(std::move(v));
    };
    Vec g(f, m.block_dim(r->gen_block));
    g.set(r->gen_offset, 1);
    span[r->gen_block].insert(g);
    add_word({-1, {}, r->gen_block}, g);

    const auto ops = generating_ops(m);
    for (std::size_t k = 0; k < r->words.size(); ++k) {
        for (const OpId& op : ops) {
            int b = r->words[k].block;
            auto t = m.op_target(op, b);
            if (!t) continue;
            const Mat* a = m.op(op, b);
            if (!a) continue;
            Vec u = (*a) * vecs[k];
            if (span[*t].dim() == m.block_dim(*t)) continue;
            if (span[*t].insert(u)) add_word({int(k), op, *t}, std::move(u));
        }
    }
    for (int b = 0; b < m.num_blocks(); ++b) {
        if (span[b].dim() != m.block_dim(b))
            throw std::logic_error("standard projective not generated by its generator at " + weight_str(m.weight(b)));
        auto inv = Mat::from_columns(f, m.block_dim(b), cols[b]).inverse();
        r->block_inverse.push_back(std::move(*inv));
    }
    return r;
}

}  // namespace

std::shared_ptr<const GammaRecipe> gamma_recipe(const Weight& lambda, const FieldPtr& f) {
    static std::mutex mutex;
    static std::map<std::pair<const Field*, Weight>, std::shared_ptr<const GammaRecipe>> cache;
    {
        std::lock_guard lock(mutex);
        auto it = cache.find({f.get(), lambda});
        if (it != cache.end()) return it->second;
    }
    auto r = build_recipe(lambda, f);
    std::lock_guard lock(mutex);
    return cache.emplace(std::pair{f.get(), lambda}, r).first->second;
}

namespace {

std::vector<int> target_blocks(const GammaRecipe& r, const WeightedModule& n) {
    std::vector<int> out(r.module->num_blocks(), -1);
    for (int b = 0; b < r.module->num_blocks(); ++b)
        if (auto t = n.find_block(r.module->weight(b))) out[b] = *t;
    return out;
}

}  // namespace

std::vector<Vec> word_images(const GammaRecipe& r, const WeightedModule& n, const Vec& v) {
    auto nb = target_blocks(r, n);
    std::vector<Vec> out(r.words.size());
    if (nb[r.gen_block] < 0) return out;
    out[0] = v;
    for (std::size_t k = 1; k < r.words.size(); ++k) {
        const auto& w = r.words[k];
        int dst = nb[w.block];
        if (dst < 0) continue;
        const Vec& src = out[w.parent];
        int sb = nb[r.words[w.parent].block];
        const Mat* a = sb >= 0 ? n.op(w.op, sb) : nullptr;
        out[k] = (a && src.size()) ? (*a) * src : Vec(n.field(), n.block_dim(dst));
    }
    return out;
}

std::vector<Mat> word_matrices(const GammaRecipe& r, const WeightedModule& n) {
    auto nb = target_blocks(r, n);
    std::vector<Mat> out(r.words.size());
    if (nb[r.gen_block] < 0) return out;
    int d = n.block_dim(nb[r.gen_block]);
    out[0] = Mat::identity(n.field(), d);
    for (std::size_t k = 1; k < r.words.size(); ++k) {
        const auto& w = r.words[k];
        int dst = nb[w.block];
        if (dst < 0) continue;
        int sb = nb[r.words[w.parent].block];
        const Mat* a = sb >= 0 ? n.op(w.op, sb) : nullptr;
        const Mat& src = out[w.parent];
        out[k] = (a && !src.empty()) ? (*a) * src : Mat(n.field(), n.block_dim(dst), d);
    }
    return out;
}

Mat yoneda_block(const GammaRecipe& r, const std::vector<Vec>& images, int rb, int rows) {
    const auto& ws = r.block_words[rb];
    Mat cols(r.module->field(), rows, int(ws.size()));
    for (int j = 0; j < int(ws.size()); ++j)
        if (images[ws[j]].size()) cols.set_col(j, images[ws[j]]);
    return cols * r.block_inverse[rb];
}

// ---------------------------------------------------------------- GammaSum

GammaSum GammaSum::build(const FieldPtr& f, int n, std::vector<Weight> summands) {
    GammaSum s;
    s.field = f;
    s.n = n;
    s.summands = std::move(summands);
    std::map<Weight, std::vector<std::pair<int, int>>> by_weight;
    for (int c = 0; c < int(s.summands.size()); ++c) {
        s.recipes.push_back(gamma_recipe(s.summands[c], f));
        const auto& m = *s.recipes.back()->module;
        for (int b = 0; b < m.num_blocks(); ++b) by_weight[m.weight(b)].push_back({c, b});
    }
    s.gen_block.assign(s.summands.size(), -1);
    s.gen_offset.assign(s.summands.size(), -1);
    for (auto& [w, list] : by_weight) {
        int blk = int(s.block_weights.size());
        int off = 0;
        std::vector<int> offs;
        for (auto [c, rb] : list) {
            offs.push_back(off);
            const auto& r = *s.recipes[c];
            if (rb == r.gen_block) {
                s.gen_block[c] = blk;
                s.gen_offset[c] = off + r.gen_offset;
            }
            off += r.module->block_dim(rb);
        }
        s.block_weights.push_back(w);
        s.block_dims.push_back(off);
        s.parts.push_back(list);
        s.part_offsets.push_back(std::move(offs));
    }
    return s;
}

int GammaSum::find_block(const Weight& w) const {
    auto it = std::lower_bound(block_weights.begin(), block_weights.end(), w);
    if (it == block_weights.end() || *it != w) return -1;
    return int(it - block_weights.begin());
}

long long GammaSum::dim() const {
    long long d = 0;
    for (int x : block_dims) d += x;
    return d;
}

void GammaSum::materialize() {
    if (module) return;
    if (summands.empty()) {
        module = std::make_shared<WeightedModule>(field, n, 1);
        return;
    }
    std::vector<const WeightedModule*> parts_;
    for (const auto& r : recipes) parts_.push_back(r->module.get());
    module = std::make_shared<WeightedModule>(direct_sum(parts_));
}

}  // namespace spfh
