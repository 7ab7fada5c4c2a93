#include <stdexcept>

#include "spfh/homalg.hpp"
#include "spfh/parallel.hpp"

namespace spfh {

std::string policy_name(CoverPolicy p) { return p == CoverPolicy::DominantFirst ? "dominant-first" : "reverse"; }

namespace {

// Column basis normalized so that its restriction to `pivots` is the identity.
struct PivotBasis {
    Mat basis;
    std::vector<int> pivots;
};

PivotBasis pivot_basis(const Mat& k) {
    PivotBasis out;
    if (k.cols() == 0) {
        out.basis = k;
        return out;
    }
    Mat t = k.transpose();
    RowEchelon e = t.rref_inplace();
    out.basis = t.block(0, 0, e.rank, t.cols()).transpose();
    out.pivots = e.pivots;
    return out;
}

}  // namespace

std::vector<std::pair<int, Vec>> choose_generators(const WeightedModule& m, CoverPolicy policy) {
    const auto& f = m.field();
    std::vector<Echelon> span;
    for (int b = 0; b < m.num_blocks(); ++b) span.emplace_back(f, m.block_dim(b));
    const auto ops = generating_ops(m);
    std::vector<std::pair<int, Vec>> gens;
    std::vector<std::pair<int, Vec>> queue;

    auto close = [&](int b, Vec v) {
        queue.clear();
        auto r = span[b].insert(std::move(v));
        if (!r) return;
        queue.push_back({b, std::move(*r)});
        for (std::size_t k = 0; k < queue.size(); ++k) {
            int src = queue[k].first;
            for (const OpId& op : ops) {
                auto t = m.op_target(op, src);
                if (!t || span[*t].dim() == m.block_dim(*t)) continue;
                const Mat* a = m.op(op, src);
                if (!a) continue;
                if (auto u = span[*t].insert((*a) * queue[k].second)) queue.push_back({*t, std::move(*u)});
            }
        }
    };

    for (int k = 0; k < m.num_blocks(); ++k) {
        int b = policy == CoverPolicy::DominantFirst ? m.num_blocks() - 1 - k : k;
        for (int j = 0; j < m.block_dim(b) && span[b].dim() < m.block_dim(b); ++j) {
            Vec e(f, m.block_dim(b));
            e.set(j, 1);
            if (span[b].contains(e)) continue;
            gens.push_back({b, e});
            close(b, e);
        }
    }
    return gens;
}

bool Resolution::certified() const {
    for (int i = 0; i < int(steps.size()); ++i) {
        if (i == length() && steps[i].rank < 0) continue;
        if (steps[i].rank < 0 || steps[i].rank != steps[i].expected_rank) return false;
    }
    return true;
}

namespace {

// Matrix blocks of the map P -> target determined by the generator images.
ModuleMap yoneda_map(const GammaSum& p, const WeightedModule& target,
                     const std::vector<std::pair<int, Vec>>& images) {
    const WeightedModule& src = *p.module;
    std::vector<std::vector<Vec>> words(p.summands.size());
    parallel_for(int(p.summands.size()), [&](int c) {
        const auto& [blk, v] = images[c];
        if (blk >= 0) words[c] = word_images(*p.recipes[c], target, v);
        else words[c].resize(p.recipes[c]->words.size());
    });
    ModuleMap f(&src, &target);
    parallel_for(src.num_blocks(), [&](int b) {
        int t = f.target_block(b);
        if (t < 0) return;
        Mat m(src.field(), target.block_dim(t), src.block_dim(b));
        for (std::size_t k = 0; k < p.parts[b].size(); ++k) {
            auto [c, rb] = p.parts[b][k];
            m.set_block(0, p.part_offsets[b][k], yoneda_block(*p.recipes[c], words[c], rb, target.block_dim(t)));
        }
        f.set_block(b, std::move(m));
    });
    return f;
}

}  // namespace

void Resolution::materialize(int upto) {
    for (int i = 0; i <= upto && i < int(steps.size()); ++i) {
        auto& s = steps[i];
        if (s.diff) continue;
        s.proj.materialize();
        s.diff = std::make_shared<ModuleMap>(yoneda_map(s.proj, codomain(i), s.images));
    }
}

Resolution resolve(std::shared_ptr<const WeightedModule> m, int length, const ResolveOptions& opt) {
    if (length < 0) throw std::invalid_argument("resolution length must be nonnegative");
    Resolution res;
    res.target = m;
    res.policy = opt.policy;
    const auto& f = m->field();
    const int n = m->rank();

    std::shared_ptr<const WeightedModule> cur = m;
    std::vector<Mat> incl;  // basis of cur inside each block of P_{i-1}

    for (int i = 0; i <= length; ++i) {
        ResolutionStep step;
        auto gens = choose_generators(*cur, opt.policy);
        std::vector<Weight> summands;
        for (auto& [b, v] : gens) summands.push_back(cur->weight(b));
        for (const auto& w : summands)
            if (long long d = functor_dim(Expr::gamma(w), n); d > opt.summand_cap)
                throw ResourceCapExceeded("standard projective at weight " + weight_str(w) + " in P_" +
                                          std::to_string(i) + " has dimension " + std::to_string(d));
        step.proj = GammaSum::build(f, n, summands);
        for (std::size_t c = 0; c < gens.size(); ++c) {
            auto& [b, v] = gens[c];
            if (i == 0) {
                step.images.push_back({b, v});
            } else {
                const WeightedModule& prev = res.module(i - 1);
                int pb = *prev.find_block(cur->weight(b));
                step.images.push_back({pb, incl[pb] * v});
            }
        }
        for (int b = 0; b < int(step.proj.block_dims.size()); ++b)
            if (step.proj.block_dims[b] > opt.block_cap)
                throw ResourceCapExceeded("weight block " + weight_str(step.proj.block_weights[b]) + " of P_" +
                                          std::to_string(i) + " has " + std::to_string(step.proj.block_dims[b]) +
                                          " columns");
        step.expected_rank = cur->dim();
        if (i == length) {
            res.steps.push_back(std::move(step));
            break;
        }

        step.proj.materialize();
        const WeightedModule& P = *step.proj.module;
        // Cover P -> cur in cur's coordinates; its kernel is the next module.
        std::vector<std::pair<int, Vec>> gen_in_cur(gens.begin(), gens.end());
        ModuleMap cover = yoneda_map(step.proj, *cur, gen_in_cur);
        std::vector<PivotBasis> ker(P.num_blocks());
        std::vector<long long> ranks(P.num_blocks());
        parallel_for(P.num_blocks(), [&](int b) {
            Mat k = cover.target_block(b) >= 0 ? cover.block(b).kernel() : Mat::identity(f, P.block_dim(b));
            ranks[b] = P.block_dim(b) - k.cols();
            ker[b] = pivot_basis(k);
        });
        step.rank = 0;
        for (auto r : ranks) step.rank += r;

        // d_i = (cur -> P_{i-1}) ∘ cover
        if (i == 0) {
            step.diff = std::make_shared<ModuleMap>(cover);
        } else {
            const WeightedModule& prev = res.module(i - 1);
            auto d = std::make_shared<ModuleMap>(&P, &prev);
            for (int b = 0; b < P.num_blocks(); ++b) {
                int cb = cover.target_block(b);
                if (cb < 0) continue;
                int pb = d->target_block(b);
                d->set_block(b, incl[pb] * cover.block(b));
            }
            step.diff = std::move(d);
        }

        auto next = std::make_shared<WeightedModule>(f, n, P.max_m());
        next->set_generators_only(true);
        std::vector<int> kblock(P.num_blocks(), -1);
        for (int b = 0; b < P.num_blocks(); ++b)
            if (ker[b].basis.cols() > 0) kblock[b] = next->add_block(P.weight(b), ker[b].basis.cols());
        const auto ops = generating_ops(P);
        std::vector<std::vector<Mat>> kops(ops.size(), std::vector<Mat>(P.num_blocks()));
        parallel_for(int(ops.size() * P.num_blocks()), [&](int job) {
            int o = job / P.num_blocks(), b = job % P.num_blocks();
            if (kblock[b] < 0) return;
            auto t = P.op_target(ops[o], b);
            if (!t || kblock[*t] < 0) return;
            const Mat* a = P.op(ops[o], b);
            if (!a) return;
            Mat img = (*a) * ker[b].basis;
            kops[o][b] = img.select_rows(ker[*t].pivots);
        });
        for (std::size_t o = 0; o < ops.size(); ++o)
            for (int b = 0; b < P.num_blocks(); ++b)
                if (kblock[b] >= 0 && kops[o][b].field()) next->set_op(ops[o], kblock[b], std::move(kops[o][b]));

        incl.assign(P.num_blocks(), Mat());
        for (int b = 0; b < P.num_blocks(); ++b) incl[b] = std::move(ker[b].basis);
        res.steps.push_back(std::move(step));
        cur = next;
    }
    return res;
}

ModuleMap identity_map(const WeightedModule& m) {
    ModuleMap f(&m, &m);
    for (int b = 0; b < m.num_blocks(); ++b) f.set_block(b, Mat::identity(m.field(), m.block_dim(b)));
    return f;
}

}  // namespace spfh
