#include "spfh/module.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace spfh {

std::string weight_str(const Weight& w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

int weight_degree(const Weight& w) { return std::accumulate(w.begin(), w.end(), 0); }

WeightedModule::WeightedModule(FieldPtr f, int n, int max_m) : f_(std::move(f)), n_(n), max_m_(max_m) {
    int count = n_ > 1 ? 2 * (n_ - 1) * max_m_ : 0;
    ops_.resize(count);
}

std::optional<int> WeightedModule::find_block(const Weight& w) const {
    auto it = index_.find(w);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int WeightedModule::block_dim_of(const Weight& w) const {
    auto b = find_block(w);
    return b ? blocks_[*b].dim : 0;
}

int WeightedModule::add_block(const Weight& w, int dim) {
    if (int(w.size()) != n_) throw std::invalid_argument("weight length mismatch");
    if (!blocks_.empty() && !(blocks_.back().w < w)) throw std::invalid_argument("blocks out of order");
    int b = num_blocks();
    blocks_.push_back({w, dim_, dim});
    index_[w] = b;
    dim_ += dim;
    for (auto& v : ops_) v.resize(blocks_.size());
    return b;
}

int WeightedModule::op_index(const OpId& op) const {
    return ((op.raise ? 0 : 1) * (n_ - 1) + op.i) * max_m_ + (op.m - 1);
}

void WeightedModule::set_op(const OpId& op, int src_block, Mat m) {
    if (op.m < 1 || op.m > max_m_ || op.i < 0 || op.i >= n_ - 1) throw std::out_of_range("operator out of range");
    if (m.is_zero()) {
        ops_[op_index(op)][src_block] = Mat();
        return;
    }
    ops_[op_index(op)][src_block] = std::move(m);
}

std::optional<int> WeightedModule::op_target(const OpId& op, int src_block) const {
    Weight w = blocks_[src_block].w;
    op.shift(w);
    if (w[op.i] < 0 || w[op.i + 1] < 0) return std::nullopt;
    return find_block(w);
}

bool WeightedModule::has_op_degree(int m) const {
    if (!generators_only_) return true;
    int p = f_->p();
    while (m % p == 0) m /= p;
    return m == 1;
}

const Mat* WeightedModule::op(const OpId& op, int src_block) const {
    if (op.m < 1 || op.m > max_m_ || n_ < 2) return nullptr;
    if (!has_op_degree(op.m)) throw std::logic_error("operator degree not stored in generator-only module");
    const Mat& m = ops_[op_index(op)][src_block];
    return m.field() ? &m : nullptr;
}

std::vector<OpId> WeightedModule::op_ids() const {
    std::vector<OpId> ids;
    for (int dir = 0; dir < 2; ++dir)
        for (int i = 0; i + 1 < n_; ++i)
            for (int m = 1; m <= max_m_; ++m)
                if (has_op_degree(m)) ids.push_back({i, m, dir == 0});
    return ids;
}

std::vector<OpId> generating_ops(const WeightedModule& m) {
    std::vector<OpId> ids;
    if (m.rank() < 2) return ids;
    const int p = m.field()->p();
    for (int dir = 0; dir < 2; ++dir)
        for (int i = 0; i + 1 < m.rank(); ++i)
            for (int d = 1; d <= m.max_m(); d *= p) ids.push_back({i, d, dir == 0});
    return ids;
}

WeightedModule WeightedModule::component(int degree) const {
    return restrict_blocks([degree](const Weight& w) { return weight_degree(w) == degree; });
}

std::vector<int> WeightedModule::degrees() const {
    std::set<int> s;
    for (const auto& b : blocks_) s.insert(weight_degree(b.w));
    return {s.begin(), s.end()};
}

namespace {

long long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::string WeightedModule::check_relations() const {
    // Applies a word of operators to block b; returns the target block or -1
    // (zero) and accumulates the matrix.
    auto apply_word = [&](const std::vector<OpId>& word, int b, Mat& acc) -> int {
        acc = Mat::identity(f_, blocks_[b].dim);
        int cur = b;
        for (const OpId& op : word) {
            auto t = op_target(op, cur);
            if (!t) return -1;
            const Mat* m = this->op(op, cur);
            if (!m) return -1;
            acc = (*m) * acc;
            cur = *t;
        }
        return cur;
    };
    for (int b = 0; b < num_blocks(); ++b) {
        for (int i = 0; i + 1 < n_; ++i) {
            for (bool raise : {true, false}) {
                // e^(a) e^(c) = binom(a+c, a) e^(a+c)
                for (int a = 1; a <= max_m_; ++a)
                    for (int c = 1; a + c <= max_m_; ++c) {
                        if (!has_op_degree(a) || !has_op_degree(c) || !has_op_degree(a + c)) continue;
                        Mat lhs, rhs;
                        int t1 = apply_word({OpId{i, c, raise}, OpId{i, a, raise}}, b, lhs);
                        int t2 = apply_word({OpId{i, a + c, raise}}, b, rhs);
                        Elem coef = f_->from_int(binom(a + c, a));
                        bool lz = t1 < 0 || lhs.is_zero();
                        bool rz = t2 < 0 || coef == 0 || rhs.is_zero();
                        if (lz && rz) continue;
                        if (lz != rz || t1 != t2 || !(lhs == rhs.scaled(coef)))
                            return "divided-power relation fails at block " + weight_str(blocks_[b].w);
                    }
            }
            // e f - f e = h on weight w, where h = w_i - w_{i+1}.
            Mat ef, fe;
            int t1 = apply_word({OpId{i, 1, false}, OpId{i, 1, true}}, b, ef);
            int t2 = apply_word({OpId{i, 1, true}, OpId{i, 1, false}}, b, fe);
            Mat lhs(f_, blocks_[b].dim, blocks_[b].dim);
            if (t1 >= 0) lhs += ef;
            if (t2 >= 0) lhs = lhs - fe;
            int h = blocks_[b].w[i] - blocks_[b].w[i + 1];
            if (!(lhs == Mat::identity(f_, blocks_[b].dim).scaled(f_->from_int(h))))
                return "commutator relation fails at block " + weight_str(blocks_[b].w);
            // Operators at non-adjacent positions commute.
            for (int j = 0; j + 1 < n_; ++j) {
                if (std::abs(i - j) < 2) continue;
                for (bool ri : {true, false})
                    for (bool rj : {true, false}) {
                        Mat x, y;
                        int s1 = apply_word({OpId{i, 1, ri}, OpId{j, 1, rj}}, b, x);
                        int s2 = apply_word({OpId{j, 1, rj}, OpId{i, 1, ri}}, b, y);
                        bool xz = s1 < 0 || x.is_zero(), yz = s2 < 0 || y.is_zero();
                        if (xz && yz) continue;
                        if (xz != yz || !(x == y))
                            return "far commutation fails at block " + weight_str(blocks_[b].w);
                    }
            }
            // e_i and f_j commute for i != j.
            for (int j = 0; j + 1 < n_; ++j) {
                if (j == i) continue;
                Mat x, y;
                int s1 = apply_word({OpId{j, 1, false}, OpId{i, 1, true}}, b, x);
                int s2 = apply_word({OpId{i, 1, true}, OpId{j, 1, false}}, b, y);
                bool xz = s1 < 0 || x.is_zero(), yz = s2 < 0 || y.is_zero();
                if (xz && yz) continue;
                if (xz != yz || !(x == y)) return "e/f commutation fails at block " + weight_str(blocks_[b].w);
            }
        }
    }
    return {};
}

bool WeightedModule::operator==(const WeightedModule& o) const {
    if (n_ != o.n_ || dim_ != o.dim_ || num_blocks() != o.num_blocks()) return false;
    for (int b = 0; b < num_blocks(); ++b)
        if (blocks_[b].w != o.blocks_[b].w || blocks_[b].dim != o.blocks_[b].dim) return false;
    int mm = std::max(max_m_, o.max_m_);
    for (int dir = 0; dir < 2; ++dir)
        for (int i = 0; i + 1 < n_; ++i)
            for (int m = 1; m <= mm; ++m) {
                if (!has_op_degree(m) || !o.has_op_degree(m)) continue;
                for (int b = 0; b < num_blocks(); ++b) {
                    OpId id{i, m, dir == 0};
                    const Mat* x = op(id, b);
                    const Mat* y = o.op(id, b);
                    if (!x && !y) continue;
                    if (!x || !y || !(*x == *y)) return false;
                }
            }
    return true;
}

// ---------------------------------------------------------------- ModuleMap

ModuleMap::ModuleMap(const WeightedModule* src, const WeightedModule* dst) : src_(src), dst_(dst) {
    blocks_.resize(src->num_blocks());
    tgt_.assign(src->num_blocks(), -1);
    for (int b = 0; b < src->num_blocks(); ++b) {
        auto t = dst->find_block(src->weight(b));
        int rows = t ? dst->block_dim(*t) : 0;
        tgt_[b] = t ? *t : -1;
        blocks_[b] = Mat(src->field(), rows, src->block_dim(b));
    }
}

ModuleMap ModuleMap::from_dense(const WeightedModule* src, const WeightedModule* dst, const Mat& m) {
    ModuleMap f(src, dst);
    for (int b = 0; b < src->num_blocks(); ++b) {
        int t = f.tgt_[b];
        if (t < 0) continue;
        f.blocks_[b] = m.block(dst->block_offset(t), src->block_offset(b), dst->block_dim(t), src->block_dim(b));
    }
    return f;
}

Mat ModuleMap::dense() const {
    Mat m(src_->field(), dst_->dim(), src_->dim());
    for (int b = 0; b < src_->num_blocks(); ++b)
        if (tgt_[b] >= 0) m.set_block(dst_->block_offset(tgt_[b]), src_->block_offset(b), blocks_[b]);
    return m;
}

ModuleMap ModuleMap::compose_after(const ModuleMap& first) const {
    ModuleMap out(first.src_, dst_);
    for (int b = 0; b < first.src_->num_blocks(); ++b) {
        int mid = first.tgt_[b];
        if (mid < 0 || out.tgt_[b] < 0) continue;
        out.blocks_[b] = blocks_[mid] * first.blocks_[b];
    }
    return out;
}

std::string ModuleMap::check_equivariant() const {
    for (const OpId& op : src_->op_ids())
        for (int b = 0; b < src_->num_blocks(); ++b) {
            // φ ∘ op  versus  op ∘ φ, both landing in the shifted weight of dst.
            auto ts = src_->op_target(op, b);
            Mat lhs, rhs;
            Weight w = src_->weight(b);
            op.shift(w);
            auto td = dst_->find_block(w);
            if (!td) continue;
            Mat zero(src_->field(), dst_->block_dim(*td), src_->block_dim(b));
            lhs = zero;
            rhs = zero;
            if (ts) {
                if (const Mat* m = src_->op(op, b)) lhs = blocks_[*ts] * (*m);
            }
            if (tgt_[b] >= 0) {
                if (const Mat* m = dst_->op(op, tgt_[b])) rhs = (*m) * blocks_[b];
            }
            if (!(lhs == rhs)) return "map fails to commute with operator at weight " + weight_str(src_->weight(b));
        }
    return {};
}

int ModuleMap::rank() const {
    int r = 0;
    for (const auto& m : blocks_) r += m.rank();
    return r;
}

bool ModuleMap::is_iso() const {
    if (src_->dim() != dst_->dim()) return false;
    return rank() == src_->dim();
}

bool ModuleMap::is_zero() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](const Mat& m) { return m.is_zero(); });
}

// ---------------------------------------------------------------- constructions

WeightedModule direct_sum(const std::vector<const WeightedModule*>& parts) {
    if (parts.empty()) throw std::invalid_argument("empty direct sum");
    const auto& f = parts[0]->field();
    int n = parts[0]->rank();
    int mm = 0;
    std::map<Weight, std::vector<std::pair<int, int>>> by_weight;  // part, block
    for (int k = 0; k < int(parts.size()); ++k) {
        mm = std::max(mm, parts[k]->max_m());
        for (int b = 0; b < parts[k]->num_blocks(); ++b) by_weight[parts[k]->weight(b)].push_back({k, b});
    }
    WeightedModule out(f, n, mm);
    out.set_generators_only(std::any_of(parts.begin(), parts.end(), [](auto* p) { return p->generators_only(); }));
    std::vector<std::vector<int>> offset_in_block(parts.size());
    for (int k = 0; k < int(parts.size()); ++k) offset_in_block[k].assign(parts[k]->num_blocks(), 0);
    for (auto& [w, list] : by_weight) {
        int d = 0;
        for (auto [k, b] : list) {
            offset_in_block[k][b] = d;
            d += parts[k]->block_dim(b);
        }
        out.add_block(w, d);
    }
    std::vector<int> grades;
    bool graded = std::all_of(parts.begin(), parts.end(), [](auto* p) { return !p->grades().empty() || p->dim() == 0; });
    for (const OpId& op : out.op_ids()) {
        for (int ob = 0; ob < out.num_blocks(); ++ob) {
            auto ot = out.op_target(op, ob);
            if (!ot) continue;
            Mat m(f, out.block_dim(*ot), out.block_dim(ob));
            bool any = false;
            for (auto [k, b] : by_weight[out.weight(ob)]) {
                if (op.m > parts[k]->max_m() || !parts[k]->has_op_degree(op.m)) continue;
                auto t = parts[k]->op_target(op, b);
                const Mat* pm = parts[k]->op(op, b);
                if (!t || !pm) continue;
                m.set_block(offset_in_block[k][*t], offset_in_block[k][b], *pm);
                any = true;
            }
            if (any) out.set_op(op, ob, std::move(m));
        }
    }
    if (graded) {
        for (auto& [w, list] : by_weight)
            for (auto [k, b] : list)
                for (int i = 0; i < parts[k]->block_dim(b); ++i)
                    grades.push_back(parts[k]->grades().empty() ? 0 : parts[k]->grades()[parts[k]->block_offset(b) + i]);
        out.set_grades(std::move(grades));
    }
    return out;
}

WeightedModule kuhn_dual(const WeightedModule& m) {
    WeightedModule out(m.field(), m.rank(), m.max_m());
    out.set_generators_only(m.generators_only());
    for (int b = 0; b < m.num_blocks(); ++b) out.add_block(m.weight(b), m.block_dim(b));
    for (const OpId& op : m.op_ids())
        for (int b = 0; b < m.num_blocks(); ++b) {
            auto t = m.op_target(op, b);
            if (!t) continue;
            if (const Mat* x = m.op(op.opposite(), *t)) out.set_op(op, b, x->transpose());
        }
    out.set_grades(m.grades());
    return out;
}

WeightedModule twist_module(const WeightedModule& m, int max_m) {
    const int p = m.field()->p();
    WeightedModule out(m.field(), m.rank(), max_m);
    out.set_generators_only(m.generators_only());
    for (int b = 0; b < m.num_blocks(); ++b) {
        Weight w = m.weight(b);
        for (auto& x : w) x *= p;
        out.add_block(w, m.block_dim(b));
    }
    for (const OpId& op : out.op_ids()) {
        if (op.m % p) continue;
        OpId inner{op.i, op.m / p, op.raise};
        if (inner.m > m.max_m() || !m.has_op_degree(inner.m)) continue;
        for (int b = 0; b < m.num_blocks(); ++b)
            if (const Mat* x = m.op(inner, b)) out.set_op(op, b, *x);
    }
    out.set_grades(m.grades());
    out.set_eval_position(m.eval_position());
    return out;
}

}  // namespace spfh
