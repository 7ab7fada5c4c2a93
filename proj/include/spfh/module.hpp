#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spfh/matrix.hpp"

namespace spfh {

using Weight = std::vector<int>;

std::string weight_str(const Weight& w);
int weight_degree(const Weight& w);

// Divided-power operator e_i^(m) (raise) or f_i^(m) (lower), i in [0, n-1).
struct OpId {
    int i = 0;
    int m = 1;
    bool raise = true;

    OpId opposite() const { return {i, m, !raise}; }
    // Weight shift produced by the operator.
    void shift(Weight& w, int sign = 1) const {
        int s = raise ? sign * m : -sign * m;
        w[i] += s;
        w[i + 1] -= s;
    }
    bool operator==(const OpId&) const = default;
};

// A module over the Schur algebra S(n, D) presented by its weight spaces and
// the action of the divided-power generators, stored block-sparse.
class WeightedModule {
public:
    WeightedModule() = default;
    WeightedModule(FieldPtr f, int n, int max_m);

    const FieldPtr& field() const { return f_; }
    int rank() const { return n_; }  // n, the number of torus coordinates
    int max_m() const { return max_m_; }
    int dim() const { return dim_; }

    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    const Weight& weight(int b) const { return blocks_[b].w; }
    int block_dim(int b) const { return blocks_[b].dim; }
    int block_offset(int b) const { return blocks_[b].offset; }
    std::optional<int> find_block(const Weight& w) const;
    int block_dim_of(const Weight& w) const;

    // Blocks must be added in ascending weight order.
    int add_block(const Weight& w, int dim);
    void set_op(const OpId& op, int src_block, Mat m);

    // Target block of op applied to src_block, if it exists in the module.
    std::optional<int> op_target(const OpId& op, int src_block) const;
    // Block matrix of op out of src_block; nullptr when the action is zero.
    const Mat* op(const OpId& op, int src_block) const;
    std::vector<OpId> op_ids() const;
    int op_index(const OpId& op) const;

    // Modules built internally by the resolution code store only the
    // operators of p-power degree, which generate the hyperalgebra.
    bool generators_only() const { return generators_only_; }
    void set_generators_only(bool g) { generators_only_ = g; }
    bool has_op_degree(int m) const;

    // Optional grade label of each basis vector (module order).
    const std::vector<int>& grades() const { return grades_; }
    void set_grades(std::vector<int> g) { grades_ = std::move(g); }

    // Position in module order of each basis vector in evaluation order.
    const std::vector<int>& eval_position() const { return eval_pos_; }
    void set_eval_position(std::vector<int> p) { eval_pos_ = std::move(p); }

    // Submodule spanned by the blocks whose weight satisfies pred.
    template <class Pred>
    WeightedModule restrict_blocks(Pred pred) const;
    // Homogeneous component of total degree d.
    WeightedModule component(int degree) const;
    std::vector<int> degrees() const;

    // Checks the commutation relations between operators that hold in every
    // module over the hyperalgebra; returns an empty string when they hold.
    std::string check_relations() const;

    bool operator==(const WeightedModule& o) const;

private:
    struct Block {
        Weight w;
        int offset = 0;
        int dim = 0;
    };
    FieldPtr f_;
    int n_ = 0;
    int max_m_ = 0;
    int dim_ = 0;
    std::vector<Block> blocks_;
    std::map<Weight, int> index_;
    std::vector<std::vector<Mat>> ops_;  // [op_index][src_block]; default Mat = zero
    std::vector<int> grades_;
    std::vector<int> eval_pos_;
    bool generators_only_ = false;
};

// The p-power operators of m, a generating family of the hyperalgebra.
std::vector<OpId> generating_ops(const WeightedModule& m);

// Block-diagonal map between weighted modules with the same weights.
class ModuleMap {
public:
    ModuleMap() = default;
    ModuleMap(const WeightedModule* src, const WeightedModule* dst);

    const WeightedModule& source() const { return *src_; }
    const WeightedModule& target() const { return *dst_; }
    // Matrix from source block b to the target block of the same weight.
    const Mat& block(int b) const { return blocks_[b]; }
    void set_block(int b, Mat m) { blocks_[b] = std::move(m); }
    int target_block(int b) const { return tgt_[b]; }

    static ModuleMap from_dense(const WeightedModule* src, const WeightedModule* dst, const Mat& m);
    Mat dense() const;
    ModuleMap compose_after(const ModuleMap& first) const;  // (*this) ∘ first
    // Empty string when the map intertwines every generator.
    std::string check_equivariant() const;
    int rank() const;
    bool is_iso() const;
    bool is_zero() const;

private:
    const WeightedModule* src_ = nullptr;
    const WeightedModule* dst_ = nullptr;
    std::vector<Mat> blocks_;
    std::vector<int> tgt_;  // -1 when the weight is absent in the target
};

WeightedModule direct_sum(const std::vector<const WeightedModule*>& parts);
WeightedModule kuhn_dual(const WeightedModule& m);
// Precomposition with the Frobenius twist: weights scale by p, e^(pm) acts
// as e^(m) and operators of degree prime to p act by zero.
WeightedModule twist_module(const WeightedModule& m, int max_m);

template <class Pred>
WeightedModule WeightedModule::restrict_blocks(Pred pred) const {
    WeightedModule out(f_, n_, max_m_);
    out.set_generators_only(generators_only_);
    std::vector<int> kept(blocks_.size(), -1);
    std::vector<int> grades;
    for (int b = 0; b < num_blocks(); ++b) {
        if (!pred(blocks_[b].w)) continue;
        kept[b] = out.add_block(blocks_[b].w, blocks_[b].dim);
        if (!grades_.empty())
            for (int k = 0; k < blocks_[b].dim; ++k) grades.push_back(grades_[blocks_[b].offset + k]);
    }
    for (const OpId& op : op_ids())
        for (int b = 0; b < num_blocks(); ++b) {
            if (kept[b] < 0) continue;
            auto t = op_target(op, b);
            if (!t || kept[*t] < 0) continue;
            if (const Mat* m = this->op(op, b)) out.set_op(op, kept[b], *m);
        }
    out.set_grades(std::move(grades));
    return out;
}

}  // namespace spfh
