#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "spfh/graded.hpp"
#include "spfh/module.hpp"
#include "spfh/polyfun.hpp"

namespace spfh {

// Γ^λ(k^n) with a basis of operator words applied to its cyclic generator
// x_1^(λ_1) ⊗ ... ⊗ x_n^(λ_n).
struct GammaRecipe {
    struct Word {
        int parent = -1;  // -1 for the generator
        OpId op;
        int block = 0;
    };
    Weight lambda;
    std::shared_ptr<const WeightedModule> module;
    int gen_block = 0;
    int gen_offset = 0;
    std::vector<Word> words;
    std::vector<std::vector<int>> block_words;  // words forming the basis of each block
    std::vector<Mat> block_inverse;             // inverse of the matrix of those words
};

std::shared_ptr<const GammaRecipe> gamma_recipe(const Weight& lambda, const FieldPtr& f);

// Every recipe word applied to v, a vector of the weight-λ block of n.
// Words whose weight is absent from n get an empty vector.
std::vector<Vec> word_images(const GammaRecipe& r, const WeightedModule& n, const Vec& v);
// The same words as matrices n_λ -> n_μ.
std::vector<Mat> word_matrices(const GammaRecipe& r, const WeightedModule& n);
// Block rb of the map Γ^λ -> n sending the generator to the vector whose
// word images are given; `rows` is the dimension of the target block.
Mat yoneda_block(const GammaRecipe& r, const std::vector<Vec>& images, int rb, int rows);

// Block layout of a direct sum of standard projectives, built without
// materializing the operators.
struct GammaSum {
    FieldPtr field;
    int n = 0;
    std::vector<Weight> summands;
    std::vector<std::shared_ptr<const GammaRecipe>> recipes;
    std::vector<Weight> block_weights;
    std::vector<int> block_dims;
    std::vector<std::vector<std::pair<int, int>>> parts;  // per block: (summand, recipe block)
    std::vector<std::vector<int>> part_offsets;
    std::vector<int> gen_block, gen_offset;              // generator position per summand
    std::shared_ptr<const WeightedModule> module;         // null until materialized

    static GammaSum build(const FieldPtr& f, int n, std::vector<Weight> summands);
    int find_block(const Weight& w) const;
    void materialize();
    long long dim() const;
};

enum class CoverPolicy { DominantFirst, Reverse };
std::string policy_name(CoverPolicy p);

struct ResolveOptions {
    CoverPolicy policy = CoverPolicy::DominantFirst;
    long long block_cap = 200000;
    // Largest standard projective Γ^λ(k^n) that may be evaluated.
    long long summand_cap = 5000;
};

struct ResolutionStep {
    GammaSum proj;
    // d_i of each summand generator as (block, vector) in P_{i-1}, or in the
    // resolved module when i = 0.
    std::vector<std::pair<int, Vec>> images;
    std::shared_ptr<const ModuleMap> diff;  // P_i -> P_{i-1}; null until materialized
    // Exactness: rank d_i equals the nullity of d_{i-1} (dim M for i = 0).
    long long rank = -1, expected_rank = -1;
};

class Resolution {
public:
    std::shared_ptr<const WeightedModule> target;
    CoverPolicy policy = CoverPolicy::DominantFirst;
    std::vector<ResolutionStep> steps;

    int length() const { return int(steps.size()) - 1; }
    // True when every computed step carries a matching rank certificate.
    bool certified() const;
    // Builds the modules and differentials of steps 0..upto.
    void materialize(int upto);
    const WeightedModule& module(int i) const { return *steps[i].proj.module; }
    const WeightedModule& codomain(int i) const { return i == 0 ? *target : module(i - 1); }
};

// Greedy generators of m under the operator action, as (block, vector).
std::vector<std::pair<int, Vec>> choose_generators(const WeightedModule& m, CoverPolicy policy);

// Projective resolution P_length -> ... -> P_0 -> m by sums of Γ^λ. Steps
// 0..length-1 are materialized; the last step records only its generators.
Resolution resolve(std::shared_ptr<const WeightedModule> m, int length, const ResolveOptions& opt = {});

// Hom(P_•, N) with Hom(Γ^λ, N) = N_λ.
struct HomComplex {
    std::vector<int> dims;
    std::vector<std::vector<int>> offsets;  // per degree and summand
    std::vector<Mat> delta;                 // delta[i]: C^i -> C^(i+1)
};

// Caches the word matrices of each recipe acting on a fixed target module.
class WordCache {
public:
    explicit WordCache(const WeightedModule& n) : n_(&n) {}
    const std::vector<Mat>& get(const GammaRecipe& r);
    const WeightedModule& target() const { return *n_; }

private:
    const WeightedModule* n_;
    std::mutex mutex_;
    std::map<Weight, std::vector<Mat>> cache_;
};

// Matrix of φ -> (φ(x_b))_b from Hom(P, N) coordinates to ⊕_b N_{weight of x_b}.
// A block index of -1 marks a zero vector whose row block has dimension
// row_dims[b].
Mat evaluation_matrix(const GammaSum& p, WordCache& words, const std::vector<std::pair<int, Vec>>& xs,
                      const std::vector<int>& row_dims);

HomComplex hom_complex(const Resolution& res, const WeightedModule& n, int max_degree);
std::vector<long long> cohomology_dims(const HomComplex& c);
// Cocycles whose classes form a basis of H^i, as columns.
Mat cohomology_basis(const HomComplex& c, int i);

GradedDims ext(const Resolution& res, const WeightedModule& n, int max_degree);
GradedDims ext(const WeightedModule& m, const WeightedModule& n, int max_degree, const ResolveOptions& opt = {});

// Basis of the module maps m -> n, solved directly as the commutant of the
// generating operators.
std::vector<ModuleMap> hom_space(const WeightedModule& m, const WeightedModule& n);

// Tor against the contravariant dual of e0: dimensionwise Ext(f, e0),
// computed through Kuhn duality as Ext(e0#, f#), which resolves e0# rather
// than f.
GradedDims tor_dual(const WeightedModule& e0, const WeightedModule& f, int max_degree,
                    const ResolveOptions& opt = {});
// Tor(e, f) for a contravariant expression e = cdual(e0).
GradedDims tor(const Expr& e, const Expr& f, int n, const FieldPtr& field, int max_degree,
               const ResolveOptions& opt = {});

// An augmented exact complex T_• -> M' viewed through raw pointers.
struct ComplexView {
    const WeightedModule* augmented = nullptr;
    std::vector<const WeightedModule*> modules;
    std::vector<const ModuleMap*> diffs;  // diffs[0]: T_0 -> M'
};
ComplexView view_of(Resolution& res, int upto);

// Images of the summand generators of the source resolution under a chain
// map over f: res.target -> view.augmented; entry [i][b] is (block, vector)
// in T_i, block -1 when the image is zero.
using ChainLift = std::vector<std::vector<std::pair<int, Vec>>>;
ChainLift chain_lift(Resolution& src, const ComplexView& tgt, const ModuleMap& f, int max_degree);

// The cochain map Hom(T_i, N) -> Hom(P_i, N') induced by a chain lift into
// a Γ-sum resolution T (or a twist of one, which keeps its block order).
// N' must agree with N on the basis of every weight reached.
Mat induced_cochain_map(const GammaSum& tgt, WordCache& words, const std::vector<std::pair<int, Vec>>& gen_images,
                        const std::vector<Weight>& src_summands, const WeightedModule& src_coeffs);

// Rank of the map H^i(a) -> H^i(b) induced by a cochain map t: a^i -> b^i.
// Throws if t does not send cocycles to cocycles.
long long induced_rank(const HomComplex& a, const HomComplex& b, const Mat& t, int i);

ModuleMap identity_map(const WeightedModule& m);

}  // namespace spfh
