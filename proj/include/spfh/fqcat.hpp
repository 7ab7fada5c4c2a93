#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "spfh/graded.hpp"
#include "spfh/module.hpp"
#include "spfh/polyfun.hpp"

namespace spfh {

// A generating morphism of the truncated category. Transvections are the
// adjacent ones I + E_{i,i±1}; scalings multiply coordinate i by the
// primitive element of F_q.
struct CatGenerator {
    enum Kind { RaiseTransvection, LowerTransvection, Scaling, Inclusion, Projection };
    Kind kind;
    int source = 0, target = 0;
    int i = 0;
    Mat matrix;  // over F_q, target x source
};

// One application of generator `index` of generators(object).
struct GenStep {
    int object = 0;
    int index = 0;
};

// Objects F_q^0 .. F_q^N and all linear maps. A morphism F_q^a -> F_q^b is a
// b x a matrix coded by its columns: code = Σ_c v_c q^(b c), where v_c is
// the base-q code of column c (digit r = entry in row r).
class TruncCat {
public:
    // Checks the default caps: q in {2, 3, 4}, N <= 4 at q = 2, N <= 3 otherwise.
    TruncCat(int q, int N, bool enforce_caps = true);

    int q() const { return q_; }
    int N() const { return n_; }
    const FieldPtr& fq() const { return fq_; }

    long long vec_count(int m) const { return pow_q_[m]; }
    long long hom_count(int a, int b) const;

    Mat decode(int a, int b, long long code) const;
    long long encode(const Mat& m) const;
    // Codes of phi(v) for every v in F_q^a, phi: F_q^a -> F_q^b.
    std::vector<long long> vector_table(const Mat& phi) const;
    // Code of phi ∘ psi, psi: F_q^j -> F_q^a given by its code; table is
    // vector_table(phi) and b the target of phi.
    long long compose(const std::vector<long long>& table, int j, int a, int b, long long psi) const;

    // Generators with the given source object.
    const std::vector<CatGenerator>& generators(int m) const { return gens_[m]; }
    // A word in the generators composing to psi (b x a); the first step is
    // applied first.
    std::vector<GenStep> factor(const Mat& psi) const;
    // Product of the generator matrices along a word, for checking.
    Mat evaluate(const std::vector<GenStep>& word, int a) const;

private:
    struct ElemOp {
        bool scale = false;
        int i = 0, j = 0;
        Elem c = 0;
    };
    void emit(const ElemOp& op, int m, std::vector<GenStep>& out) const;
    void emit_transvection(int i, int j, Elem c, int m, std::vector<GenStep>& out) const;
    int gen_index(int m, CatGenerator::Kind kind, int i) const;

    int q_, n_;
    FieldPtr fq_;
    std::vector<long long> pow_q_;
    std::vector<std::vector<CatGenerator>> gens_;
};

using CatPtr = std::shared_ptr<const TruncCat>;

// A functor from the truncated category to k-vector spaces, stored by its
// values on objects and the matrices of the generating morphisms.
class CatModule {
public:
    CatModule() = default;
    CatModule(CatPtr cat, FieldPtr k);

    const CatPtr& cat() const { return cat_; }
    const FieldPtr& field() const { return k_; }
    int dim(int m) const { return dims_[m]; }
    const std::vector<int>& dims() const { return dims_; }
    long long total_dim() const;

    void set_dims(std::vector<int> d);
    const Mat& gen_action(int m, int index) const { return gens_[m][index]; }
    void set_gen_action(int m, int index, Mat a) { gens_[m][index] = std::move(a); }

    // Action of an arbitrary morphism, through its factorization; memoized.
    Mat act(const Mat& psi) const;
    Vec act(const Mat& psi, const Vec& v) const;

    // Empty when the generator matrices have the right shapes and
    // samples random composable pairs (a -> b -> c) satisfy
    // act(g f) = act(g) act(f).
    std::string check_functorial(int samples, unsigned seed = 1) const;

private:
    CatPtr cat_;
    FieldPtr k_;
    std::vector<int> dims_;
    std::vector<std::vector<Mat>> gens_;
    struct Cache {
        std::mutex mutex;
        std::map<std::tuple<int, int, long long>, Mat> maps;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// F_q embedded in k, applied entrywise.
Mat embed_matrix(const Mat& over_fq, const FieldPtr& k);

// P^j = k[Hom(F_q^j, -)] with its permutation action; dims q^(jm).
CatModule build_proj(const CatPtr& cat, int j, const FieldPtr& k);
// t*E: the objects are E(k^m) in evaluation bases and the generators act
// by apply(E, -). k must contain F_q.
CatModule restrict_functor(const Expr& e, const CatPtr& cat, const FieldPtr& k);
// The same restriction built from a Schur-algebra module W at rank n >= N:
// the value at m is the span of the weight blocks supported on the first m
// coordinates, and the generators act through divided powers and weights.
CatModule restrict_module(const WeightedModule& w, const CatPtr& cat);
// Blocks of w supported on the first m coordinates, in block order.
std::vector<int> supported_blocks(const WeightedModule& w, int m);
// Position in restrict_module coordinates at object m of each evaluation
// basis vector of E(k^m), for w = eval(E, n).
std::vector<int> restriction_positions(const Expr& e, const WeightedModule& w, int m);
// Objectwise dual precomposed with transposition, V -> X(V*)*.
CatModule cat_kuhn_dual(const CatModule& x);
CatModule cat_direct_sum(const CatModule& a, const CatModule& b);

// A natural transformation, one matrix per object.
struct CatMap {
    std::vector<Mat> components;
};
std::string check_natural(const CatModule& src, const CatModule& dst, const CatMap& f);

// Basis of natural transformations src -> dst, solved directly.
std::vector<CatMap> cat_hom(const CatModule& src, const CatModule& dst);

struct CatOptions {
    // Largest value dim P_i(m) of a projective term whose kernel is taken.
    long long dim_cap = 20000;
    // Largest dim P_L(m) for the top term, which only enters through the row
    // space of its differential.
    long long top_dim_cap = 200000;
    // Top-degree cocycles from the row space of d_L instead of resolving one
    // step further.
    bool top_by_rowspace = true;
};

// A direct sum of standard projectives P^(j_s).
struct ProjSum {
    CatPtr cat;
    std::vector<int> objects;  // j_s
    long long dim(int m) const;
    long long offset(int s, int m) const;
};

struct CatResolutionStep {
    ProjSum proj;
    // Generator images: in M(j_s) for step 0, in P_{i-1}(j_s) otherwise.
    std::vector<Vec> images;
    // Per object: rank of d_i and the dimension of ker d_{i-1} (dim M at
    // i = 0) it must reach; -1 when not computed.
    std::vector<long long> rank, expected;
};

struct CatResolution {
    CatPtr cat;
    FieldPtr field;
    std::vector<CatResolutionStep> steps;
    bool certified() const;
    int length() const { return int(steps.size()) - 1; }
};

CatResolution cat_resolve(const CatModule& m, int length, const CatOptions& opt = {});

// Hom(Q_•, N) with Hom(P^j, N) = N(j).
struct CatHomComplex {
    std::vector<int> dims;
    std::vector<std::vector<int>> offsets;
    std::vector<Mat> delta;  // delta[i]: C^i -> C^(i+1)
};
CatHomComplex cat_hom_complex(const CatResolution& res, const CatModule& n, int max_degree);
std::vector<long long> cat_cohomology_dims(const CatHomComplex& c);
// dim of the cocycles in degree L of Hom(Q_•, N), L = res.length(): the
// maps Q_L -> N vanishing on ker d_L, found objectwise as the maps whose
// rows lie in the row space of d_L(m).
long long cat_top_cocycles(const CatResolution& res, const CatModule& m, const CatModule& n, const CatOptions& opt = {});

// Truncated-category Ext; degree 0 of the resolution is checked against
// cat_hom. With max_degree 0 only the direct solver runs.
GradedDims cat_ext(const CatModule& m, const CatModule& n, int max_degree, const CatOptions& opt = {});
// Tor(X^∨, B) for the contravariant dual of a covariant X, through a
// resolution of X# tensored with B. Dimensionwise equal to Ext(B, X).
GradedDims cat_tor(const CatModule& x, const CatModule& b, int max_degree, const CatOptions& opt = {});

// Builds a module for a given truncation N.
using CatRecipe = std::function<CatModule(const CatPtr&)>;
CatRecipe functor_recipe(const Expr& e, const FieldPtr& k);

struct StabilizationReport {
    std::vector<int> truncations;
    std::vector<GradedDims> tables;
    // stable[i]: degree i unchanged over the last two truncations.
    std::vector<bool> stable;
    std::string certificate(int degree) const;
};
StabilizationReport stabilization_scan(const CatRecipe& m, const CatRecipe& n, int q, int max_degree,
                                       const std::vector<int>& truncations, const CatOptions& opt = {});

}  // namespace spfh
