#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "spfh/generic.hpp"
#include "spfh/graded.hpp"

namespace spfh {

// Graded vector space truncated at a finite degree; dims[i] in degree i.
struct GradedSpace {
    std::vector<long long> dims;

    long long at(int degree) const {
        return degree >= 0 && degree < int(dims.size()) ? dims[degree] : 0;
    }
    int max_degree() const { return int(dims.size()) - 1; }

    // k in degrees 2i, 0 <= i < p^r.
    static GradedSpace e_r(int p, int r, int max_degree);
    // k in every even degree.
    static GradedSpace e_infinity(int max_degree);
    // Hom(R^m, R^l) in every even degree, over R = k.
    static GradedSpace t_lm(int l, int m, int max_degree);
};

// Symmetric (= divided, dimensionwise) and exterior algebras of a graded
// space, by polynomial weight: out[w] is the weight-w part.
std::vector<GradedSpace> sym_algebra(const GradedSpace& v, int max_weight);
std::vector<GradedSpace> ext_algebra(const GradedSpace& v, int max_weight);

enum class FfssPair { GS, GL, LS, LL, SS, GG };
FfssPair parse_ffss_pair(const std::string& name);
std::string ffss_pair_name(FfssPair pair);

// Series in (degree, weight of the twisted side, weight of the parametrized
// side). Only weights (d, d·p^r) can carry anything, so storage is by d.
struct TriGradedSeries {
    int p = 2, r = 0;
    int max_degree = 0, max_weight = 0;
    std::vector<GradedSpace> by_weight;

    long long dim(int degree, int twisted_weight, long long param_weight) const;
    long long param_weight(int twisted_weight) const;
};

// Ext*(C^(r), A_V) for the Ext pairs (C, A): S, Λ or Γ algebras on the
// generators ^(r)V placed in degrees 2ip^r + s(p^r − 1).
TriGradedSeries ffss_series(FfssPair pair, long long v_dim, int r, int p, int max_degree, int max_weight);

enum class TorPair { GG, LG, GL, LL, GS, SG };
TorPair parse_tor_pair(const std::string& name);
std::string tor_pair_name(TorPair pair);

// The Tor tables T_*(F_V, G^(r)) in the same indexing as ffss_series.
TriGradedSeries tor_series(TorPair pair, long long v_dim, int r, int p, int max_degree, int max_weight);

// Tor table keyed as (degree, weight of F_V, weight of G^(r)), the order in
// which the functors appear. The weight of the twisted side of an Ext entry
// at (i, d, e) corresponds to position three here and the parametrized side
// to position two.
using TorTable = std::map<std::tuple<int, long long, int>, long long>;
TorTable relabel_tor(const TriGradedSeries& s);
// Nonzero entries of an Ext series keyed as (degree, C-weight, A-weight).
std::map<std::tuple<int, int, long long>, long long> ext_table(const TriGradedSeries& s);

// Graded dimensions of G(V) for a graded V. Supports leaves, Twist, Sum,
// Tensor, Compose, MultiTwist and Kuhn; throws std::invalid_argument on
// anything else.
GradedSpace param_graded(const Expr& g, const GradedSpace& v, int p);

// G(E_∞) truncated at max_degree, the closed form of Ext*(Γ^d, G).
GradedSpace e_infty_ext(const Expr& g, int max_degree, int p);
// Engine side: the total-degree dims of Ext*(F, G_{E}) with E = E_∞
// truncated at max_degree, evaluated at rank n (0 = degree of F).
GradedDims e_infty_ext_engine(const Expr& f, const Expr& g, int max_degree, const FieldPtr& field, int n = 0,
                              const ResolveOptions& opt = {});

// Homology of GL_∞(R) with coefficients Λ^d(Hom(R^m, R^l)): S^{d/2}(T_lm)
// for even d and zero for odd d.
GradedSpace gl_exterior_homology(int d, int l, int m, int max_degree);

// The factor Tor^gen((F_{Hom(R^m,R^l)})^∨, G) computed by the generic
// engine, with R = k.
GenericResult gl_factor(const Expr& f, const Expr& g, int l, int m, int max_degree, const FieldPtr& field,
                        const GenericOptions& opt = {});
// Engine route to the GL exterior-power homology: sum of gl_factor(Λ^i, Λ^{d-i}) over i.
GradedDims gl_exterior_homology_engine(int d, int l, int m, int max_degree, const FieldPtr& field,
                           const GenericOptions& opt = {});

// Submodule of basis vectors with the given grade label; operators must
// preserve grades.
WeightedModule grade_component(const WeightedModule& m, int grade);

}  // namespace spfh
