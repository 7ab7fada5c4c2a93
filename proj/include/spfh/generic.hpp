#pragma once

#include <string>
#include <vector>

#include "spfh/homalg.hpp"

namespace spfh {

// Twist level r and the bound 2p^r below which precomposition with I^(1)
// is claimed to be an isomorphism.
struct StableRangeCert {
    int r = 0;
    long long bound = 0;
    // "verified" (recomputed at r+1 and equal), "claimed" (recomputation
    // infeasible) or "contradiction" (recomputation disagreed).
    std::string status = "claimed";

    std::string str() const;
};

// Least r with 2p^r > max_degree.
int stable_twist_level(int p, int max_degree);

struct GenericOptions {
    // Rank n of the evaluation; 0 picks the degree of each computed pair,
    // the smallest faithful choice.
    int n = 0;
    ResolveOptions resolve;
    bool verify = true;
    // Pair homogeneous components whose degrees differ by a power of p by
    // twisting the smaller one; otherwise only equal degrees pair.
    bool align_twists = true;
};

// A pair of homogeneous components (degrees before any twist) and the
// extra twists applied to each side to match them.
struct MatchedPair {
    int f_degree = 0, g_degree = 0;
    int f_twist = 0, g_twist = 0;
};

std::vector<MatchedPair> match_components(const Expr& f, const Expr& g, int p, bool align);

struct TwistDegree {
    int degree = 0;
    long long source = 0, target = 0, rank = 0;
    bool injective() const { return rank == source; }
    bool iso() const { return rank == source && rank == target; }
};

struct TwistMapReport {
    int r = 0;
    int n = 0;
    std::vector<TwistDegree> degrees;
};

// The map Ext^i(F^(r), G^(r)) -> Ext^i(F^(r+1), G^(r+1)) given by
// precomposition with I^(1). The level-(r+1) resolution of F^(r+1) is
// lifted into the twist of the level-r resolution, which is exact but not
// projective, and level-r cocycles are pulled back along the lift.
TwistMapReport twist_map(const Expr& f, const Expr& g, int r, int max_degree, const FieldPtr& field,
                         const GenericOptions& opt = {});

struct GenericResult {
    GradedDims dims;
    StableRangeCert cert;
    std::vector<MatchedPair> pairs;
    int n = 0;  // largest evaluation rank used at level r
};

GenericResult generic_ext(const Expr& f, const Expr& g, int max_degree, const FieldPtr& field,
                          const GenericOptions& opt = {});
// e must be contravariant, cdual(E0); computed through the Tor duality path.
GenericResult generic_tor(const Expr& e, const Expr& g, int max_degree, const FieldPtr& field,
                          const GenericOptions& opt = {});

// Ext(F^(a), G^(b)) at a fixed level, summed over pairs of homogeneous
// components of equal degree.
GradedDims ext_at_level(const Expr& f, int a, const Expr& g, int b, int max_degree, const FieldPtr& field,
                        int n, const ResolveOptions& opt = {});

}  // namespace spfh
