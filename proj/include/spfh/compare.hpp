#pragma once

#include <string>
#include <vector>

#include "spfh/fqcat.hpp"
#include "spfh/homalg.hpp"

namespace spfh {

// One degree of a comparison map Ext_P -> Ext over the truncated category.
struct ComparisonRow {
    int degree = 0;
    long long source = 0, target = 0, rank = 0;
    // "iso", "not surjective", "not injective" or "neither".
    std::string verdict;
    bool predicted_iso = false;
    // Target dimension unchanged at N + 1; "unchecked" when N + 1 is over
    // the caps.
    std::string stability = "unchecked";
    bool stable() const { return stability.rfind("stable", 0) == 0; }
    std::string certificate;
    // A predicted isomorphism that failed on a stable row.
    bool contradiction() const { return predicted_iso && verdict != "iso" && stable(); }
};

struct ComparisonReport {
    // "strong", "generalized-first-form" or "generalized-second-form".
    std::string map;
    std::string f, g;
    int q = 0, r = 0, s = 1;
    int twist_level = 0;
    int N = 0;
    int rank_n = 0;  // evaluation rank on the strict polynomial side
    // The homogeneous components actually paired on each side.
    std::string components;
    std::vector<ComparisonRow> rows;

    bool contradiction() const;
};

struct CompareOptions {
    int max_degree = 0;
    // Twist level of the strict polynomial side; -1 picks the least multiple
    // of r with 2p^level above max_degree.
    int twist_level = -1;
    // Recompute at the next admissible twist level and record agreement.
    bool verify_next_level = true;
    // Recompute the target at N + 1.
    bool check_stability = true;
    // Nonzero: perturb each particular solution of the chain lift by a
    // random kernel element (a chain-homotopic lift).
    unsigned lift_seed = 0;
    ResolveOptions resolve;
    CatOptions cat;
};

// Φ: Ext_P(F^(n), G^(n)) -> Ext(t*F, t*G) over the truncation N of the
// F_q-vector spaces, k = F_q. n = twist level, a multiple of r where q = p^r,
// so that t*F^(n) = t*F on F_q-points.
ComparisonReport strong_phi(const Expr& f, const Expr& g, int q, int N, const CompareOptions& opt = {});

// Ext_P(F^(rs-r), G^(r|s^2)) -> Ext(t*F, t*G): the strong map for the pair
// (F^(rs-r), component of G^(r|s^2) of the same degree), followed by the
// push-forward along G(sum) for the fold map V^(s^2) -> V.
ComparisonReport gen_comp_map(const Expr& f, const Expr& g, int q, int s, int N, const CompareOptions& opt = {});

// The induced maps on cohomology of two chain lifts of the same pair agree
// (difference lands in the coboundaries) in every degree up to max_degree.
bool lift_independent(const Expr& f, const Expr& g, int q, int N, int max_degree, unsigned seed_a, unsigned seed_b);

struct SuiteInstance {
    std::string map = "strong";  // "strong" or "generalized-second-form"
    std::string f, g;
    int q = 2, s = 1, N = 2;
    int max_degree = 0;
};

// The strong-map examples shipped as the default configuration.
std::vector<SuiteInstance> default_verdict_config();
std::vector<ComparisonReport> verdict_suite(const std::vector<SuiteInstance>& config, int workers = 1);

}  // namespace spfh
