#pragma once

#include <string>
#include <vector>

#include "spfh/matrix.hpp"

namespace spfh::orbit {

// A module over an algebra given by the matrices of the algebra's basis.
struct AlgebraModule {
    FieldPtr f;
    int dim = 0;
    std::vector<Mat> act;
};

// The Schur algebra S(n, d) as the span of the Σ_d-orbit sums of matrix
// units on (k^n)^{⊗d}; a complete basis, used as an independent oracle.
struct OrbitSchurAlgebra {
    FieldPtr f;
    int n = 0, d = 0;
    std::vector<Mat> basis;

    int dim() const { return int(basis.size()); }
    AlgebraModule tensor_space() const;
    AlgebraModule regular() const;
    // "ten", "sym", "div", "ext" or "frob" (p-th powers inside Sym^p, d = p)
    AlgebraModule functor_module(const std::string& which) const;
};

OrbitSchurAlgebra orbit_schur_algebra(const FieldPtr& f, int n, int d);

AlgebraModule subquotient(const AlgebraModule& m, const Mat& sub, const Mat& rel);
AlgebraModule kuhn_transpose(const OrbitSchurAlgebra& a, const AlgebraModule& m);

long long hom_dim(const AlgebraModule& a, const AlgebraModule& b);
// Ext over the algebra through a resolution by free modules.
std::vector<long long> ext_dims(const OrbitSchurAlgebra& a, const AlgebraModule& m, const AlgebraModule& n,
                                int max_degree);

}  // namespace spfh::orbit
