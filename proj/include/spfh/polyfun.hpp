#pragma once

#include <memory>
#include <vector>

#include "spfh/expr.hpp"
#include "spfh/matrix.hpp"
#include "spfh/module.hpp"

namespace spfh {

// Matrix over the truncated polynomial ring GF(q)[t]/(t^T), stored as its
// T coefficient matrices.
class PolyMat {
public:
    PolyMat() = default;
    PolyMat(FieldPtr f, int rows, int cols, int T);
    static PolyMat constant(const Mat& m, int T);

    const FieldPtr& field() const { return f_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int trunc() const { return T_; }
    const Mat& coeff(int k) const { return c_[k]; }
    Mat& coeff(int k) { return c_[k]; }

    PolyMat transpose() const;
    PolyMat operator*(const PolyMat& o) const;
    // Entrywise a t^k -> a^(p^r) t^(k p^r), the Frobenius twist over the ring.
    PolyMat frobenius(int r) const;

private:
    FieldPtr f_;
    int rows_ = 0, cols_ = 0, T_ = 1;
    std::vector<Mat> c_;
};

PolyMat kron(const PolyMat& a, const PolyMat& b);
PolyMat block_diag(const std::vector<PolyMat>& parts);

// E(f) for a matrix f: k^a -> k^b over GF(q)[t]/(t^T), in evaluation-order
// bases of E(k^a) and E(k^b). E must be covariant.
PolyMat apply(const Expr& e, const PolyMat& f);
Mat apply(const Expr& e, const Mat& f);

long long functor_dim(const Expr& e, int n);

struct BasisLabels {
    std::vector<Weight> weights;  // evaluation order
    std::vector<int> grades;
};
BasisLabels basis_labels(const Expr& e, int n, int p);

struct EvalOptions {
    // Largest divided-power degree m of the operators; 0 picks the
    // maximal degree of the expression.
    int max_m = 0;
    // Abort when a weight block exceeds this many columns.
    long long block_cap = 200000;
};

// F(k^n) as a weighted module. Operators are read off from F applied to
// 1 + t E_{i,i+1} and 1 + t E_{i+1,i}.
WeightedModule eval(const Expr& e, int n, const FieldPtr& f, const EvalOptions& opt = {});
// Memoized eval keyed by (expression, n, field, options).
std::shared_ptr<const WeightedModule> eval_cached(const Expr& e, int n, const FieldPtr& f,
                                                  const EvalOptions& opt = {});
void clear_eval_cache();

// The weight-sorted module basis restricted to the weights supported in the
// first m coordinates, as positions in evaluation order.
std::vector<int> support_positions(const BasisLabels& labels, int m);

// Compositions of d into n parts, in the enumeration order used for
// symmetric and divided powers.
std::vector<Weight> compositions(int d, int n);

class ResourceCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace spfh
