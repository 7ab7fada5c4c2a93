#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spfh {

enum class ExprKind {
    Id,
    Sym,
    Ext,
    Div,
    Ten,
    Twist,       // E ∘ I^(r)
    MultiTwist,  // E ∘ (I^(0) ⊕ I^(a) ⊕ ... ⊕ I^((s-1)a))
    Param,       // E(V ⊗ -), V graded with dims[i] in degree i
    Tensor,
    Sum,
    Compose,     // children[0] ∘ children[1]
    Kuhn,
    Contra,
};

// Immutable functor expression; cheap to copy.
class Expr {
public:
    static Expr id();
    static Expr sym(int d);
    static Expr ext(int d);
    static Expr div(int d);
    static Expr ten(int d);
    static Expr twist(Expr e, int r);
    static Expr multitwist(Expr e, int a, int s);
    static Expr param(Expr e, std::vector<int> graded_dims);
    static Expr tensor(std::vector<Expr> factors);
    static Expr sum(std::vector<Expr> terms);
    static Expr compose(Expr outer, Expr inner);
    static Expr kuhn(Expr e);
    static Expr contra(Expr e);
    // TensorProduct(Div(w_1), ..., Div(w_n)); the projective Γ^w.
    static Expr gamma(const std::vector<int>& weight);

    ExprKind kind() const;
    // Degree for leaves, r for Twist, a for MultiTwist.
    int arg() const;
    // s for MultiTwist.
    int arg2() const;
    const std::vector<int>& dims() const;
    const std::vector<Expr>& children() const;
    const Expr& child() const { return children().front(); }

    // Parseable canonical form.
    std::string str() const;
    std::uint64_t hash() const;
    bool operator==(const Expr& o) const { return str() == o.str(); }

    // Homogeneous degrees occurring, sorted ascending (twists scale by p^r).
    std::vector<int> degrees(int p) const;
    int max_degree(int p) const;
    bool homogeneous(int p) const { return degrees(p).size() <= 1; }
    // True when a ContraDual node occurs outside a Kuhn/Contra pair.
    bool contravariant() const;

private:
    friend struct ExprFactory;
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " at offset " + std::to_string(pos)), pos_(pos) {}
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

inline constexpr int kGrammarVersion = 1;

Expr parse_expr(std::string_view text);

// Rewrites MultiTwist nodes as Compose(E, Sum of twisted identities).
Expr expand_multitwist(const Expr& e);

}  // namespace spfh
