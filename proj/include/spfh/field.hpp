#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace spfh {

// Field elements are encoded as integers 0..q-1: the base-p digits are the
// coefficients of the element in the power basis of a Conway root.
using Elem = std::uint16_t;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
public:
    // Returns the shared instance of GF(p^r). Throws std::invalid_argument
    // if p is not prime or p^r exceeds 2^16.
    static FieldPtr get(int p, int r = 1);
    static FieldPtr of_order(int q);

    int p() const { return p_; }
    int r() const { return r_; }
    int q() const { return q_; }
    bool char2() const { return p_ == 2; }
    bool prime_field() const { return r_ == 1; }
    std::string name() const;

    Elem zero() const { return 0; }
    Elem one() const { return 1; }

    Elem add(Elem a, Elem b) const {
        if (p_ == 2) return static_cast<Elem>(a ^ b);
        if (r_ == 1) {
            unsigned s = unsigned(a) + b;
            return static_cast<Elem>(s >= unsigned(p_) ? s - p_ : s);
        }
        if (!add_table_.empty()) return add_table_[std::size_t(a) * q_ + b];
        return add_digits(a, b);
    }
    Elem neg(Elem a) const {
        if (p_ == 2 || a == 0) return a;
        if (r_ == 1) return static_cast<Elem>(p_ - a);
        return neg_table_[a];
    }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const {
        if (a == 0 || b == 0) return 0;
        if (r_ == 1) return static_cast<Elem>((unsigned(a) * b) % unsigned(p_));
        return exp_[log_[a] + log_[b]];
    }
    Elem inv(Elem a) const;
    Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
    Elem pow(Elem a, long long e) const;

    // x -> x^(p^steps); negative steps invert the Frobenius.
    Elem frobenius(Elem a, int steps) const;

    // Image of an integer under Z -> F_p -> GF(q).
    Elem from_int(long long v) const;

    // A fixed primitive element (the Conway root).
    Elem primitive() const { return primitive_; }
    int log(Elem a) const { return log_[a]; }
    Elem exp(long long e) const;

    // Conway polynomial, monic, coefficients low to high.
    std::span<const int> modulus() const { return modulus_; }

    // Canonical embedding of the subfield `sub` (Conway compatibility).
    Elem embed_from(const Field& sub, Elem x) const;
    bool contains(const Field& sub) const { return sub.p_ == p_ && r_ % sub.r_ == 0; }

    Field(int p, int r, std::vector<int> modulus);

private:
    Elem add_digits(Elem a, Elem b) const;

    int p_, r_, q_;
    std::vector<int> modulus_;
    std::vector<Elem> exp_;  // length 2(q-1)
    std::vector<int> log_;   // log_[0] unused
    std::vector<Elem> add_table_;
    std::vector<Elem> neg_table_;
    Elem primitive_ = 1;
};

// Conway polynomial lookup; computes prime-field entries missing from the
// shipped table. Returns an empty vector outside the supported range.
std::vector<int> conway_polynomial(int p, int r);

}  // namespace spfh
