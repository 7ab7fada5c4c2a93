#include "spfh/field.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace spfh {

namespace {

struct ConwayEntry {
    int p;
    int r;
    std::vector<int> coeffs;
};

const std::vector<ConwayEntry>& conway_table() {
    static const std::vector<ConwayEntry> table = {
#include "conway_table.inc"
    };
    return table;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

int least_primitive_root(int p) {
    if (p == 2) return 1;
    std::vector<int> factors;
    int m = p - 1;
    for (int d = 2; d * d <= m; ++d) {
        if (m % d == 0) {
            factors.push_back(d);
            while (m % d == 0) m /= d;
        }
    }
    if (m > 1) factors.push_back(m);
    auto powmod = [p](long long b, long long e) {
        long long r = 1;
        b %= p;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    for (int g = 2; g < p; ++g) {
        bool ok = true;
        for (int f : factors)
            if (powmod(g, (p - 1) / f) == 1) ok = false;
        if (ok) return g;
    }
    return 1;
}

}  // namespace

std::vector<int> conway_polynomial(int p, int r) {
    if (!is_prime(p) || r < 1 || ipow(p, r) > (1 << 16)) return {};
    for (const auto& e : conway_table())
        if (e.p == p && e.r == r) return e.coeffs;
    if (r == 1) {
        int g = least_primitive_root(p);
        return {(p - g) % p, 1};
    }
    return {};
}

Field::Field(int p, int r, std::vector<int> modulus)
    : p_(p), r_(r), q_(static_cast<int>(ipow(p, r))), modulus_(std::move(modulus)) {
    // Power table of the Conway root x in GF(p)[x]/(modulus).
    exp_.assign(2 * std::size_t(q_ - 1) + 2, 0);
    log_.assign(q_, 0);
    std::vector<int> cur(r_, 0);
    auto encode = [&](const std::vector<int>& v) {
        int code = 0;
        for (int i = r_ - 1; i >= 0; --i) code = code * p_ + v[i];
        return static_cast<Elem>(code);
    };
    cur[0] = 1;
    for (int k = 0; k < q_ - 1; ++k) {
        Elem code = encode(cur);
        exp_[k] = code;
        exp_[k + q_ - 1] = code;
        log_[code] = k;
        // cur *= x
        if (r_ == 1) {
            int root = (p_ - modulus_[0]) % p_;
            cur[0] = cur[0] * root % p_;
        } else {
            int top = cur[r_ - 1];
            for (int i = r_ - 1; i > 0; --i) cur[i] = cur[i - 1];
            cur[0] = 0;
            for (int i = 0; i < r_; ++i) cur[i] = ((cur[i] - top * modulus_[i]) % p_ + p_) % p_;
        }
    }
    primitive_ = exp_[q_ == 2 ? 0 : 1];
    if (p_ != 2 && r_ > 1) {
        neg_table_.resize(q_);
        for (int a = 0; a < q_; ++a) {
            int code = 0, mulp = 1, t = a;
            for (int i = 0; i < r_; ++i) {
                code += ((p_ - t % p_) % p_) * mulp;
                t /= p_;
                mulp *= p_;
            }
            neg_table_[a] = static_cast<Elem>(code);
        }
        if (q_ <= 1024) {
            add_table_.resize(std::size_t(q_) * q_);
            for (int a = 0; a < q_; ++a)
                for (int b = 0; b < q_; ++b)
                    add_table_[std::size_t(a) * q_ + b] = add_digits(Elem(a), Elem(b));
        }
    }
}

Elem Field::add_digits(Elem a, Elem b) const {
    int code = 0, mulp = 1;
    int x = a, y = b;
    for (int i = 0; i < r_; ++i) {
        code += ((x % p_ + y % p_) % p_) * mulp;
        x /= p_;
        y /= p_;
        mulp *= p_;
    }
    return static_cast<Elem>(code);
}

FieldPtr Field::get(int p, int r) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, FieldPtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, r});
    if (it != cache.end()) return it->second;
    auto mod = conway_polynomial(p, r);
    if (mod.empty())
        throw std::invalid_argument("unsupported field GF(" + std::to_string(p) + "^" + std::to_string(r) + ")");
    auto f = std::make_shared<const Field>(p, r, std::move(mod));
    cache.emplace(std::make_pair(p, r), f);
    return f;
}

FieldPtr Field::of_order(int q) {
    for (int p = 2; p <= q; ++p) {
        if (!is_prime(p) || q % p) continue;
        int r = 0;
        long long t = 1;
        while (t < q) {
            t *= p;
            ++r;
        }
        if (t != q) break;
        return get(p, r);
    }
    throw std::invalid_argument("not a prime power: " + std::to_string(q));
}

std::string Field::name() const {
    return "GF(" + std::to_string(q_) + ")";
}

Elem Field::inv(Elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    if (q_ == 2) return 1;
    return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
}

Elem Field::exp(long long e) const {
    long long m = q_ - 1;
    e %= m;
    if (e < 0) e += m;
    return exp_[e];
}

Elem Field::pow(Elem a, long long e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    long long m = q_ - 1;
    long long l = (static_cast<long long>(log_[a]) * (e % m)) % m;
    if (l < 0) l += m;
    return exp_[l];
}

Elem Field::frobenius(Elem a, int steps) const {
    if (a == 0 || r_ == 1) return a;
    int s = ((steps % r_) + r_) % r_;
    return pow(a, ipow(p_, s));
}

Elem Field::from_int(long long v) const {
    long long m = v % p_;
    if (m < 0) m += p_;
    return static_cast<Elem>(m);
}

Elem Field::embed_from(const Field& sub, Elem x) const {
    if (!contains(sub)) throw std::invalid_argument("not a subfield");
    if (x == 0) return 0;
    if (sub.r_ == r_) return x;
    long long scale = (static_cast<long long>(q_) - 1) / (sub.q_ - 1);
    return exp(static_cast<long long>(sub.log_[x]) * scale);
}

}  // namespace spfh
