// Regenerates src/field/conway_table.inc by exhaustive search.
// Usage: gen_conway > src/field/conway_table.inc
#include <cstdint>
#include <cstdio>
#include <map>
#include <utility>
#include <vector>

namespace {

using Poly = std::vector<int>;  // coefficients low -> high, elements of F_p

struct Ring {
    int p;
    Poly mod;  // monic, degree r
    int r() const { return static_cast<int>(mod.size()) - 1; }

    Poly mul(const Poly& a, const Poly& b) const {
        std::vector<long> t(2 * r(), 0);
        for (int i = 0; i < r(); ++i)
            for (int j = 0; j < r(); ++j) t[i + j] += static_cast<long>(a[i]) * b[j];
        for (int k = 2 * r() - 2; k >= r(); --k) {
            long c = t[k] % p;
            if (c == 0) continue;
            for (int i = 0; i <= r(); ++i) t[k - r() + i] -= c * mod[i];
        }
        Poly out(r());
        for (int i = 0; i < r(); ++i) out[i] = static_cast<int>(((t[i] % p) + p) % p);
        return out;
    }

    Poly pow(Poly a, uint64_t e) const {
        Poly res(r(), 0);
        res[0] = 1;
        while (e) {
            if (e & 1) res = mul(res, a);
            a = mul(a, a);
            e >>= 1;
        }
        return res;
    }

    Poly x() const {
        Poly v(r(), 0);
        if (r() == 1) {
            v[0] = ((-mod[0]) % p + p) % p;
        } else {
            v[1] = 1;
        }
        return v;
    }

    bool is_one(const Poly& a) const {
        if (a[0] != 1) return false;
        for (int i = 1; i < r(); ++i)
            if (a[i]) return false;
        return true;
    }
};

std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> f;
    for (uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            f.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) f.push_back(n);
    return f;
}

uint64_t ipow(uint64_t b, int e) {
    uint64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::map<std::pair<int, int>, Poly> table;

// Evaluates the polynomial c (over F_p) at the ring element y.
Poly eval_at(const Ring& R, const Poly& c, const Poly& y) {
    Poly acc(R.r(), 0);
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) {
        acc = R.mul(acc, y);
        acc[0] = (acc[0] + c[i]) % R.p;
    }
    return acc;
}

Poly find_conway(int p, int r) {
    const uint64_t order = ipow(p, r) - 1;
    const auto factors = prime_factors(order);
    const uint64_t count = ipow(p, r);
    // Candidate k encodes (a_{r-1}, ..., a_0) in base p, most significant first.
    for (uint64_t k = 0; k < count; ++k) {
        std::vector<int> a(r);
        uint64_t t = k;
        for (int i = 0; i < r; ++i) {
            a[i] = static_cast<int>(t % p);
            t /= p;
        }
        if (a[0] == 0) continue;
        Poly mod(r + 1);
        mod[r] = 1;
        for (int i = 0; i < r; ++i) {
            int sign = ((r - i) % 2 == 0) ? 1 : -1;
            mod[i] = ((sign * a[i]) % p + p) % p;
        }
        Ring R{p, mod};
        Poly x = R.x();
        if (!R.is_one(R.pow(x, order))) continue;
        bool primitive = true;
        for (auto f : factors) {
            if (R.is_one(R.pow(x, order / f))) {
                primitive = false;
                break;
            }
        }
        if (!primitive) continue;
        bool compatible = true;
        for (int d = 1; d < r && compatible; ++d) {
            if (r % d) continue;
            Poly y = R.pow(x, order / (ipow(p, d) - 1));
            Poly v = eval_at(R, table.at({p, d}), y);
            for (int c : v)
                if (c) compatible = false;
        }
        if (compatible) return mod;
    }
    return {};
}

}  // namespace

int main() {
    const uint64_t limit = 1u << 16;
    std::printf("// Generated by tools/gen_conway.cpp. Monic, coefficients low to high.\n");
    for (int p = 2; p < static_cast<int>(limit); ++p) {
        if (!is_prime(p)) continue;
        for (int r = 1; ipow(p, r) <= limit; ++r) {
            Poly c = find_conway(p, r);
            table[{p, r}] = c;
            if (r == 1 && p > 251) continue;  // prime fields above 251 are built on demand
            std::printf("{%d, %d, {", p, r);
            for (size_t i = 0; i < c.size(); ++i) std::printf("%s%d", i ? ", " : "", c[i]);
            std::printf("}},\n");
        }
    }
    return 0;
}
