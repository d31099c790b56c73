#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "form.hpp"

namespace instanton {

enum class SpaceKind : uint8_t { P1, P2, P3, Quadric };

// Twist of a line bundle: a single integer on projective space, a bidegree
// on the quadric surface (second entry ignored elsewhere).
struct Twist {
    int a = 0, b = 0;
    Twist() = default;
    Twist(int a_) : a(a_) {}
    Twist(int a_, int b_) : a(a_), b(b_) {}
    bool operator==(const Twist& o) const { return a == o.a && b == o.b; }
    Twist shifted(int da, int db) const { return Twist(a + da, b + db); }
    std::string str() const { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }
};

// The ambient variety, presented as a product of projective factors: the
// quadric surface is the (1,1) Segre image of P1 x P1 and is handled as the
// two-factor product; everything else is a single factor.
struct Space {
    SpaceKind kind = SpaceKind::P3;

    static Space p1() { return Space{SpaceKind::P1}; }
    static Space p2() { return Space{SpaceKind::P2}; }
    static Space p3() { return Space{SpaceKind::P3}; }
    static Space quadric() { return Space{SpaceKind::Quadric}; }

    bool operator==(const Space& o) const { return kind == o.kind; }

    int nvars() const {
        switch (kind) {
            case SpaceKind::P1: return 2;
            case SpaceKind::P2: return 3;
            case SpaceKind::P3: return 4;
            case SpaceKind::Quadric: return 4;
        }
        return 0;
    }
    int dim() const {
        switch (kind) {
            case SpaceKind::P1: return 1;
            case SpaceKind::P2: return 2;
            case SpaceKind::P3: return 3;
            case SpaceKind::Quadric: return 2;
        }
        return 0;
    }
    int nfactors() const { return kind == SpaceKind::Quadric ? 2 : 1; }
    int factor_lo(int f) const { return f == 0 ? 0 : 2; }
    int factor_hi(int f) const {
        if (kind == SpaceKind::Quadric) return f == 0 ? 2 : 4;
        return nvars();
    }
    int factor_dim(int f) const { return factor_hi(f) - factor_lo(f) - 1; }
    int twist_of(const Twist& t, int f) const { return f == 0 ? t.a : t.b; }

    std::string str() const {
        switch (kind) {
            case SpaceKind::P1: return "P1";
            case SpaceKind::P2: return "P2";
            case SpaceKind::P3: return "P3";
            case SpaceKind::Quadric: return "Q";
        }
        return "?";
    }
};

namespace detail {

inline size_t binom(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    size_t r = 1;
    for (long long i = 1; i <= k; ++i) r = r * static_cast<size_t>(n - k + i) / static_cast<size_t>(i);
    return r;
}

// h^q of O(k) on P^n
inline size_t pn_line(int n, int k, int q) {
    if (q == 0) return k >= 0 ? binom(n + k, n) : 0;
    if (q == n) return k <= -n - 1 ? binom(-k - 1, n) : 0;
    return 0;
}

// exponent vectors in block [lo,hi) summing to deg, entries >= floor
inline void enumerate_block(std::vector<Expo>& out, Expo cur, int lo, int hi, int deg, int floor_) {
    if (lo == hi) {
        if (deg == 0) out.push_back(cur);
        return;
    }
    if (lo + 1 == hi) {
        bool ok = floor_ >= 0 ? deg >= floor_ : deg <= floor_;
        if (ok) {
            cur[lo] = static_cast<int16_t>(deg);
            out.push_back(cur);
        }
        return;
    }
    if (floor_ >= 0) {
        for (int e = floor_; e <= deg; ++e) {
            cur[lo] = static_cast<int16_t>(e);
            enumerate_block(out, cur, lo + 1, hi, deg - e, floor_);
        }
    } else {
        // all entries <= floor_ (= -1): iterate e from floor_ downward while
        // the rest can still reach deg with entries <= floor_
        int rest = hi - lo - 1;
        for (int e = floor_; e >= deg - rest * floor_; --e) {
            cur[lo] = static_cast<int16_t>(e);
            enumerate_block(out, cur, lo + 1, hi, deg - e, floor_);
        }
    }
}

} // namespace detail

// dimension of H^q(X, O(t))
inline size_t line_cohomology(const Space& X, const Twist& t, int q) {
    if (q < 0 || q > X.dim()) return 0;
    switch (X.kind) {
        case SpaceKind::P1: return detail::pn_line(1, t.a, q);
        case SpaceKind::P2: return detail::pn_line(2, t.a, q);
        case SpaceKind::P3: return detail::pn_line(3, t.a, q);
        case SpaceKind::Quadric: {
            size_t acc = 0;
            for (int q1 = 0; q1 <= 1; ++q1) {
                int q2 = q - q1;
                if (q2 < 0 || q2 > 1) continue;
                acc += detail::pn_line(1, t.a, q1) * detail::pn_line(1, t.b, q2);
            }
            return acc;
        }
    }
    return 0;
}

// closed-form line-bundle cohomology dimension h^i(O(t)) on the space
inline size_t bott_dim(const Space& X, int i, const Twist& t) {
    return line_cohomology(X, t, i);
}

inline long long line_chi(const Space& X, const Twist& t) {
    long long acc = 0;
    for (int q = 0; q <= X.dim(); ++q) {
        long long h = static_cast<long long>(line_cohomology(X, t, q));
        acc += (q % 2 == 0) ? h : -h;
    }
    return acc;
}

// ordered monomial basis of H^0(X, O(t)): nonnegative exponents of the right
// (multi)degree, lexicographic within each block
inline std::vector<Expo> h0_basis(const Space& X, const Twist& t) {
    std::vector<Expo> out;
    if (X.nfactors() == 1) {
        if (t.a < 0) return out;
        detail::enumerate_block(out, Expo{}, 0, X.nvars(), t.a, 0);
        return out;
    }
    if (t.a < 0 || t.b < 0) return out;
    std::vector<Expo> left;
    detail::enumerate_block(left, Expo{}, 0, 2, t.a, 0);
    for (const Expo& l : left) detail::enumerate_block(out, l, 2, 4, t.b, 0);
    return out;
}

// ordered monomial basis of top cohomology: all exponents <= -1 in every
// factor block (Laurent monomial representatives)
inline std::vector<Expo> htop_basis(const Space& X, const Twist& t) {
    std::vector<Expo> out;
    if (X.nfactors() == 1) {
        int n = X.dim();
        if (t.a > -n - 1) return out;
        detail::enumerate_block(out, Expo{}, 0, X.nvars(), t.a, -1);
        return out;
    }
    if (t.a > -2 || t.b > -2) return out;
    std::vector<Expo> left;
    detail::enumerate_block(left, Expo{}, 0, 2, t.a, -1);
    for (const Expo& l : left) detail::enumerate_block(out, l, 2, 4, t.b, -1);
    return out;
}

} // namespace instanton
