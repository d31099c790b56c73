#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "rng.hpp"

namespace instanton {

using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

enum class FieldTag : uint8_t { Q, Qi, Fp };

struct Field {
    FieldTag tag = FieldTag::Q;
    uint64_t p = 0; // modulus, Fp only

    static Field rationals() { return Field{FieldTag::Q, 0}; }
    static Field gaussian() { return Field{FieldTag::Qi, 0}; }
    static Field prime(uint64_t p) { return Field{FieldTag::Fp, p}; }

    bool operator==(const Field& o) const { return tag == o.tag && p == o.p; }
    bool operator!=(const Field& o) const { return !(*this == o); }

    std::string str() const {
        switch (tag) {
            case FieldTag::Q: return "Q";
            case FieldTag::Qi: return "Qi";
            case FieldTag::Fp: return "Fp:" + std::to_string(p);
        }
        return "?";
    }

    static Field parse(const std::string& s) {
        if (s == "Q") return rationals();
        if (s == "Qi") return gaussian();
        if (s.rfind("Fp:", 0) == 0) {
            uint64_t p = std::stoull(s.substr(3));
            if (p < 2) throw std::invalid_argument("field: bad modulus " + s);
            return prime(p);
        }
        throw std::invalid_argument("field: cannot parse '" + s + "'");
    }
};

namespace detail {

inline uint64_t addmod(uint64_t a, uint64_t b, uint64_t p) {
    uint64_t s = a + b;
    if (s >= p || s < a) s -= p;
    return s;
}
inline uint64_t submod(uint64_t a, uint64_t b, uint64_t p) { return a >= b ? a - b : a + p - b; }
inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}
inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}
inline uint64_t invmod(uint64_t a, uint64_t p) {
    // extended Euclid; p prime, a != 0 mod p
    int64_t t = 0, newt = 1;
    int64_t r = static_cast<int64_t>(p), newr = static_cast<int64_t>(a % p);
    while (newr != 0) {
        int64_t q = r / newr;
        int64_t tmp = t - q * newt; t = newt; newt = tmp;
        tmp = r - q * newr; r = newr; newr = tmp;
    }
    if (r != 1) throw std::domain_error("invmod: not invertible");
    if (t < 0) t += static_cast<int64_t>(p);
    return static_cast<uint64_t>(t);
}

inline bool is_prime_u64(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // deterministic for n < 3.3e24 with these witnesses
    for (uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

} // namespace detail

// A fresh ~30-bit prime, deterministic from the generator state.
inline uint64_t random_prime(Rng& rng) {
    for (;;) {
        uint64_t c = (rng.next() % (1ULL << 29)) + (1ULL << 29);
        c |= 1;
        for (int k = 0; k < 4096; k += 2) {
            if (detail::is_prime_u64(c + k)) return c + k;
        }
    }
}

// Exact field element over Q, Q(i) or F_p. Values are immutable in spirit:
// all operations return fresh scalars.
struct Scalar {
    Field field;
    Rat re, im;       // Q / Qi
    uint64_t rem = 0; // Fp, in [0, p)

    Scalar() : field(Field::rationals()) {}

    static Scalar zero(const Field& f) {
        Scalar s; s.field = f;
        return s;
    }
    static Scalar one(const Field& f) {
        Scalar s; s.field = f;
        if (f.tag == FieldTag::Fp) s.rem = 1 % f.p; else s.re = 1;
        return s;
    }
    static Scalar of_int(const Field& f, long long v) {
        Scalar s; s.field = f;
        if (f.tag == FieldTag::Fp) {
            long long m = v % static_cast<long long>(f.p);
            if (m < 0) m += static_cast<long long>(f.p);
            s.rem = static_cast<uint64_t>(m);
        } else {
            s.re = v;
        }
        return s;
    }
    static Scalar of_rat(const Field& f, const Rat& re, const Rat& im = Rat(0)) {
        if (f.tag == FieldTag::Fp) throw std::invalid_argument("of_rat: field is Fp");
        if (f.tag == FieldTag::Q && im != 0) throw std::invalid_argument("of_rat: imaginary part over Q");
        Scalar s; s.field = f; s.re = re; s.im = im;
        return s;
    }

    bool is_zero() const {
        return field.tag == FieldTag::Fp ? rem == 0 : (re == 0 && im == 0);
    }

    bool operator==(const Scalar& o) const {
        if (field != o.field) return false;
        return field.tag == FieldTag::Fp ? rem == o.rem : (re == o.re && im == o.im);
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    void check(const Scalar& o) const {
        if (field != o.field) throw std::invalid_argument("scalar: field mismatch");
    }

    Scalar operator+(const Scalar& o) const {
        check(o);
        Scalar s; s.field = field;
        if (field.tag == FieldTag::Fp) s.rem = detail::addmod(rem, o.rem, field.p);
        else { s.re = re + o.re; s.im = im + o.im; }
        return s;
    }
    Scalar operator-(const Scalar& o) const {
        check(o);
        Scalar s; s.field = field;
        if (field.tag == FieldTag::Fp) s.rem = detail::submod(rem, o.rem, field.p);
        else { s.re = re - o.re; s.im = im - o.im; }
        return s;
    }
    Scalar operator-() const {
        Scalar s; s.field = field;
        if (field.tag == FieldTag::Fp) s.rem = rem == 0 ? 0 : field.p - rem;
        else { s.re = -re; s.im = -im; }
        return s;
    }
    Scalar operator*(const Scalar& o) const {
        check(o);
        Scalar s; s.field = field;
        if (field.tag == FieldTag::Fp) s.rem = detail::mulmod(rem, o.rem, field.p);
        else if (field.tag == FieldTag::Q) s.re = re * o.re;
        else { s.re = re * o.re - im * o.im; s.im = re * o.im + im * o.re; }
        return s;
    }
    Scalar inv() const {
        if (is_zero()) throw std::domain_error("scalar: division by zero");
        Scalar s; s.field = field;
        if (field.tag == FieldTag::Fp) s.rem = detail::invmod(rem, field.p);
        else if (field.tag == FieldTag::Q) s.re = 1 / re;
        else {
            Rat nrm = re * re + im * im;
            s.re = re / nrm; s.im = -im / nrm;
        }
        return s;
    }
    Scalar operator/(const Scalar& o) const { return *this * o.inv(); }

    Scalar conj() const {
        Scalar s = *this;
        if (field.tag == FieldTag::Qi) s.im = -s.im;
        return s;
    }

    std::string str() const {
        if (field.tag == FieldTag::Fp) return std::to_string(rem) + " mod " + std::to_string(field.p);
        auto rat_str = [](const Rat& r) {
            std::string num = numerator(r).str();
            if (denominator(r) == 1) return num;
            return num + "/" + denominator(r).str();
        };
        if (field.tag == FieldTag::Q || im == 0) return rat_str(re);
        std::string out;
        if (re != 0) out = rat_str(re);
        Rat a = im;
        if (a > 0 && !out.empty()) out += "+";
        if (a < 0) { out += "-"; a = -a; }
        out += rat_str(a) + "*i";
        return out;
    }

    static Scalar parse(const Field& f, const std::string& text);
};

namespace detail {

inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("scalar: empty rational");
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("scalar: zero denominator");
    return Rat(num, den);
}

} // namespace detail

inline Scalar Scalar::parse(const Field& f, const std::string& text) {
    std::string s;
    for (char c : text) if (c != ' ') s += c;
    if (f.tag == FieldTag::Fp) {
        auto pos = s.find("mod");
        if (pos == std::string::npos) throw std::invalid_argument("scalar: expected 'r mod p'");
        uint64_t r = std::stoull(s.substr(0, pos));
        uint64_t p = std::stoull(s.substr(pos + 3));
        if (p != f.p) throw std::invalid_argument("scalar: modulus mismatch");
        Scalar out = Scalar::zero(f); out.rem = r % p;
        return out;
    }
    // rational or gaussian rational: [re][+-im*i] | im*i
    auto istar = s.find("*i");
    if (istar == std::string::npos) {
        return Scalar::of_rat(f, detail::parse_rat(s));
    }
    if (f.tag != FieldTag::Qi) throw std::invalid_argument("scalar: imaginary literal over " + f.str());
    // split at the sign that separates re from im (not the leading sign)
    std::string body = s.substr(0, istar);
    size_t split = std::string::npos;
    for (size_t i = 1; i < body.size(); ++i) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != '/')
            split = i; // keep last sign before the im literal
    }
    Rat re(0), im(0);
    if (split == std::string::npos) {
        im = detail::parse_rat(body);
    } else {
        re = detail::parse_rat(body.substr(0, split));
        im = detail::parse_rat(body.substr(split + 1));
        if (body[split] == '-') im = -im;
    }
    return Scalar::of_rat(f, re, im);
}

// reduction Q/Qi -> Fp; throws when a denominator vanishes mod p
inline Scalar reduce_mod(const Scalar& s, uint64_t p) {
    if (s.field.tag == FieldTag::Fp) throw std::invalid_argument("reduce_mod: already modular");
    auto rat_mod = [p](const Rat& r) {
        BigInt pn = numerator(r) % p, pd = denominator(r) % p;
        if (pd == 0) throw std::domain_error("reduce_mod: denominator divisible by p");
        if (pn < 0) pn += p;
        if (pd < 0) pd += p;
        uint64_t un = pn.convert_to<uint64_t>();
        uint64_t ud = pd.convert_to<uint64_t>();
        return detail::mulmod(un, detail::invmod(ud, p), p);
    };
    if (s.field.tag == FieldTag::Qi && s.im != 0)
        throw std::invalid_argument("reduce_mod: nonreal gaussian rational");
    Scalar out = Scalar::zero(Field::prime(p));
    out.rem = rat_mod(s.re);
    return out;
}

inline Scalar random_scalar(Rng& rng, const Field& f, int64_t lo, int64_t hi) {
    if (f.tag == FieldTag::Fp) {
        Scalar s = Scalar::zero(f);
        s.rem = rng.below(f.p);
        return s;
    }
    Scalar s = Scalar::of_int(f, rng.int_in(lo, hi));
    if (f.tag == FieldTag::Qi) s.im = rng.int_in(lo, hi);
    return s;
}

} // namespace instanton
