#pragma once

#include <bit>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "form_matrix.hpp"

namespace instanton {

// A bounded complex of sums of line bundles T^0 -> T^1 -> ... on a space.
// Each copy of each term carries its own twist; maps[k] is a form matrix
// from term k to term k+1 whose (i,j) entry is homogeneous of the right
// multidegree.
struct SheafComplex {
    Field field;
    Space space;
    std::vector<std::vector<Twist>> terms;
    std::vector<FormMatrix> maps;

    SheafComplex() : field(Field::rationals()) {}

    static SheafComplex line_bundle(const Field& f, const Space& X, const Twist& t) {
        SheafComplex C;
        C.field = f;
        C.space = X;
        C.terms.push_back({t});
        return C;
    }

    SheafComplex twisted(const Twist& t) const {
        SheafComplex C = *this;
        for (auto& term : C.terms)
            for (auto& tw : term) tw = tw.shifted(t.a, t.b);
        return C;
    }

    // entrywise degree discipline plus vanishing compositions
    void validate() const {
        if (terms.empty()) throw std::invalid_argument("complex: no terms");
        if (maps.size() + 1 != terms.size())
            throw std::invalid_argument("complex: map count mismatch");
        for (size_t k = 0; k < maps.size(); ++k) {
            const FormMatrix& M = maps[k];
            if (M.rows != terms[k + 1].size() || M.cols != terms[k].size())
                throw std::invalid_argument("complex: map shape mismatch");
            if (M.field != field || !(M.space == space))
                throw std::invalid_argument("complex: map field/space mismatch");
            for (size_t i = 0; i < M.rows; ++i)
                for (size_t j = 0; j < M.cols; ++j) {
                    const Form& f = M.at(i, j);
                    if (f.is_zero()) continue;
                    int d1 = terms[k + 1][i].a - terms[k][j].a;
                    int d2 = terms[k + 1][i].b - terms[k][j].b;
                    for (const auto& [e, c] : f.terms) {
                        int s1 = 0, s2 = 0;
                        for (int v = space.factor_lo(0); v < space.factor_hi(0); ++v) s1 += e[v];
                        if (space.nfactors() == 2)
                            for (int v = space.factor_lo(1); v < space.factor_hi(1); ++v) s2 += e[v];
                        bool ok = space.nfactors() == 1 ? (s1 == d1) : (s1 == d1 && s2 == d2);
                        if (!ok) throw std::invalid_argument("complex: entry degree violates twists");
                        for (int v = 0; v < space.nvars(); ++v)
                            if (e[v] < 0) throw std::invalid_argument("complex: negative exponent in map");
                    }
                }
        }
        for (size_t k = 0; k + 1 < maps.size(); ++k)
            if (!(maps[k + 1] * maps[k]).is_zero())
                throw std::invalid_argument("complex: composition of consecutive maps is nonzero");
    }

    // total tensor product, copies of B fastest, with the usual sign on the
    // second-factor differential
    static SheafComplex tensor(const SheafComplex& A, const SheafComplex& B) {
        if (A.field != B.field || !(A.space == B.space))
            throw std::invalid_argument("complex: tensor mismatch");
        SheafComplex C;
        C.field = A.field;
        C.space = A.space;
        int LA = static_cast<int>(A.terms.size()), LB = static_cast<int>(B.terms.size());
        int L = LA + LB - 1;
        // layout of term k: blocks (i, k-i) for admissible i, ascending
        auto blocks_of = [&](int k) {
            std::vector<std::pair<int, int>> blocks;
            for (int i = std::max(0, k - (LB - 1)); i <= std::min(LA - 1, k); ++i)
                blocks.push_back({i, k - i});
            return blocks;
        };
        std::vector<std::vector<std::tuple<int, int, int, int>>> layout(L); // (i,j,a,b) per copy
        for (int k = 0; k < L; ++k) {
            std::vector<Twist> tws;
            for (auto [i, j] : blocks_of(k))
                for (size_t a = 0; a < A.terms[i].size(); ++a)
                    for (size_t b = 0; b < B.terms[j].size(); ++b) {
                        const Twist& ta = A.terms[i][a];
                        const Twist& tb = B.terms[j][b];
                        tws.push_back(Twist(ta.a + tb.a, ta.b + tb.b));
                        layout[k].push_back({i, j, static_cast<int>(a), static_cast<int>(b)});
                    }
            C.terms.push_back(std::move(tws));
        }
        int nv = C.space.nvars();
        for (int k = 0; k + 1 < L; ++k) {
            FormMatrix M(C.field, C.space, C.terms[k + 1].size(), C.terms[k].size());
            for (size_t col = 0; col < layout[k].size(); ++col) {
                auto [i, j, a, b] = layout[k][col];
                for (size_t row = 0; row < layout[k + 1].size(); ++row) {
                    auto [i2, j2, a2, b2] = layout[k + 1][row];
                    if (i2 == i + 1 && j2 == j && b2 == b) {
                        M.at(row, col) = A.maps[i].at(a2, a);
                    } else if (i2 == i && j2 == j + 1 && a2 == a) {
                        Form f = B.maps[j].at(b2, b);
                        if (i % 2 == 1) f = -f;
                        M.at(row, col) = std::move(f);
                    }
                }
            }
            (void)nv;
            C.maps.push_back(std::move(M));
        }
        return C;
    }
};

// One basis cochain of the covering complex: a Laurent monomial (multidegree
// a) on the chart intersection given by mask, sitting in one copy of one term.
struct CechKey {
    uint8_t term = 0;
    uint8_t mask = 0;
    uint16_t copy = 0;
    Expo a{};
    bool operator<(const CechKey& o) const {
        return std::tie(term, mask, copy, a) < std::tie(o.term, o.mask, o.copy, o.a);
    }
    bool operator==(const CechKey& o) const {
        return term == o.term && mask == o.mask && copy == o.copy && a == o.a;
    }
};

using Cochain = std::map<CechKey, Scalar>;

// One basis element of the transferred (Bott) complex: a cohomology class of
// a single line-bundle summand, named by its monomial representative.
struct SElem {
    uint8_t term = 0;
    uint16_t copy = 0;
    Expo a{};
    bool operator<(const SElem& o) const {
        return std::tie(term, copy, a) < std::tie(o.term, o.copy, o.a);
    }
    bool operator==(const SElem& o) const {
        return term == o.term && copy == o.copy && a == o.a;
    }
};

namespace detail {
inline void cochain_add(Cochain& c, const CechKey& k, const Scalar& v) {
    if (v.is_zero()) return;
    auto it = c.find(k);
    if (it == c.end()) {
        c.emplace(k, v);
    } else {
        it->second = it->second + v;
        if (it->second.is_zero()) c.erase(it);
    }
}
} // namespace detail

// The covering-complex calculus: differential, contraction homotopy, and the
// projection/injection pair onto monomial cohomology representatives. All
// operators act per multidegree; the homotopy contracts each chart-pattern
// simplex onto its lowest admissible chart.
struct CechContext {
    const SheafComplex& C;

    explicit CechContext(const SheafComplex& c) : C(c) {}

    int nfactors() const { return C.space.nfactors(); }
    uint8_t factor_mask(int f) const {
        int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
        return static_cast<uint8_t>(((1u << (hi - lo)) - 1u) << lo);
    }
    static int popcount(uint8_t m) { return std::popcount(static_cast<unsigned>(m)); }
    int cech_degree(uint8_t mask) const {
        int d = 0;
        for (int f = 0; f < nfactors(); ++f) d += popcount(mask & factor_mask(f)) - 1;
        return d;
    }

    // pattern of a multidegree within a factor block: 0 = all nonnegative,
    // 1 = all negative, -1 = mixed
    int pattern(const Expo& a, int f) const {
        int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
        bool any_neg = false, all_neg = true;
        for (int v = lo; v < hi; ++v) {
            if (a[v] < 0) any_neg = true;
            else all_neg = false;
        }
        if (!any_neg) return 0;
        return all_neg ? 1 : -1;
    }
    uint8_t neg_mask(const Expo& a) const {
        uint8_t m = 0;
        for (int v = 0; v < C.space.nvars(); ++v)
            if (a[v] < 0) m |= static_cast<uint8_t>(1u << v);
        return m;
    }

    bool valid_key(const CechKey& k, int bound) const {
        if (k.term >= C.terms.size()) return false;
        if (k.copy >= C.terms[k.term].size()) return false;
        uint8_t all = 0;
        for (int f = 0; f < nfactors(); ++f) all |= factor_mask(f);
        if ((k.mask & ~all) != 0) return false;
        for (int f = 0; f < nfactors(); ++f) {
            uint8_t fm = factor_mask(f);
            uint8_t jf = k.mask & fm;
            if (jf == 0) return false;
            if ((neg_mask(k.a) & fm & ~k.mask) != 0) return false;
            int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
            int s = 0;
            for (int v = lo; v < hi; ++v) {
                s += k.a[v];
                if (k.a[v] > bound || k.a[v] < -bound) return false;
            }
            const Twist& t = C.terms[k.term][k.copy];
            if (s != (f == 0 ? t.a : t.b)) return false;
        }
        return true;
    }

    // position of chart j inside mask (number of set bits below j)
    static int pos_in(uint8_t mask, int j) {
        return std::popcount(static_cast<unsigned>(mask & ((1u << j) - 1u)));
    }

    // covering differential (alternating restriction)
    Cochain delta(const Cochain& x) const {
        Cochain out;
        for (const auto& [k, coef] : x) {
            int prefix = 0; // Koszul: degrees of earlier factors
            for (int f = 0; f < nfactors(); ++f) {
                uint8_t fm = factor_mask(f);
                uint8_t jf = k.mask & fm;
                int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
                for (int j = lo; j < hi; ++j) {
                    uint8_t bit = static_cast<uint8_t>(1u << j);
                    if (jf & bit) continue;
                    int sgn = prefix + pos_in(static_cast<uint8_t>(jf | bit), j);
                    CechKey nk = k;
                    nk.mask = static_cast<uint8_t>(k.mask | bit);
                    Scalar v = (sgn % 2 == 0) ? coef : -coef;
                    detail::cochain_add(out, nk, v);
                }
                prefix += popcount(jf) - 1;
            }
        }
        return out;
    }

    // factor-level contraction: writes (newmaskbits, sign) pairs; returns
    // false when the factor homotopy kills the key
    bool factor_homotopy(const CechKey& k, int f, uint8_t& out_mask, int& out_sign) const {
        uint8_t fm = factor_mask(f);
        uint8_t jf = k.mask & fm;
        int pat = pattern(k.a, f);
        if (pat == 1) return false; // top pattern: contraction vanishes
        int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
        if (pat == 0) {
            uint8_t low = static_cast<uint8_t>(1u << lo);
            if (!(jf & low) || popcount(jf) < 2) return false;
            out_mask = static_cast<uint8_t>((k.mask & ~fm) | (jf & ~low));
            out_sign = 0;
            return true;
        }
        // mixed: contract onto the lowest chart with a nonnegative exponent
        int c = -1;
        for (int v = lo; v < hi; ++v)
            if (k.a[v] >= 0) { c = v; break; }
        uint8_t cb = static_cast<uint8_t>(1u << c);
        if (!(jf & cb)) return false;
        out_mask = static_cast<uint8_t>((k.mask & ~fm) | (jf & ~cb));
        out_sign = pos_in(jf, c);
        return true;
    }

    // factor-level i∘p: identity on the contracted representative, zero off
    // it; for the section pattern this spreads the lowest-chart value over
    // all charts
    void factor_ip(const CechKey& k, int f, std::vector<std::pair<uint8_t, int>>& images) const {
        images.clear();
        uint8_t fm = factor_mask(f);
        uint8_t jf = k.mask & fm;
        int pat = pattern(k.a, f);
        int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
        if (pat == -1) return;
        if (pat == 1) {
            if (jf == fm) images.push_back({jf, 0});
            return;
        }
        if (jf == static_cast<uint8_t>(1u << lo))
            for (int v = lo; v < hi; ++v) images.push_back({static_cast<uint8_t>(1u << v), 0});
    }

    // contraction homotopy of the full column (tensor over factors)
    Cochain homotopy(const Cochain& x) const {
        Cochain out;
        for (const auto& [k, coef] : x) {
            // term 1: h on factor 0, identity on the rest
            uint8_t m0;
            int s0;
            if (factor_homotopy(k, 0, m0, s0)) {
                CechKey nk = k;
                nk.mask = m0;
                detail::cochain_add(out, nk, (s0 % 2 == 0) ? coef : -coef);
            }
            if (nfactors() == 2) {
                // term 2: (i p) on factor 0 tensor h on factor 1, with the
                // Koszul sign of passing a degree -1 operator across factor 0
                uint8_t m1;
                int s1;
                if (!factor_homotopy(k, 1, m1, s1)) continue;
                std::vector<std::pair<uint8_t, int>> ips;
                factor_ip(k, 0, ips);
                if (ips.empty()) continue;
                int deg0 = popcount(k.mask & factor_mask(0)) - 1;
                for (auto [fm0, ipsgn] : ips) {
                    CechKey nk = k;
                    nk.mask = static_cast<uint8_t>(fm0 | (m1 & factor_mask(1)));
                    int sgn = deg0 + s1 + ipsgn;
                    detail::cochain_add(out, nk, (sgn % 2 == 0) ? coef : -coef);
                }
            }
        }
        return out;
    }

    // projection onto monomial cohomology representatives
    std::map<SElem, Scalar> project(const Cochain& x) const {
        std::map<SElem, Scalar> out;
        for (const auto& [k, coef] : x) {
            bool keep = true;
            for (int f = 0; f < nfactors() && keep; ++f) {
                uint8_t fm = factor_mask(f);
                uint8_t jf = k.mask & fm;
                int pat = pattern(k.a, f);
                if (pat == -1) keep = false;
                else if (pat == 1) keep = (jf == fm);
                else keep = (jf == static_cast<uint8_t>(1u << C.space.factor_lo(f)));
            }
            if (!keep) continue;
            SElem e{k.term, k.copy, k.a};
            auto it = out.find(e);
            if (it == out.end()) out.emplace(e, coef);
            else {
                it->second = it->second + coef;
                if (it->second.is_zero()) out.erase(it);
            }
        }
        return out;
    }

    // injection of a cohomology representative as an explicit cochain
    Cochain inject(const SElem& e) const {
        Cochain out;
        std::vector<std::vector<uint8_t>> choices;
        for (int f = 0; f < nfactors(); ++f) {
            int pat = pattern(e.a, f);
            int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
            std::vector<uint8_t> opts;
            if (pat == 1) {
                opts.push_back(factor_mask(f));
            } else if (pat == 0) {
                for (int v = lo; v < hi; ++v) opts.push_back(static_cast<uint8_t>(1u << v));
            } else {
                throw std::invalid_argument("cech: mixed multidegree is not a cohomology class");
            }
            choices.push_back(std::move(opts));
        }
        Scalar one = Scalar::one(C.field);
        if (nfactors() == 1) {
            for (uint8_t m : choices[0]) out.emplace(CechKey{e.term, m, e.copy, e.a}, one);
        } else {
            for (uint8_t m0 : choices[0])
                for (uint8_t m1 : choices[1])
                    out.emplace(CechKey{e.term, static_cast<uint8_t>(m0 | m1), e.copy, e.a}, one);
        }
        return out;
    }

    // signed horizontal perturbation: the sheaf maps, applied chartwise with
    // the sign (-1)^p on covering degree p
    Cochain pert(const Cochain& x) const {
        Cochain out;
        for (const auto& [k, coef] : x) {
            if (static_cast<size_t>(k.term + 1) >= C.terms.size()) continue;
            const FormMatrix& M = C.maps[k.term];
            int p = cech_degree(k.mask);
            Scalar base = (p % 2 == 0) ? coef : -coef;
            for (size_t r = 0; r < M.rows; ++r) {
                const Form& f = M.at(r, k.copy);
                if (f.is_zero()) continue;
                for (const auto& [e, c] : f.terms) {
                    CechKey nk;
                    nk.term = static_cast<uint8_t>(k.term + 1);
                    nk.mask = k.mask;
                    nk.copy = static_cast<uint16_t>(r);
                    nk.a = expo_add(k.a, e);
                    detail::cochain_add(out, nk, base * c);
                }
            }
        }
        return out;
    }
};

// Transferred-complex computation of hypercohomology within a window: Bott
// monomial bases per term, perturbed differential by zig-zag transfer.
struct HyperSnapshot {
    std::vector<size_t> dims;   // hypercohomology dimensions by total degree
    std::vector<size_t> s_dims; // transferred complex dimensions
    bool clipped = false;       // some basis monomial fell outside the window
};

inline HyperSnapshot hypercohomology_at(const SheafComplex& C, int bound) {
    CechContext ctx(C);
    const int nterms = static_cast<int>(C.terms.size());
    const int K = nterms - 1 + C.space.dim();
    HyperSnapshot snap;
    snap.s_dims.assign(K + 1, 0);
    snap.dims.assign(K + 1, 0);

    // enumerate Bott bases per term/copy/pattern, applying the window
    std::vector<std::vector<SElem>> basis(K + 1);
    std::map<SElem, size_t> index; // position within its degree
    for (int i = 0; i < nterms; ++i) {
        for (size_t c = 0; c < C.terms[i].size(); ++c) {
            const Twist& t = C.terms[i][c];
            int nf = C.space.nfactors();
            for (int patbits = 0; patbits < (1 << nf); ++patbits) {
                // per-factor block enumeration for this pattern
                std::vector<Expo> monos;
                monos.push_back(Expo{});
                int q = 0;
                size_t full_count = 1;
                for (int f = 0; f < nf; ++f) {
                    bool top = (patbits >> f) & 1;
                    int lo = C.space.factor_lo(f), hi = C.space.factor_hi(f);
                    int tf = C.space.twist_of(t, f);
                    int fd = C.space.factor_dim(f);
                    full_count *= detail::pn_line(fd, tf, top ? fd : 0);
                    if (top) q += fd;
                    std::vector<Expo> next;
                    for (const Expo& base : monos)
                        detail::enumerate_block(next, base, lo, hi, tf, top ? -1 : 0);
                    monos = std::move(next);
                }
                if (monos.size() != full_count)
                    throw std::logic_error("cech: basis enumeration disagrees with the count formula");
                if (monos.empty()) continue;
                size_t kept = 0;
                for (const Expo& a : monos) {
                    bool in_window = true;
                    for (int v = 0; v < C.space.nvars(); ++v)
                        if (a[v] < -bound) in_window = false;
                    if (!in_window) continue;
                    ++kept;
                    int deg = i + q;
                    SElem e{static_cast<uint8_t>(i), static_cast<uint16_t>(c), a};
                    index[e] = basis[deg].size();
                    basis[deg].push_back(e);
                }
                if (kept != full_count) snap.clipped = true;
            }
        }
    }
    for (int k = 0; k <= K; ++k) snap.s_dims[k] = basis[k].size();

    // transferred differential per total degree
    std::vector<Matrix> dmat(K + 1);
    for (int k = 0; k <= K; ++k) {
        size_t tgt = k + 1 <= K ? basis[k + 1].size() : 0;
        dmat[k] = Matrix(C.field, tgt, basis[k].size());
        for (size_t colidx = 0; colidx < basis[k].size(); ++colidx) {
            Cochain z = ctx.inject(basis[k][colidx]);
            int col = basis[k][colidx].term;
            while (!z.empty() && col + 1 < nterms) {
                Cochain tz = ctx.pert(z);
                ++col;
                if (tz.empty()) break;
                for (const auto& [e, coef] : ctx.project(tz)) {
                    auto it = index.find(e);
                    if (it == index.end()) continue; // out of window: truncated away
                    dmat[k].at(it->second, colidx) = dmat[k].at(it->second, colidx) + coef;
                }
                z = ctx.homotopy(tz);
            }
        }
    }
    for (int k = 0; k + 1 <= K; ++k)
        if (!(dmat[k + 1] * dmat[k]).is_zero())
            throw std::logic_error("cech: transferred differential fails to square to zero");

    std::vector<size_t> ranks(K + 2, 0);
    for (int k = 0; k <= K; ++k) ranks[k + 1] = dmat[k].rank();
    for (int k = 0; k <= K; ++k) snap.dims[k] = snap.s_dims[k] - ranks[k + 1] - ranks[k];
    return snap;
}

// Hypercohomology with window-stability and Euler cross-checks. When every
// Bott basis monomial fits the window the window is immaterial and stability
// holds by construction; otherwise the computation is repeated one bound up
// and must agree.
inline std::vector<size_t> hypercohomology(const SheafComplex& C, int bound = 10,
                                           bool stability = true) {
    HyperSnapshot snap = hypercohomology_at(C, bound);
    if (!snap.clipped) {
        // independent count: alternating sum of the transferred complex must
        // match the alternating sum of the line-bundle Euler characteristics
        long long lhs = 0, rhs = 0;
        for (size_t k = 0; k < snap.s_dims.size(); ++k)
            lhs += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(snap.s_dims[k]);
        for (size_t i = 0; i < C.terms.size(); ++i)
            for (const Twist& t : C.terms[i]) {
                long long chi = line_chi(C.space, t);
                rhs += (i % 2 == 0) ? chi : -chi;
            }
        if (lhs != rhs) throw std::logic_error("cech: Euler characteristic mismatch");
    } else if (stability) {
        HyperSnapshot up = hypercohomology_at(C, bound + 1);
        if (up.dims != snap.dims)
            throw std::runtime_error("cech: cohomology not stable at window bound");
        // the stabilized dimensions must still balance the Euler count
        long long lhs = 0, rhs = 0;
        for (size_t k = 0; k < snap.dims.size(); ++k)
            lhs += (k % 2 == 0 ? 1 : -1) * static_cast<long long>(snap.dims[k]);
        for (size_t i = 0; i < C.terms.size(); ++i)
            for (const Twist& t : C.terms[i]) {
                long long chi = line_chi(C.space, t);
                rhs += (i % 2 == 0) ? chi : -chi;
            }
        if (lhs != rhs)
            throw std::runtime_error(
                "cech: stabilized dimensions fail the Euler check; increase bound");
    }
    return snap.dims;
}

// A bounded complex of sums of line-bundle twists; alias carrying the public
// vocabulary used by the monad layer.
using LineBundleComplex = SheafComplex;

// default truncation: |most negative twist component| + complex length + 4;
// the exponent floor must reach every top-type Bott monomial, and section
// monomials are never clipped because the window is one-sided
inline int default_bound(const LineBundleComplex& C) {
    int neg = 0;
    for (const auto& term : C.terms)
        for (const Twist& t : term) neg = std::max({neg, -t.a, -t.b});
    return neg + static_cast<int>(C.terms.size()) + 4;
}

// hypercohomology dimensions by total degree; bound 0 selects the default
inline std::vector<size_t> cech_hypercohomology(const LineBundleComplex& C, int bound = 0) {
    return hypercohomology(C, bound > 0 ? bound : default_bound(C));
}

inline LineBundleComplex lbc_tensor(const LineBundleComplex& A, const LineBundleComplex& B) {
    return SheafComplex::tensor(A, B);
}

inline LineBundleComplex lbc_twist(const LineBundleComplex& C, const Twist& t) {
    return C.twisted(t);
}

// reverse the arrows, negate the twists, transpose the differentials
inline LineBundleComplex lbc_dual(const LineBundleComplex& C) {
    LineBundleComplex D;
    D.field = C.field;
    D.space = C.space;
    size_t N = C.terms.size();
    D.terms.resize(N);
    for (size_t i = 0; i < N; ++i) {
        D.terms[i].resize(C.terms[N - 1 - i].size());
        for (size_t c = 0; c < D.terms[i].size(); ++c) {
            const Twist& t = C.terms[N - 1 - i][c];
            D.terms[i][c] = Twist(-t.a, -t.b);
        }
    }
    for (size_t i = 0; i + 1 < N; ++i) D.maps.push_back(C.maps[N - 2 - i].transpose());
    D.validate();
    return D;
}

} // namespace instanton
