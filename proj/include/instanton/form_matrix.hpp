#pragma once

#include <utility>
#include <vector>

#include "form.hpp"
#include "space.hpp"

namespace instanton {

// A matrix whose entries are polynomial forms on a fixed ambient space.
struct FormMatrix {
    Field field;
    Space space;
    size_t rows = 0, cols = 0;
    std::vector<Form> a;

    FormMatrix() : field(Field::rationals()) {}
    FormMatrix(const Field& f, const Space& X, size_t r, size_t c)
        : field(f), space(X), rows(r), cols(c), a(r * c, Form::zero(f, X.nvars())) {}

    Form& at(size_t i, size_t j) { return a[i * cols + j]; }
    const Form& at(size_t i, size_t j) const { return a[i * cols + j]; }

    bool is_zero() const {
        for (const auto& f : a) if (!f.is_zero()) return false;
        return true;
    }
    bool operator==(const FormMatrix& o) const {
        return field == o.field && space == o.space && rows == o.rows && cols == o.cols && a == o.a;
    }

    FormMatrix operator*(const FormMatrix& o) const {
        if (cols != o.rows || field != o.field || !(space == o.space))
            throw std::invalid_argument("form matrix: product mismatch");
        FormMatrix m(field, space, rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                const Form& f = at(i, k);
                if (f.is_zero()) continue;
                for (size_t j = 0; j < o.cols; ++j)
                    if (!o.at(k, j).is_zero()) m.at(i, j) = m.at(i, j) + f * o.at(k, j);
            }
        return m;
    }
    FormMatrix operator+(const FormMatrix& o) const {
        if (rows != o.rows || cols != o.cols || field != o.field)
            throw std::invalid_argument("form matrix: sum mismatch");
        FormMatrix m(field, space, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k] + o.a[k];
        return m;
    }
    FormMatrix operator-() const {
        FormMatrix m(field, space, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = -a[k];
        return m;
    }

    FormMatrix transpose() const {
        FormMatrix m(field, space, cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
        return m;
    }
    FormMatrix conj() const {
        FormMatrix m(field, space, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].conj();
        return m;
    }

    Matrix evaluate(const std::vector<Scalar>& pt) const {
        Matrix m(field, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].evaluate(pt);
        return m;
    }

    FormMatrix substitute(const std::vector<Form>& images, const Space& target) const {
        FormMatrix m(field, target, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].substitute(images);
        return m;
    }

    // common (multi)degree of the nonzero entries; throws if inhomogeneous
    std::pair<int, int> uniform_degree() const {
        int d1 = INT32_MIN, d2 = 0;
        for (const auto& f : a) {
            if (f.is_zero()) continue;
            int b1 = f.block_degree(space.factor_lo(0), space.factor_hi(0));
            int b2 = space.nfactors() == 2 ? f.block_degree(space.factor_lo(1), space.factor_hi(1)) : 0;
            for (const auto& [e, c] : f.terms) {
                int s1 = 0, s2 = 0;
                for (int v = space.factor_lo(0); v < space.factor_hi(0); ++v) s1 += e[v];
                if (space.nfactors() == 2)
                    for (int v = space.factor_lo(1); v < space.factor_hi(1); ++v) s2 += e[v];
                if (s1 != b1 || s2 != b2)
                    throw std::domain_error("form matrix: entry not homogeneous");
            }
            if (d1 == INT32_MIN) { d1 = b1; d2 = b2; }
            else if (d1 != b1 || d2 != b2)
                throw std::domain_error("form matrix: mixed entry degrees");
        }
        if (d1 == INT32_MIN) throw std::domain_error("form matrix: zero matrix has no degree");
        return {d1, d2};
    }
};

inline FormMatrix lift_constant(const Matrix& m, const Space& X) {
    FormMatrix out(m.field, X, m.rows, m.cols);
    for (size_t k = 0; k < m.a.size(); ++k)
        out.a[k] = Form::constant(m.field, X.nvars(), m.a[k]);
    return out;
}

inline FormMatrix operator*(const Matrix& s, const FormMatrix& f) {
    return lift_constant(s, f.space) * f;
}
inline FormMatrix operator*(const FormMatrix& f, const Matrix& s) {
    return f * lift_constant(s, f.space);
}

// Matrix of the multiplication map between ordered monomial bases: column
// blocks run over the copies of the source, rows over copies of the target,
// with the monomial index fastest. Target monomials outside `tgt` are
// dropped, which is exactly right for the (all-negative) top-cohomology
// bases as well as for global sections.
inline Matrix basis_mult_map(const FormMatrix& M, const std::vector<Expo>& src,
                             const std::vector<Expo>& tgt) {
    std::map<Expo, size_t> tgt_index;
    for (size_t i = 0; i < tgt.size(); ++i) tgt_index[tgt[i]] = i;
    Matrix out(M.field, M.rows * tgt.size(), M.cols * src.size());
    for (size_t r = 0; r < M.rows; ++r)
        for (size_t c = 0; c < M.cols; ++c) {
            const Form& f = M.at(r, c);
            for (const auto& [e, coef] : f.terms)
                for (size_t s = 0; s < src.size(); ++s) {
                    auto it = tgt_index.find(expo_add(e, src[s]));
                    if (it == tgt_index.end()) continue;
                    out.at(r * tgt.size() + it->second, c * src.size() + s) = coef;
                }
        }
    return out;
}

// induced map on global sections H0(t)^cols -> H0(t+d)^rows
inline Matrix mult_map(const FormMatrix& M, const Twist& t, int d1, int d2) {
    return basis_mult_map(M, h0_basis(M.space, t), h0_basis(M.space, t.shifted(d1, d2)));
}
inline Matrix mult_map(const FormMatrix& M, const Twist& t) {
    auto [d1, d2] = M.uniform_degree();
    return mult_map(M, t, d1, d2);
}

// induced map on top cohomology H^top(t)^cols -> H^top(t+d)^rows
inline Matrix top_mult_map(const FormMatrix& M, const Twist& t, int d1, int d2) {
    return basis_mult_map(M, htop_basis(M.space, t), htop_basis(M.space, t.shifted(d1, d2)));
}
inline Matrix top_mult_map(const FormMatrix& M, const Twist& t) {
    auto [d1, d2] = M.uniform_degree();
    return top_mult_map(M, t, d1, d2);
}

// ordered monomial basis of H0(O(t)); empty when any degree component is negative
inline std::vector<Expo> monomial_basis(const Space& X, const Twist& t) {
    return h0_basis(X, t);
}

// canonical twist of the space: O(-4) on P3, O(-3) on P2, O(-2) on P1, O(-2,-2)
// on the quadric
inline Twist canonical_twist(const Space& X) {
    switch (X.kind) {
        case SpaceKind::P1: return Twist(-2);
        case SpaceKind::P2: return Twist(-3);
        case SpaceKind::P3: return Twist(-4);
        default: return Twist(-2, -2);
    }
}

// The map induced by M on top cohomology, modeled through duality:
// H^top(O(t))^cols -> H^top(O(t+d))^rows equals the transpose of the
// section-level map of transpose(M) between the dual twists
// K - t - d -> K - t, where K is the canonical twist.
inline Matrix serre_dual_map(const FormMatrix& M, const Twist& t) {
    auto [d1, d2] = M.uniform_degree();
    Twist K = canonical_twist(M.space);
    Twist src(K.a - t.a - d1, K.b - t.b - d2); // dual of the *target* H^top(t+d)
    return mult_map(M.transpose(), src, d1, d2).transpose();
}

} // namespace instanton
