#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "scalar.hpp"

namespace instanton {

// Dense exact matrix. The field travels with the matrix so that empty
// matrices (0 rows or 0 columns) still know where they live.
struct Matrix {
    Field field;
    size_t rows = 0, cols = 0;
    std::vector<Scalar> a;

    Matrix() : field(Field::rationals()) {}
    Matrix(const Field& f, size_t r, size_t c)
        : field(f), rows(r), cols(c), a(r * c, Scalar::zero(f)) {}

    Scalar& at(size_t i, size_t j) { return a[i * cols + j]; }
    const Scalar& at(size_t i, size_t j) const { return a[i * cols + j]; }

    static Matrix identity(const Field& f, size_t n) {
        Matrix m(f, n, n);
        for (size_t i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
        return m;
    }
    static Matrix from_fn(const Field& f, size_t r, size_t c,
                          const std::function<Scalar(size_t, size_t)>& fn) {
        Matrix m(f, r, c);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j) m.at(i, j) = fn(i, j);
        return m;
    }

    bool operator==(const Matrix& o) const {
        return field == o.field && rows == o.rows && cols == o.cols && a == o.a;
    }

    bool is_zero() const {
        for (const auto& s : a) if (!s.is_zero()) return false;
        return true;
    }

    Matrix operator+(const Matrix& o) const {
        require_shape(o.rows, o.cols, "add");
        Matrix m(field, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k] + o.a[k];
        return m;
    }
    Matrix operator-(const Matrix& o) const {
        require_shape(o.rows, o.cols, "subtract");
        Matrix m(field, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k] - o.a[k];
        return m;
    }
    Matrix operator*(const Matrix& o) const {
        if (cols != o.rows || field != o.field)
            throw std::invalid_argument("matrix: product shape/field mismatch");
        Matrix m(field, rows, o.cols);
        for (size_t i = 0; i < rows; ++i)
            for (size_t k = 0; k < cols; ++k) {
                const Scalar& s = at(i, k);
                if (s.is_zero()) continue;
                for (size_t j = 0; j < o.cols; ++j) {
                    const Scalar& t = o.at(k, j);
                    if (!t.is_zero()) m.at(i, j) = m.at(i, j) + s * t;
                }
            }
        return m;
    }
    Matrix scaled(const Scalar& s) const {
        Matrix m(field, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k] * s;
        return m;
    }
    Matrix operator-() const { return scaled(-Scalar::one(field)); }

    Matrix transpose() const {
        Matrix m(field, cols, rows);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j) m.at(j, i) = at(i, j);
        return m;
    }
    Matrix conj() const {
        Matrix m(field, rows, cols);
        for (size_t k = 0; k < a.size(); ++k) m.a[k] = a[k].conj();
        return m;
    }
    Matrix conj_transpose() const { return conj().transpose(); }

    Matrix submatrix(size_t i0, size_t j0, size_t r, size_t c) const {
        if (i0 + r > rows || j0 + c > cols) throw std::out_of_range("matrix: submatrix bounds");
        Matrix m(field, r, c);
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < c; ++j) m.at(i, j) = at(i0 + i, j0 + j);
        return m;
    }
    Matrix column(size_t j) const { return submatrix(0, j, rows, 1); }
    Matrix row(size_t i) const { return submatrix(i, 0, 1, cols); }

    static Matrix hstack(const Matrix& l, const Matrix& r) {
        if (l.rows != r.rows || l.field != r.field)
            throw std::invalid_argument("matrix: hstack mismatch");
        Matrix m(l.field, l.rows, l.cols + r.cols);
        for (size_t i = 0; i < l.rows; ++i) {
            for (size_t j = 0; j < l.cols; ++j) m.at(i, j) = l.at(i, j);
            for (size_t j = 0; j < r.cols; ++j) m.at(i, l.cols + j) = r.at(i, j);
        }
        return m;
    }
    static Matrix vstack(const Matrix& t, const Matrix& b) {
        if (t.cols != b.cols || t.field != b.field)
            throw std::invalid_argument("matrix: vstack mismatch");
        Matrix m(t.field, t.rows + b.rows, t.cols);
        for (size_t i = 0; i < t.rows; ++i)
            for (size_t j = 0; j < t.cols; ++j) m.at(i, j) = t.at(i, j);
        for (size_t i = 0; i < b.rows; ++i)
            for (size_t j = 0; j < b.cols; ++j) m.at(t.rows + i, j) = b.at(i, j);
        return m;
    }

    size_t rank() const;
    Matrix kernel_basis() const;                       // columns span ker
    std::optional<Matrix> solve(const Matrix& rhs) const; // one solution of Ax = rhs
    Matrix inverse() const;
    bool is_invertible() const { return rows == cols && rank() == rows; }
    size_t rank_checked(Rng& rng) const;

    std::string str() const {
        std::string out;
        for (size_t i = 0; i < rows; ++i) {
            out += "[ ";
            for (size_t j = 0; j < cols; ++j) { out += at(i, j).str(); out += j + 1 < cols ? ", " : " "; }
            out += "]\n";
        }
        return out;
    }

private:
    void require_shape(size_t r, size_t c, const char* what) const {
        if (rows != r || cols != c) throw std::invalid_argument(std::string("matrix: ") + what + " shape mismatch");
    }
};

namespace detail {

// Clears denominators row by row so fraction-free elimination stays integral.
inline void integerize_rows(Matrix& m) {
    if (m.field.tag == FieldTag::Fp) return;
    for (size_t i = 0; i < m.rows; ++i) {
        BigInt l = 1;
        for (size_t j = 0; j < m.cols; ++j) {
            const Scalar& s = m.at(i, j);
            l = lcm(l, denominator(s.re));
            if (m.field.tag == FieldTag::Qi) l = lcm(l, denominator(s.im));
        }
        if (l == 1) continue;
        Scalar f = Scalar::of_rat(m.field, Rat(l));
        for (size_t j = 0; j < m.cols; ++j) m.at(i, j) = m.at(i, j) * f;
    }
}

// Fraction-free (Bareiss) forward elimination for Q/Qi, plain Gauss for Fp.
// Returns the echelon matrix and the pivot column of each pivot row.
inline std::pair<Matrix, std::vector<size_t>> echelon(Matrix m) {
    integerize_rows(m);
    std::vector<size_t> pivots;
    const bool bareiss = m.field.tag != FieldTag::Fp;
    Scalar prev = Scalar::one(m.field);
    size_t row = 0;
    for (size_t col = 0; col < m.cols && row < m.rows; ++col) {
        size_t p = row;
        while (p < m.rows && m.at(p, col).is_zero()) ++p;
        if (p == m.rows) continue;
        if (p != row)
            for (size_t j = col; j < m.cols; ++j) std::swap(m.at(p, j), m.at(row, j));
        const Scalar piv = m.at(row, col);
        for (size_t i = row + 1; i < m.rows; ++i) {
            const Scalar f = m.at(i, col);
            if (bareiss) {
                for (size_t j = col; j < m.cols; ++j)
                    m.at(i, j) = (m.at(i, j) * piv - f * m.at(row, j)) / prev;
            } else if (!f.is_zero()) {
                const Scalar g = f / piv;
                for (size_t j = col; j < m.cols; ++j)
                    m.at(i, j) = m.at(i, j) - g * m.at(row, j);
            }
        }
        pivots.push_back(col);
        prev = piv;
        ++row;
    }
    return {std::move(m), std::move(pivots)};
}

} // namespace detail

inline size_t Matrix::rank() const {
    return detail::echelon(*this).second.size();
}

inline Matrix Matrix::kernel_basis() const {
    auto [ref, pivots] = detail::echelon(*this);
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : pivots) is_pivot[c] = true;
    std::vector<size_t> free_cols;
    for (size_t c = 0; c < cols; ++c) if (!is_pivot[c]) free_cols.push_back(c);

    Matrix K(field, cols, free_cols.size());
    for (size_t k = 0; k < free_cols.size(); ++k) {
        K.at(free_cols[k], k) = Scalar::one(field);
        // back substitution over the pivot rows
        for (size_t r = pivots.size(); r-- > 0;) {
            Scalar acc = Scalar::zero(field);
            for (size_t j = pivots[r] + 1; j < cols; ++j) {
                const Scalar& coeff = ref.at(r, j);
                if (!coeff.is_zero() && !K.at(j, k).is_zero()) acc = acc + coeff * K.at(j, k);
            }
            K.at(pivots[r], k) = -acc / ref.at(r, pivots[r]);
        }
    }
    return K;
}

inline std::optional<Matrix> Matrix::solve(const Matrix& rhs) const {
    if (rhs.rows != rows || rhs.field != field)
        throw std::invalid_argument("matrix: solve shape/field mismatch");
    auto [ref, pivots] = detail::echelon(Matrix::hstack(*this, rhs));
    // any pivot inside the rhs block means the system is inconsistent
    for (size_t c : pivots) if (c >= cols) return std::nullopt;
    Matrix X(field, cols, rhs.cols);
    for (size_t k = 0; k < rhs.cols; ++k) {
        for (size_t r = pivots.size(); r-- > 0;) {
            Scalar acc = ref.at(r, cols + k);
            for (size_t j = pivots[r] + 1; j < cols; ++j)
                if (!ref.at(r, j).is_zero() && !X.at(j, k).is_zero())
                    acc = acc - ref.at(r, j) * X.at(j, k);
            X.at(pivots[r], k) = acc / ref.at(r, pivots[r]);
        }
    }
    return X;
}

inline Matrix Matrix::inverse() const {
    if (rows != cols) throw std::invalid_argument("matrix: inverse of nonsquare matrix");
    auto sol = solve(Matrix::identity(field, rows));
    if (!sol || !((*this * *sol) == Matrix::identity(field, rows)))
        throw std::domain_error("matrix: singular");
    return *sol;
}

// reduce a Q-matrix entrywise mod p (entries must be real; denominators
// coprime to p or this throws)
inline Matrix reduce_mod(const Matrix& m, uint64_t p) {
    Matrix out(Field::prime(p), m.rows, m.cols);
    for (size_t k = 0; k < m.a.size(); ++k) out.a[k] = reduce_mod(m.a[k], p);
    return out;
}

// Rank with a cross-check: the exact rank is authoritative, and reductions
// modulo three random primes must not exceed it (and generically match it).
// A modular rank below the exact one only flags a bad prime; persistent
// disagreement across retries indicates corruption and raises.
inline size_t Matrix::rank_checked(Rng& rng) const {
    size_t r = rank();
    if (field.tag == FieldTag::Fp) return r;
    bool has_im = false;
    if (field.tag == FieldTag::Qi)
        for (const auto& s : a) if (s.im != 0) { has_im = true; break; }
    if (has_im) return r; // modular probe covers the real-entry case only
    int agreed = 0, attempts = 0;
    while (agreed < 3 && attempts < 12) {
        ++attempts;
        uint64_t p = random_prime(rng);
        try {
            Matrix mp(Field::prime(p), rows, cols);
            for (size_t k = 0; k < a.size(); ++k) mp.a[k] = instanton::reduce_mod(a[k], p);
            size_t rp = mp.rank();
            if (rp > r) throw std::logic_error("rank_checked: modular rank exceeds exact rank");
            if (rp == r) ++agreed;
        } catch (const std::domain_error&) {
            continue; // denominator hit the prime; resample
        }
    }
    if (agreed < 3) throw std::logic_error("rank_checked: modular ranks persistently disagree");
    return r;
}

inline Matrix random_matrix(Rng& rng, const Field& f, size_t rows, size_t cols,
                            int64_t lo = -5, int64_t hi = 5) {
    Matrix m(f, rows, cols);
    for (auto& s : m.a) s = random_scalar(rng, f, lo, hi);
    return m;
}

} // namespace instanton
