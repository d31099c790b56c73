#pragma once

// Extension-matrix calculus on the smooth quadric P1 x P1.
//
// A rank-r bundle V with a length-m jumping datum along fibers of the left
// projection is presented by its dual: V^dual is the kernel of an evaluation
// surjection
//
//     pi^* L^dual  ->>  (+)_{j=1..m} O_{fiber(x_j)}(1),
//
// where L^dual = O(a)^(r-rho) (+) O(a+1)^rho on the left factor, a = floor(m/r),
// rho = m - a*r, and the x_j are m distinct nonzero points of the affine line.
// The surjection is encoded by a pair of r x m coefficient matrices (left,
// right): row i of each matrix is an element of the truncated ring
// R = k[z]/(p(z)), p(z) = prod_j (z - x_j), written in the basis
// 1, z, ..., z^(m-1); evaluating the rows at the support points yields, for
// each fiber, the pair that a generator maps to in Gamma(O_fiber(1)) = k^2.
//
// The same calculus runs over the coefficient ring k[s_1..s_m] with the s_k
// kept as indeterminates (the coefficients of p); that symbolic variant is
// supported for m <= 3.
//
// Two symmetry groups act on the data: automorphisms of L (block-triangular
// w = [[A, H0 + z*H1], [0, B]]) and units of R acting by multiplication on
// every row.  Both leave the presented bundle, hence its cohomology table,
// unchanged; the slice normalization below picks a canonical representative
// in the unipotent z-direction.

#include <array>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "checks.hpp"

namespace instanton {

// ---------------------------------------------------------------------------
// truncated fiber ring R = k[s][z]/(p(z)), p(z) = z^m - s1 z^(m-1) + s2 z^(m-2) - ...

struct QuotientRing {
    Field field;
    int m = 0;
    bool symbolic = false;
    int nv = 1;                  // variable count of the coefficient polynomials
    std::vector<Scalar> points;  // numeric support (empty in symbolic mode)
    std::vector<Form> s;         // s[k-1] = k-th coefficient s_k of p

    QuotientRing() : field(Field::rationals()) {}
};

// an element c0 + c1*z + ... + c_{m-1}*z^(m-1), coefficients in k[s_1..s_m]
// (constants in numeric mode)
struct QuotientRingElement {
    std::vector<Form> c;
};

namespace detail {

inline void validate_support(const std::vector<Scalar>& pts) {
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_zero())
            throw std::invalid_argument("fiber ring: support points must be nonzero");
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (pts[i] == pts[j])
                throw std::invalid_argument("fiber ring: support points must be distinct");
    }
}

// elementary symmetric functions e_1..e_m of the support points
inline std::vector<Scalar> elementary_symmetric(const Field& F, const std::vector<Scalar>& pts) {
    std::vector<Scalar> e(pts.size() + 1, Scalar::zero(F));
    e[0] = Scalar::one(F);
    for (size_t t = 0; t < pts.size(); ++t)
        for (size_t k = t + 1; k >= 1; --k)
            e[k] = e[k] + pts[t] * e[k - 1];
    return std::vector<Scalar>(e.begin() + 1, e.end());
}

inline Scalar constant_form_value(const Form& f) {
    for (const auto& [e, c] : f.terms)
        for (int v = 0; v < 4; ++v)
            if (e[v] != 0)
                throw std::logic_error("fiber ring: expected a constant coefficient");
    return f.coeff(Expo{0, 0, 0, 0});
}

} // namespace detail

inline QuotientRing quotient_ring(const Field& F, const std::vector<Scalar>& pts) {
    if (pts.empty()) throw std::invalid_argument("fiber ring: empty support");
    detail::validate_support(pts);
    QuotientRing R;
    R.field = F;
    R.m = static_cast<int>(pts.size());
    R.symbolic = false;
    R.nv = 1;
    R.points = pts;
    for (const Scalar& ek : detail::elementary_symmetric(F, pts))
        R.s.push_back(Form::constant(F, 1, ek));
    return R;
}

inline QuotientRing symbolic_quotient_ring(const Field& F, int m) {
    if (m < 1 || m > 3)
        throw std::invalid_argument("fiber ring: the symbolic variant supports 1 <= m <= 3");
    QuotientRing R;
    R.field = F;
    R.m = m;
    R.symbolic = true;
    R.nv = m;
    for (int k = 0; k < m; ++k) R.s.push_back(Form::variable(F, m, k));
    return R;
}

inline QuotientRingElement qre_zero(const QuotientRing& R) {
    return {std::vector<Form>(R.m, Form::zero(R.field, R.nv))};
}

inline QuotientRingElement qre_from_forms(const QuotientRing& R, std::vector<Form> v) {
    if (static_cast<int>(v.size()) != R.m)
        throw std::invalid_argument("fiber ring: coefficient count must equal m");
    for (const Form& f : v)
        if (f.field != R.field || f.nvars != R.nv)
            throw std::invalid_argument("fiber ring: coefficient field/variable mismatch");
    return {std::move(v)};
}

inline QuotientRingElement qre_from_scalars(const QuotientRing& R, const std::vector<Scalar>& v) {
    if (static_cast<int>(v.size()) != R.m)
        throw std::invalid_argument("fiber ring: coefficient count must equal m");
    QuotientRingElement x = qre_zero(R);
    for (int k = 0; k < R.m; ++k) x.c[k] = Form::constant(R.field, R.nv, v[k]);
    return x;
}

inline QuotientRingElement qre_constant(const QuotientRing& R, const Scalar& v) {
    QuotientRingElement x = qre_zero(R);
    x.c[0] = Form::constant(R.field, R.nv, v);
    return x;
}

inline QuotientRingElement qre_one(const QuotientRing& R) {
    return qre_constant(R, Scalar::one(R.field));
}

// the class of z; for m = 1 this is the constant s1
inline QuotientRingElement qre_z(const QuotientRing& R) {
    QuotientRingElement x = qre_zero(R);
    if (R.m == 1) x.c[0] = R.s[0];
    else x.c[1] = Form::constant(R.field, R.nv, Scalar::one(R.field));
    return x;
}

inline QuotientRingElement qre_add(const QuotientRing& R, const QuotientRingElement& a,
                                   const QuotientRingElement& b) {
    QuotientRingElement x = qre_zero(R);
    for (int k = 0; k < R.m; ++k) x.c[k] = a.c[k] + b.c[k];
    return x;
}

inline QuotientRingElement qre_scale(const QuotientRing& R, const Scalar& c,
                                     const QuotientRingElement& a) {
    QuotientRingElement x = qre_zero(R);
    Form cf = Form::constant(R.field, R.nv, c);
    for (int k = 0; k < R.m; ++k) x.c[k] = cf * a.c[k];
    return x;
}

// school multiplication followed by top-down reduction against
// z^m = s1 z^(m-1) - s2 z^(m-2) + ... + (-1)^(m-1) s_m
inline QuotientRingElement qre_mul(const QuotientRing& R, const QuotientRingElement& a,
                                   const QuotientRingElement& b) {
    const int m = R.m;
    if (static_cast<int>(a.c.size()) != m || static_cast<int>(b.c.size()) != m)
        throw std::invalid_argument("fiber ring: coefficient count must equal m");
    std::vector<Form> prod(2 * m - 1, Form::zero(R.field, R.nv));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            prod[i + j] = prod[i + j] + a.c[i] * b.c[j];
    for (int d = 2 * m - 2; d >= m; --d) {
        if (prod[d].is_zero()) continue;
        for (int k = 1; k <= m; ++k) {
            Form t = prod[d] * R.s[k - 1];
            if (k % 2 == 0) t = -t;
            prod[d - k] = prod[d - k] + t;
        }
        prod[d] = Form::zero(R.field, R.nv);
    }
    prod.resize(m);
    return {std::move(prod)};
}

// multiplication-by-t matrix in the basis 1, z, ..., z^(m-1): column j holds
// the coefficients of t * z^j
inline std::vector<std::vector<Form>> qre_mult_matrix(const QuotientRing& R,
                                                      const QuotientRingElement& t) {
    std::vector<std::vector<Form>> M(R.m, std::vector<Form>(R.m, Form::zero(R.field, R.nv)));
    QuotientRingElement col = t;
    QuotientRingElement z = qre_z(R);
    for (int j = 0; j < R.m; ++j) {
        for (int i = 0; i < R.m; ++i) M[i][j] = col.c[i];
        if (j + 1 < R.m) col = qre_mul(R, col, z);
    }
    return M;
}

namespace detail {

inline Form form_det(const Field& F, int nv, const std::vector<std::vector<Form>>& M) {
    const size_t n = M.size();
    if (n == 0) return Form::constant(F, nv, Scalar::one(F));
    if (n == 1) return M[0][0];
    Form det = Form::zero(F, nv);
    for (size_t j = 0; j < n; ++j) {
        if (M[0][j].is_zero()) continue;
        std::vector<std::vector<Form>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Form> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(M[i][k]);
            minor.push_back(std::move(row));
        }
        Form term = M[0][j] * form_det(F, nv, minor);
        det = (j % 2 == 0) ? det + term : det - term;
    }
    return det;
}

} // namespace detail

// a unit of R is an element whose multiplication matrix is invertible; in the
// symbolic variant the determinant is required to be nonzero as a polynomial
// in the s_k (invertibility over the fraction field)
inline bool qre_invertible(const QuotientRing& R, const QuotientRingElement& t) {
    auto M = qre_mult_matrix(R, t);
    if (!R.symbolic) {
        Matrix A(R.field, R.m, R.m);
        for (int i = 0; i < R.m; ++i)
            for (int j = 0; j < R.m; ++j)
                A.at(i, j) = detail::constant_form_value(M[i][j]);
        return A.is_invertible();
    }
    return !detail::form_det(R.field, R.nv, M).is_zero();
}

// numeric diagonalization: the values (t(x_1), ..., t(x_m)) of an element at
// the support points
inline std::vector<Scalar> qre_values(const QuotientRing& R, const QuotientRingElement& t) {
    if (R.symbolic)
        throw std::invalid_argument("fiber ring: values at the support need numeric mode");
    std::vector<Scalar> out;
    for (const Scalar& x : R.points) {
        Scalar acc = Scalar::zero(R.field);
        for (int k = R.m - 1; k >= 0; --k)
            acc = acc * x + detail::constant_form_value(t.c[k]);
        out.push_back(acc);
    }
    return out;
}

// substitute the elementary symmetric values of a concrete support for the
// symbolic s_k
inline QuotientRingElement qre_evaluate_at_support(const QuotientRing& sym,
                                                   const QuotientRing& num,
                                                   const QuotientRingElement& t) {
    if (!sym.symbolic || num.symbolic || sym.m != num.m)
        throw std::invalid_argument("fiber ring: evaluation maps a symbolic ring to a numeric one");
    std::vector<Scalar> svals;
    for (const Form& f : num.s) svals.push_back(detail::constant_form_value(f));
    QuotientRingElement out = qre_zero(num);
    for (int k = 0; k < sym.m; ++k)
        out.c[k] = Form::constant(num.field, num.nv, t.c[k].evaluate(svals));
    return out;
}

// ---------------------------------------------------------------------------
// extension data: the two r x m coefficient matrices over R

struct ExtensionData {
    Field field;
    int m = 0, r = 0;
    std::vector<Scalar> points;  // numeric support; empty in symbolic mode
    Matrix left, right;          // numeric coefficient matrices, rows = ring elements
    bool symbolic = false;
    std::vector<std::vector<Form>> sleft, sright;  // symbolic entries over k[s_1..s_m]

    ExtensionData() : field(Field::rationals()) {}
};

// generic splitting type of the direct image: a = floor(m/r), rho = m - a*r
inline std::pair<int, int> generic_splitting(int m, int r) {
    if (r < 2 || m < r)
        throw std::invalid_argument("generic splitting: need m >= r >= 2");
    return {m / r, m % r};
}

// first term of the density estimate; the closed form is reported together
// with whether the hypothesis n2 >= r2 held
struct Term1Result {
    long value = 0;
    bool hypothesis_ok = true;
};

inline Term1Result term1(long r1, long n1, long r2, long n2) {
    return {r1 * (n2 - r2) + r2 * n1, n2 >= r2};
}

inline ExtensionData make_extension_data(const std::vector<Scalar>& points, const Matrix& left,
                                         const Matrix& right) {
    if (left.rows != right.rows || left.cols != right.cols)
        throw std::invalid_argument("extension data: the two coefficient matrices must have equal shape");
    if (left.field != right.field)
        throw std::invalid_argument("extension data: field mismatch");
    const int r = static_cast<int>(left.rows);
    const int m = static_cast<int>(left.cols);
    generic_splitting(m, r);  // enforces m >= r >= 2
    if (static_cast<int>(points.size()) != m)
        throw std::invalid_argument("extension data: support size must equal the column count");
    detail::validate_support(points);
    ExtensionData e;
    e.field = left.field;
    e.m = m;
    e.r = r;
    e.points = points;
    e.left = left;
    e.right = right;
    return e;
}

inline ExtensionData make_symbolic_extension_data(const Field& F, int m, int r,
                                                  std::vector<std::vector<Form>> sleft,
                                                  std::vector<std::vector<Form>> sright) {
    generic_splitting(m, r);
    if (m > 3)
        throw std::invalid_argument("extension data: the symbolic variant supports m <= 3");
    auto check_shape = [&](const std::vector<std::vector<Form>>& M) {
        if (static_cast<int>(M.size()) != r)
            throw std::invalid_argument("extension data: symbolic matrix needs r rows");
        for (const auto& row : M) {
            if (static_cast<int>(row.size()) != m)
                throw std::invalid_argument("extension data: symbolic matrix needs m columns");
            for (const Form& f : row)
                if (f.field != F || f.nvars != m)
                    throw std::invalid_argument("extension data: symbolic entries live in k[s_1..s_m]");
        }
    };
    check_shape(sleft);
    check_shape(sright);
    ExtensionData e;
    e.field = F;
    e.m = m;
    e.r = r;
    e.symbolic = true;
    e.sleft = std::move(sleft);
    e.sright = std::move(sright);
    return e;
}

inline QuotientRing ring_of(const ExtensionData& e) {
    return e.symbolic ? symbolic_quotient_ring(e.field, e.m) : quotient_ring(e.field, e.points);
}

inline ExtensionData random_extension_data(Rng& rng, const Field& F, int m, int r) {
    generic_splitting(m, r);
    std::vector<Scalar> pts;
    while (static_cast<int>(pts.size()) < m) {
        Scalar x = random_scalar(rng, F, -3 * m, 3 * m);
        if (x.is_zero()) continue;
        bool dup = false;
        for (const Scalar& y : pts) dup = dup || x == y;
        if (!dup) pts.push_back(x);
    }
    return make_extension_data(pts, random_matrix(rng, F, r, m), random_matrix(rng, F, r, m));
}

namespace detail {

inline std::vector<QuotientRingElement> side_rows(const QuotientRing& R, const ExtensionData& e,
                                                  bool left_side) {
    std::vector<QuotientRingElement> rows;
    for (int i = 0; i < e.r; ++i) {
        if (e.symbolic) {
            rows.push_back(qre_from_forms(R, left_side ? e.sleft[i] : e.sright[i]));
        } else {
            std::vector<Scalar> v;
            for (int j = 0; j < e.m; ++j)
                v.push_back(left_side ? e.left.at(i, j) : e.right.at(i, j));
            rows.push_back(qre_from_scalars(R, v));
        }
    }
    return rows;
}

inline void store_rows(ExtensionData& e, bool left_side,
                       const std::vector<QuotientRingElement>& rows) {
    if (e.symbolic) {
        auto& M = left_side ? e.sleft : e.sright;
        for (int i = 0; i < e.r; ++i) M[i] = rows[i].c;
    } else {
        Matrix& M = left_side ? e.left : e.right;
        for (int i = 0; i < e.r; ++i)
            for (int j = 0; j < e.m; ++j)
                M.at(i, j) = constant_form_value(rows[i].c[j]);
    }
}

} // namespace detail

// evaluate a symbolic datum at a concrete support, producing numeric data
inline ExtensionData evaluate_at_support(const ExtensionData& e, const std::vector<Scalar>& points) {
    if (!e.symbolic)
        throw std::invalid_argument("extension data: evaluation applies to symbolic data");
    if (static_cast<int>(points.size()) != e.m)
        throw std::invalid_argument("extension data: support size must equal the column count");
    detail::validate_support(points);
    std::vector<Scalar> svals = detail::elementary_symmetric(e.field, points);
    Matrix left(e.field, e.r, e.m), right(e.field, e.r, e.m);
    for (int i = 0; i < e.r; ++i)
        for (int j = 0; j < e.m; ++j) {
            left.at(i, j) = e.sleft[i][j].evaluate(svals);
            right.at(i, j) = e.sright[i][j].evaluate(svals);
        }
    return make_extension_data(points, left, right);
}

// ---------------------------------------------------------------------------
// block decomposition of the left coefficient matrix
//
// Rows split as (r-rho) u-rows over rho v-rows; columns split into the ranges
// [0, r-rho), [r-rho, r), [r, m).  Blocks I/III/V are the u-row pieces,
// II/IV/VI the v-row pieces.  Primed blocks are the same column ranges of the
// matrix whose rows have been multiplied by z in R.

namespace detail {

inline Matrix left_submatrix(const ExtensionData& e, bool u_rows, int col_lo, int col_hi) {
    if (e.symbolic)
        throw std::invalid_argument("extension data: block accessors need numeric data");
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    int row_lo = u_rows ? 0 : e.r - rho;
    int row_hi = u_rows ? e.r - rho : e.r;
    Matrix B(e.field, row_hi - row_lo, col_hi - col_lo);
    for (int i = row_lo; i < row_hi; ++i)
        for (int j = col_lo; j < col_hi; ++j)
            B.at(i - row_lo, j - col_lo) = e.left.at(i, j);
    return B;
}

// rows of M, read as ring elements, multiplied by z
inline Matrix z_shift_rows(const QuotientRing& R, const Matrix& M) {
    Matrix out(M.field, M.rows, M.cols);
    QuotientRingElement z = qre_z(R);
    for (size_t i = 0; i < M.rows; ++i) {
        std::vector<Scalar> v;
        for (size_t j = 0; j < M.cols; ++j) v.push_back(M.at(i, j));
        QuotientRingElement zr = qre_mul(R, z, qre_from_scalars(R, v));
        for (size_t j = 0; j < M.cols; ++j) out.at(i, j) = detail::constant_form_value(zr.c[j]);
    }
    return out;
}

inline Matrix left_z_submatrix(const ExtensionData& e, bool u_rows, int col_lo, int col_hi) {
    if (e.symbolic)
        throw std::invalid_argument("extension data: block accessors need numeric data");
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    Matrix Z = z_shift_rows(ring_of(e), e.left);
    int row_lo = u_rows ? 0 : e.r - rho;
    int row_hi = u_rows ? e.r - rho : e.r;
    Matrix B(e.field, row_hi - row_lo, col_hi - col_lo);
    for (int i = row_lo; i < row_hi; ++i)
        for (int j = col_lo; j < col_hi; ++j)
            B.at(i - row_lo, j - col_lo) = Z.at(i, j);
    return B;
}

} // namespace detail

inline Matrix block_I(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    return detail::left_submatrix(e, true, 0, e.r - rho);
}
inline Matrix block_II(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    return detail::left_submatrix(e, false, 0, e.r - rho);
}
inline Matrix block_III(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a, (void)rho;
    return detail::left_submatrix(e, true, e.r - rho, e.r);
}
inline Matrix block_IV(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a, (void)rho;
    return detail::left_submatrix(e, false, e.r - rho, e.r);
}
inline Matrix block_V(const ExtensionData& e) {
    return detail::left_submatrix(e, true, e.r, e.m);
}
inline Matrix block_VI(const ExtensionData& e) {
    return detail::left_submatrix(e, false, e.r, e.m);
}
inline Matrix block_II_primed(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    return detail::left_z_submatrix(e, false, 0, e.r - rho);
}
inline Matrix block_IV_primed(const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a, (void)rho;
    return detail::left_z_submatrix(e, false, e.r - rho, e.r);
}
inline Matrix block_VI_primed(const ExtensionData& e) {
    return detail::left_z_submatrix(e, false, e.r, e.m);
}

// ---------------------------------------------------------------------------
// the two symmetry groups

// w = [[A, H0 + z*H1], [0, B]] acting on L = O(-a)^(r-rho) (+) O(-a-1)^rho;
// the off-diagonal part maps the second summand into the first, so H0 and H1
// are (r-rho) x rho
struct AutLElement {
    Matrix A, B, H0, H1;
};

inline AutLElement make_aut(const Matrix& A, const Matrix& B, const Matrix& H0, const Matrix& H1) {
    if (A.rows != A.cols || B.rows != B.cols)
        throw std::invalid_argument("bundle automorphism: diagonal blocks must be square");
    if (H0.rows != A.rows || H0.cols != B.rows || H1.rows != A.rows || H1.cols != B.rows)
        throw std::invalid_argument("bundle automorphism: off-diagonal blocks must be (r-rho) x rho");
    if (!A.is_invertible() || !B.is_invertible())
        throw std::invalid_argument("bundle automorphism: diagonal blocks must be invertible");
    return {A, B, H0, H1};
}

inline AutLElement aut_identity(const Field& F, int r, int rho) {
    return {Matrix::identity(F, r - rho), Matrix::identity(F, rho), Matrix(F, r - rho, rho),
            Matrix(F, r - rho, rho)};
}

inline AutLElement aut_compose(const AutLElement& w1, const AutLElement& w2) {
    return make_aut(w1.A * w2.A, w1.B * w2.B, w1.A * w2.H0 + w1.H0 * w2.B,
                    w1.A * w2.H1 + w1.H1 * w2.B);
}

inline AutLElement random_aut(Rng& rng, const Field& F, int r, int rho) {
    auto random_gl = [&](int n) {
        for (;;) {
            Matrix M = random_matrix(rng, F, n, n);
            if (M.is_invertible()) return M;
        }
    };
    return {random_gl(r - rho), random_gl(rho), random_matrix(rng, F, r - rho, rho),
            random_matrix(rng, F, r - rho, rho)};
}

// action on the data: with rows split as u (top r-rho) and v (bottom rho),
//   u' = A u + H0 v + H1 (z v),   v' = B v,
// applied to the left and right coefficient matrices alike; restricted to the
// three column ranges this is exactly the block calculus
//   w x [I] = A[I] + H0[II] + H1[II'],  w x [IV] = B[IV],  etc.
inline ExtensionData aut_action(const AutLElement& w, const ExtensionData& e) {
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    if (static_cast<int>(w.A.rows) != e.r - rho || static_cast<int>(w.B.rows) != rho)
        throw std::invalid_argument("bundle automorphism: block shapes do not match the data");
    QuotientRing R = ring_of(e);
    QuotientRingElement z = qre_z(R);
    ExtensionData out = e;
    for (bool left_side : {true, false}) {
        std::vector<QuotientRingElement> rows = detail::side_rows(R, e, left_side);
        std::vector<QuotientRingElement> zrows;
        for (int k = 0; k < rho; ++k) zrows.push_back(qre_mul(R, z, rows[e.r - rho + k]));
        std::vector<QuotientRingElement> nrows;
        for (int i = 0; i < e.r - rho; ++i) {
            QuotientRingElement acc = qre_zero(R);
            for (int k = 0; k < e.r - rho; ++k)
                acc = qre_add(R, acc, qre_scale(R, w.A.at(i, k), rows[k]));
            for (int k = 0; k < rho; ++k) {
                acc = qre_add(R, acc, qre_scale(R, w.H0.at(i, k), rows[e.r - rho + k]));
                acc = qre_add(R, acc, qre_scale(R, w.H1.at(i, k), zrows[k]));
            }
            nrows.push_back(acc);
        }
        for (int i = 0; i < rho; ++i) {
            QuotientRingElement acc = qre_zero(R);
            for (int k = 0; k < rho; ++k)
                acc = qre_add(R, acc, qre_scale(R, w.B.at(i, k), rows[e.r - rho + k]));
            nrows.push_back(acc);
        }
        detail::store_rows(out, left_side, nrows);
    }
    return out;
}

// multiplication of every row of both coefficient matrices by a unit t of R;
// at a numeric support this diagonalizes to scaling the j-th evaluated column
// by t(x_j)
inline ExtensionData t_action(const QuotientRingElement& t, const ExtensionData& e) {
    QuotientRing R = ring_of(e);
    if (static_cast<int>(t.c.size()) != R.m)
        throw std::invalid_argument("ring action: element does not live in the data's fiber ring");
    for (const Form& f : t.c)
        if (f.field != R.field || f.nvars != R.nv)
            throw std::invalid_argument("ring action: element does not live in the data's fiber ring");
    if (!qre_invertible(R, t))
        throw std::domain_error("ring action: the element is not invertible");
    ExtensionData out = e;
    for (bool left_side : {true, false}) {
        std::vector<QuotientRingElement> rows = detail::side_rows(R, e, left_side);
        for (auto& row : rows) row = qre_mul(R, t, row);
        detail::store_rows(out, left_side, rows);
    }
    return out;
}

// canonical representative in the unipotent z-direction: the unique
// w = [[1, z*H1], [0, 1]] with H1 = -[III] [IV']^(-1) zeroes the [III] block
inline std::pair<AutLElement, ExtensionData> normalize_u1_slice(const ExtensionData& e) {
    if (e.symbolic)
        throw std::invalid_argument("slice normalization needs numeric data");
    auto [a, rho] = generic_splitting(e.m, e.r);
    (void)a;
    AutLElement w = aut_identity(e.field, e.r, rho);
    if (rho == 0) return {w, e};
    Matrix IVp = block_IV_primed(e);
    if (!IVp.is_invertible())
        throw std::domain_error("non-generic extension: the shifted diagonal block is singular");
    w.H1 = -(block_III(e) * IVp.inverse());
    ExtensionData out = aut_action(w, e);
    for (const Scalar& s : block_III(out).a)
        if (!s.is_zero())
            throw std::logic_error("slice normalization failed to zero the [III] block");
    return {w, out};
}

// ---------------------------------------------------------------------------
// the presented bundle on the quadric and its cohomology

struct QuadricBundlePresentation {
    ExtensionData data;
    int a = 0, rho = 0;
    // row-polynomial values at the support points: column j holds the pair
    // coordinates (eval_left(i,j), eval_right(i,j)) that generator i maps to
    // in Gamma(O_fiber(x_j)(1))
    Matrix eval_left, eval_right;
};

inline QuadricBundlePresentation build_quadric_bundle(const ExtensionData& e) {
    if (e.symbolic)
        throw std::invalid_argument("quadric bundle: construction needs numeric data");
    auto [a, rho] = generic_splitting(e.m, e.r);
    Matrix V(e.field, e.m, e.m);
    for (int k = 0; k < e.m; ++k)
        for (int j = 0; j < e.m; ++j) {
            Scalar p = Scalar::one(e.field);
            for (int t = 0; t < k; ++t) p = p * e.points[j];
            V.at(k, j) = p;
        }
    QuadricBundlePresentation P;
    P.data = e;
    P.a = a;
    P.rho = rho;
    P.eval_left = e.left * V;
    P.eval_right = e.right * V;
    for (int j = 0; j < e.m; ++j) {
        Matrix pairs(e.field, e.r, 2);
        for (int i = 0; i < e.r; ++i) {
            pairs.at(i, 0) = P.eval_left.at(i, j);
            pairs.at(i, 1) = P.eval_right.at(i, j);
        }
        if (pairs.rank() < 2)
            throw std::domain_error("quadric bundle: zero or degenerate evaluation pair at support point " +
                                    std::to_string(j + 1));
    }
    return P;
}

namespace detail {

inline size_t h0_p1(int d) { return d >= 0 ? static_cast<size_t>(d + 1) : 0; }
inline size_t h1_p1(int d) { return d <= -2 ? static_cast<size_t>(-d - 1) : 0; }

} // namespace detail

// cohomology of the dual bundle twisted by (k1, k2), from the long exact
// sequence of the defining surjection: the connecting data are two explicit
// evaluation matrices, one on sections and one on the right-factor part of
// the first cohomology of pi^* L^dual (restriction to a fiber kills the
// left-factor part, which therefore passes untouched into h^1 of the kernel)
inline std::array<size_t, 3> bundle_cohomology(const QuadricBundlePresentation& P, int k1, int k2) {
    const Field& F = P.data.field;
    const int r = P.data.r, m = P.data.m;
    std::vector<int> degs;
    for (int i = 0; i < r; ++i) degs.push_back((i < r - P.rho ? P.a : P.a + 1) + k1);

    // powers of the support points
    auto xpow = [&](int j, int k) {
        Scalar p = Scalar::one(F);
        for (int t = 0; t < k; ++t) p = p * P.data.points[j];
        return p;
    };

    // section-level evaluation: source basis x^alpha t^beta per generator,
    // target basis t-monomials of degree k2+1 per fiber
    size_t h0L = 0;
    std::vector<size_t> col_off(r, 0);
    for (int i = 0; i < r; ++i) {
        col_off[i] = h0L;
        h0L += detail::h0_p1(degs[i]) * detail::h0_p1(k2);
    }
    const size_t h0S = static_cast<size_t>(m) * detail::h0_p1(k2 + 1);
    size_t rank0 = 0;
    if (h0L > 0 && h0S > 0) {
        Matrix B0(F, h0S, h0L);
        for (int i = 0; i < r; ++i) {
            if (degs[i] < 0 || k2 < 0) continue;
            size_t col = col_off[i];
            for (int alpha = 0; alpha <= degs[i]; ++alpha)
                for (int beta = 0; beta <= k2; ++beta, ++col)
                    for (int j = 0; j < m; ++j) {
                        size_t row = static_cast<size_t>(j) * detail::h0_p1(k2 + 1);
                        B0.at(row + beta, col) = B0.at(row + beta, col) + xpow(j, alpha) * P.eval_left.at(i, j);
                        B0.at(row + beta + 1, col) =
                            B0.at(row + beta + 1, col) + xpow(j, alpha) * P.eval_right.at(i, j);
                    }
        }
        rank0 = B0.rank();
    }

    // first-cohomology-level evaluation on the component with right-factor
    // H^1: source basis x^alpha (x) [t0^p t1^q], p,q <= -1, p+q = k2; target
    // basis [t0^p t1^q], p+q = k2+1, per fiber
    size_t h1L = 0;
    for (int i = 0; i < r; ++i)
        h1L += detail::h1_p1(degs[i]) * detail::h0_p1(k2) + detail::h0_p1(degs[i]) * detail::h1_p1(k2);
    const size_t h1S = static_cast<size_t>(m) * detail::h1_p1(k2 + 1);
    const size_t h1right = detail::h1_p1(k2);  // count of [p,q] classes, q = k2 - p
    size_t cols1 = 0;
    for (int i = 0; i < r; ++i) cols1 += detail::h0_p1(degs[i]) * h1right;
    size_t rank1 = 0;
    if (cols1 > 0 && h1S > 0) {
        const size_t tgt = detail::h1_p1(k2 + 1);
        Matrix B1(F, h1S, cols1);
        size_t col = 0;
        for (int i = 0; i < r; ++i) {
            if (degs[i] < 0) continue;
            for (int alpha = 0; alpha <= degs[i]; ++alpha)
                for (size_t c = 0; c < h1right; ++c, ++col) {
                    // class t0^p t1^q with p = -1-c, q = k2 - p
                    int p = -1 - static_cast<int>(c);
                    int q = k2 - p;
                    for (int j = 0; j < m; ++j) {
                        size_t row = static_cast<size_t>(j) * tgt;
                        // multiplication by t0: (p+1, q), survives iff p+1 <= -1
                        if (p + 1 <= -1) {
                            size_t idx = static_cast<size_t>(-(p + 1) - 1);
                            B1.at(row + idx, col) =
                                B1.at(row + idx, col) + xpow(j, alpha) * P.eval_left.at(i, j);
                        }
                        // multiplication by t1: (p, q+1), survives iff q+1 <= -1
                        if (q + 1 <= -1) {
                            size_t idx = static_cast<size_t>(-p - 1);
                            B1.at(row + idx, col) =
                                B1.at(row + idx, col) + xpow(j, alpha) * P.eval_right.at(i, j);
                        }
                    }
                }
        }
        rank1 = B1.rank();
    }

    size_t h2L = 0;
    for (int i = 0; i < r; ++i) h2L += detail::h1_p1(degs[i]) * detail::h1_p1(k2);

    std::array<size_t, 3> out{};
    out[0] = h0L - rank0;
    out[1] = (h0S - rank0) + (h1L - rank1);
    out[2] = (h1S - rank1) + h2L;
    return out;
}

// the bundle's own table via Serre duality (canonical twist (-2,-2))
inline std::array<size_t, 3> v_cohomology(const QuadricBundlePresentation& P, int k1, int k2) {
    std::array<size_t, 3> d = bundle_cohomology(P, -2 - k1, -2 - k2);
    return {d[2], d[1], d[0]};
}

// h1(V) - h0(V) = m - r, h2(V) = 0, chi(V) = r - m for every valid presentation
inline CheckReport riemann_roch_check(const QuadricBundlePresentation& P) {
    CheckReport rep;
    rep.name = "riemann_roch";
    rep.inputs = "quadric bundle r=" + std::to_string(P.data.r) + " m=" + std::to_string(P.data.m) +
                 " field=" + detail::field_name(P.data.field);
    const long m = P.data.m, r = P.data.r;
    rep.expected = "h1(V) - h0(V) = m - r = " + std::to_string(m - r) +
                   ", h2(V) = 0, chi(V) = " + std::to_string(r - m);
    std::array<size_t, 3> t = v_cohomology(P, 0, 0);
    long diff = static_cast<long>(t[1]) - static_cast<long>(t[0]);
    long chi = static_cast<long>(t[0]) - static_cast<long>(t[1]) + static_cast<long>(t[2]);
    rep.computed = "V cohomology [" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," +
                   std::to_string(t[2]) + "], difference " + std::to_string(diff) + ", chi " +
                   std::to_string(chi);
    rep.pass = (diff == m - r) && (t[2] == 0) && (chi == r - m);
    return rep;
}

} // namespace instanton
