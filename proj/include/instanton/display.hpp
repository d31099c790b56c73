#pragma once
// Exact sheaf-cohomology of a monad's middle bundle on P3 or P2 by chasing
// the two short exact sequences of the display through the multiplication
// matrices of q and epsilon.
//
// Untwisted shape: O(-1)^n --eps--> O^(r+2n) --q--> O(1)^n, with q fiberwise
// surjective and eps fiberwise injective, so K = ker q is a bundle and
// F = K / im eps.  Twisting everything by O(k) and writing A = O(k-1)^n,
// B = O(k)^m, C = O(k+1)^n (m = r+2n):
//
//   0 -> K -> B -> C -> 0   and   0 -> A -> K -> F(k) -> 0.
//
// On P3 and P2 the middle cohomology of line bundles vanishes, so every
// h^i(F(k)) is a kernel/cokernel dimension of a section-level or
// top-cohomology-level multiplication matrix.

#include "form_matrix.hpp"

#include <array>
#include <stdexcept>

namespace instanton {

// h^i(F(k)) for the middle bundle of the monad (eps, q) on P3 (entries
// 0..3) or P2 (entries 0..2, last entry zero).  Dimensions are exact; the
// chase is over-determined and inconsistencies throw.
inline std::array<size_t, 4> display_cohomology(const FormMatrix& eps, const FormMatrix& q,
                                                int r, int n, int k) {
    const Space& X = eps.space;
    if (X.kind != SpaceKind::P3 && X.kind != SpaceKind::P2)
        throw std::invalid_argument("display: engine only runs on P3 or P2");
    if (eps.field != q.field) throw std::invalid_argument("display: field mismatch");
    const size_t m = static_cast<size_t>(r) + 2 * static_cast<size_t>(n);
    if (eps.rows != m || eps.cols != static_cast<size_t>(n) ||
        q.rows != static_cast<size_t>(n) || q.cols != m)
        throw std::invalid_argument("display: matrix shapes do not match (r, n)");
    const int top = X.dim(); // 3 on P3, 2 on P2
    const size_t N = static_cast<size_t>(n);

    auto h0 = [&](int d) { return line_cohomology(X, Twist(d), 0); };
    auto ht = [&](int d) { return line_cohomology(X, Twist(d), top); };

    // section level: H0(B) --Q0--> H0(C), and A's sections inject into H0(K)
    Matrix Q0 = mult_map(q, Twist(k));
    size_t rQ0 = Q0.rank();
    size_t kerQ0 = m * h0(k) - rQ0;
    size_t cokerQ0 = N * h0(k + 1) - rQ0;

    Matrix E0 = mult_map(eps, Twist(k - 1));
    if (E0.rank() != N * h0(k - 1))
        throw std::logic_error("display: section map of eps is not injective");

    // top level: H^top(B) --Qt--> H^top(C) must be onto (no H^{top+1}),
    // and H^top(A) --Et--> H^top(K) = ker Qt
    Matrix Qt = top_mult_map(q, Twist(k));
    size_t rQt = Qt.rank();
    if (rQt != N * ht(k + 1))
        throw std::logic_error("display: top-level map of q is not surjective");
    Matrix Et = top_mult_map(eps, Twist(k - 1));
    size_t rEt = Et.rank();

    std::array<size_t, 4> h = {0, 0, 0, 0};
    h[0] = kerQ0 - N * h0(k - 1);
    if (top == 3) {
        // P3: H1(A) = H2(A) = 0 and H2(K) = 0 make the chase split cleanly
        h[1] = cokerQ0;
        h[2] = N * ht(k - 1) - rEt;
        h[3] = (m * ht(k) - rQt) - rEt;
    } else {
        // P2: H1(A) = 0, and H2(A) -> H2(K) contributes to both h1 and h2
        h[1] = cokerQ0 + (N * ht(k - 1) - rEt);
        h[2] = (m * ht(k) - rQt) - rEt;
        h[3] = 0;
    }

    // independent Euler count over the three line-bundle terms
    long long chi = static_cast<long long>(m) * line_chi(X, Twist(k)) -
                    static_cast<long long>(N) * line_chi(X, Twist(k - 1)) -
                    static_cast<long long>(N) * line_chi(X, Twist(k + 1));
    long long alt = 0;
    for (int i = 0; i <= top; ++i)
        alt += (i % 2 == 0 ? 1 : -1) * static_cast<long long>(h[static_cast<size_t>(i)]);
    if (alt != chi) throw std::logic_error("display: Euler characteristic mismatch");
    return h;
}

} // namespace instanton
