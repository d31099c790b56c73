#include <catch2/catch_amalgamated.hpp>
#include <instanton/hirzebruch.hpp>

using namespace instanton;

namespace {

std::vector<Scalar> int_points(const Field& F, std::initializer_list<int> vals) {
    std::vector<Scalar> out;
    for (int v : vals) out.push_back(Scalar::of_int(F, v));
    return out;
}

// a two-term line-bundle complex quasi-isomorphic to the dual bundle in
// degree 0: the mapping cone of the fiber-structure-sheaf resolutions,
//   piL^dual (+) (+)_j O(A-1,1)  ->  (+)_j O(A,1),   A = a + m,
// with entries ell_ij * s0^(A - a_i - (m-1)) * prod_{k != j} (s1 - x_k s0)
// and the diagonal s1 - x_j s0.  Feeding it to the Cech engine gives an
// independent computation of the cohomology table.
LineBundleComplex kernel_presentation_complex(const QuadricBundlePresentation& P) {
    const Field& F = P.data.field;
    Space X = Space::quadric();
    const int r = P.data.r, m = P.data.m;
    const int A = P.a + m;
    LineBundleComplex C;
    C.field = F;
    C.space = X;
    std::vector<Twist> t0;
    for (int i = 0; i < r; ++i) t0.push_back(Twist(i < r - P.rho ? P.a : P.a + 1, 0));
    for (int j = 0; j < m; ++j) t0.push_back(Twist(A - 1, 1));
    std::vector<Twist> t1;
    for (int j = 0; j < m; ++j) t1.push_back(Twist(A, 1));
    C.terms.push_back(t0);
    C.terms.push_back(t1);
    FormMatrix D(F, X, m, r + m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < r; ++i) {
            int ai = (i < r - P.rho ? P.a : P.a + 1);
            Form h = Form::linear(F, {Scalar::zero(F), Scalar::zero(F), P.eval_left.at(i, j),
                                      P.eval_right.at(i, j)});
            int pad = A - ai - (m - 1);
            if (pad > 0) h = h * Form::variable(F, 4, 0, pad);
            for (int k = 0; k < m; ++k) {
                if (k == j) continue;
                h = h * Form::linear(F, {-P.data.points[k], Scalar::one(F), Scalar::zero(F),
                                         Scalar::zero(F)});
            }
            D.at(j, i) = h;
        }
        D.at(j, r + j) =
            Form::linear(F, {-P.data.points[j], Scalar::one(F), Scalar::zero(F), Scalar::zero(F)});
    }
    C.maps.push_back(D);
    C.validate();
    return C;
}

std::array<size_t, 3> dims3(size_t a, size_t b, size_t c) { return {a, b, c}; }

// the direct-image prediction for the section profile of the twisted bundle
size_t predicted_h0(int r, int a, int rho, int k) {
    return static_cast<size_t>(r - rho) * static_cast<size_t>(std::max(0, k - a + 1)) +
           static_cast<size_t>(rho) * static_cast<size_t>(std::max(0, k - a));
}

const std::vector<std::pair<int, int>>& twist_battery() {
    static const std::vector<std::pair<int, int>> b{{0, 0},  {-2, -2}, {-1, 0}, {0, -1},
                                                    {1, 1},  {-3, -1}, {2, 0},  {-1, -3}};
    return b;
}

} // namespace

TEST_CASE("floor splitting and the density term follow their closed forms") {
    CHECK(generic_splitting(5, 2) == std::pair<int, int>(2, 1));
    CHECK(generic_splitting(4, 2) == std::pair<int, int>(2, 0));
    CHECK(generic_splitting(4, 3) == std::pair<int, int>(1, 1));
    CHECK(generic_splitting(6, 3) == std::pair<int, int>(2, 0));
    CHECK_THROWS_AS(generic_splitting(3, 4), std::invalid_argument);
    CHECK_THROWS_AS(generic_splitting(5, 1), std::invalid_argument);

    Term1Result t1 = term1(1, 0, 1, 1);
    CHECK(t1.value == 0);
    CHECK(t1.hypothesis_ok);
    Term1Result t2 = term1(2, 1, 1, 1);
    CHECK(t2.value == 1);
    CHECK(t2.hypothesis_ok);
    Term1Result t3 = term1(1, 1, 1, 0);
    CHECK(t3.value == 0);
    CHECK_FALSE(t3.hypothesis_ok);
}

TEST_CASE("fiber ring arithmetic reduces against the support polynomial") {
    Field F = Field::rationals();
    QuotientRing R = quotient_ring(F, int_points(F, {1, 2}));

    SECTION("multiplication reduces z^2 to s1 z - s2") {
        // p(z) = (z-1)(z-2) = z^2 - 3z + 2, so z*z = 3z - 2
        QuotientRingElement zz = qre_mul(R, qre_z(R), qre_z(R));
        CHECK(detail::constant_form_value(zz.c[0]) == Scalar::of_int(F, -2));
        CHECK(detail::constant_form_value(zz.c[1]) == Scalar::of_int(F, 3));
    }

    SECTION("evaluation at the support diagonalizes multiplication") {
        Rng rng(4501);
        QuotientRing R3 = quotient_ring(F, int_points(F, {1, -2, 3}));
        std::vector<Scalar> ac, bc;
        for (int k = 0; k < 3; ++k) {
            ac.push_back(random_scalar(rng, F, -5, 5));
            bc.push_back(random_scalar(rng, F, -5, 5));
        }
        QuotientRingElement a = qre_from_scalars(R3, ac), b = qre_from_scalars(R3, bc);
        std::vector<Scalar> va = qre_values(R3, a), vb = qre_values(R3, b);
        std::vector<Scalar> vab = qre_values(R3, qre_mul(R3, a, b));
        for (int j = 0; j < 3; ++j) CHECK(vab[j] == va[j] * vb[j]);
    }

    SECTION("units are detected by the multiplication matrix") {
        CHECK(qre_invertible(R, qre_z(R)));  // z vanishes nowhere on {1,2}
        QuotientRingElement zm1 = qre_from_scalars(R, {Scalar::of_int(F, -1), Scalar::one(F)});
        CHECK_FALSE(qre_invertible(R, zm1));  // z - 1 vanishes at the first point
        CHECK(qre_invertible(R, qre_one(R)));
        CHECK_FALSE(qre_invertible(R, qre_zero(R)));
    }

    SECTION("the symbolic m=2 shift formula") {
        // z * (c0 + c1 z) = -c1 s2 + (c0 + c1 s1) z
        QuotientRing R2 = symbolic_quotient_ring(F, 2);
        std::vector<Scalar> c{Scalar::of_int(F, 5), Scalar::of_int(F, 7)};
        QuotientRingElement zc = qre_mul(R2, qre_z(R2), qre_from_scalars(R2, c));
        Form exp0 = -(Form::constant(F, 2, c[1]) * Form::variable(F, 2, 1));
        Form exp1 =
            Form::constant(F, 2, c[0]) + Form::constant(F, 2, c[1]) * Form::variable(F, 2, 0);
        CHECK(zc.c[0] == exp0);
        CHECK(zc.c[1] == exp1);
    }

    SECTION("symbolic units and the symbolic determinant") {
        QuotientRing R2 = symbolic_quotient_ring(F, 2);
        CHECK(qre_invertible(R2, qre_z(R2)));  // det of multiplication by z is s2, nonzero
        CHECK_FALSE(qre_invertible(R2, qre_zero(R2)));
        CHECK(qre_invertible(R2, qre_one(R2)));
    }

    SECTION("ring constructors validate their input") {
        CHECK_THROWS_AS(quotient_ring(F, int_points(F, {1, 0})), std::invalid_argument);
        CHECK_THROWS_AS(quotient_ring(F, int_points(F, {2, 2})), std::invalid_argument);
        CHECK_THROWS_AS(quotient_ring(F, {}), std::invalid_argument);
        CHECK_THROWS_AS(symbolic_quotient_ring(F, 4), std::invalid_argument);
        CHECK_THROWS_AS(qre_from_scalars(R, {Scalar::one(F)}), std::invalid_argument);
    }
}

TEST_CASE("extension data validates its support and shapes") {
    Field F = Field::rationals();
    Rng rng(4601);
    Matrix L = random_matrix(rng, F, 2, 4), Rm = random_matrix(rng, F, 2, 4);

    CHECK_NOTHROW(make_extension_data(int_points(F, {1, 2, 3, 4}), L, Rm));
    CHECK_THROWS_AS(make_extension_data(int_points(F, {1, 2, 3, 0}), L, Rm),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_extension_data(int_points(F, {1, 2, 3, 3}), L, Rm),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_extension_data(int_points(F, {1, 2, 3}), L, Rm), std::invalid_argument);
    // m < r and r < 2 are rejected
    CHECK_THROWS_AS(make_extension_data(int_points(F, {1, 2}), random_matrix(rng, F, 3, 2),
                                        random_matrix(rng, F, 3, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_extension_data(int_points(F, {1, 2}), random_matrix(rng, F, 1, 2),
                                        random_matrix(rng, F, 1, 2)),
                    std::invalid_argument);

    ExtensionData e = random_extension_data(rng, F, 5, 2);
    CHECK(e.m == 5);
    CHECK(e.r == 2);
    CHECK(e.points.size() == 5);
    CHECK_FALSE(e.symbolic);

    // the symbolic variant carries entries in k[s_1..s_m] and stops at m = 3
    std::vector<std::vector<Form>> sl(2, std::vector<Form>(3, Form::zero(F, 3)));
    sl[0][0] = Form::constant(F, 3, Scalar::one(F));
    sl[1][1] = Form::variable(F, 3, 0);
    std::vector<std::vector<Form>> sr = sl;
    sr[0][2] = Form::variable(F, 3, 2);
    ExtensionData es = make_symbolic_extension_data(F, 3, 2, sl, sr);
    CHECK(es.symbolic);
    CHECK(ring_of(es).symbolic);
    std::vector<std::vector<Form>> bad(2, std::vector<Form>(4, Form::zero(F, 4)));
    CHECK_THROWS_AS(make_symbolic_extension_data(F, 4, 2, bad, bad), std::invalid_argument);
    std::vector<std::vector<Form>> wrongnv(2, std::vector<Form>(3, Form::zero(F, 2)));
    CHECK_THROWS_AS(make_symbolic_extension_data(F, 3, 2, wrongnv, wrongnv),
                    std::invalid_argument);
}

TEST_CASE("row shifting matches the printed column formula") {
    Field F = Field::rationals();
    // (z c)_j = c_{j-1} + (-1)^(m-1-j) s_{m-j} c_{m-1}, spelled out with the
    // elementary symmetric values of the support
    for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 5}, {3, 5}, {2, 4}}) {
        Rng rng(9100 + 10 * r + m);
        ExtensionData e = random_extension_data(rng, F, m, r);
        auto [a, rho] = generic_splitting(m, r);
        (void)a;
        QuotientRing R = ring_of(e);
        std::vector<Scalar> s;
        for (const Form& f : R.s) s.push_back(detail::constant_form_value(f));
        Matrix Z(F, e.r, e.m);
        for (int i = 0; i < e.r; ++i)
            for (int j = 0; j < e.m; ++j) {
                Scalar v = j > 0 ? e.left.at(i, j - 1) : Scalar::zero(F);
                Scalar corr = s[m - j - 1] * e.left.at(i, m - 1);
                if ((m - 1 - j) % 2 == 1) corr = -corr;
                Z.at(i, j) = v + corr;
            }
        CHECK(detail::z_shift_rows(R, e.left) == Z);
        // the primed blocks are column ranges of the shifted matrix
        if (rho > 0) {
            Matrix IVp = block_IV_primed(e);
            for (int i = 0; i < rho; ++i)
                for (int j = 0; j < rho; ++j)
                    CHECK(IVp.at(i, j) == Z.at(e.r - rho + i, e.r - rho + j));
            Matrix IIp = block_II_primed(e);
            for (int i = 0; i < rho; ++i)
                for (int j = 0; j < e.r - rho; ++j)
                    CHECK(IIp.at(i, j) == Z.at(e.r - rho + i, j));
        }
    }
}

TEST_CASE("the automorphism action restricts to the block calculus") {
    Field F = Field::rationals();
    Rng rng(4701);
    ExtensionData e = random_extension_data(rng, F, 5, 3);  // a=1, rho=2
    auto [a, rho] = generic_splitting(5, 3);
    (void)a;

    SECTION("the identity fixes the data") {
        AutLElement id = aut_identity(F, 3, rho);
        ExtensionData out = aut_action(id, e);
        CHECK(out.left == e.left);
        CHECK(out.right == e.right);
    }

    SECTION("a diagonal-B element scales the v-blocks and fixes the u-blocks") {
        AutLElement w = aut_identity(F, 3, rho);
        w.B = Matrix::identity(F, rho);
        for (int i = 0; i < rho; ++i) w.B.at(i, i) = Scalar::of_int(F, 3);
        ExtensionData out = aut_action(w, e);
        CHECK(block_I(out) == block_I(e));
        CHECK(block_III(out) == block_III(e));
        CHECK(block_V(out) == block_V(e));
        CHECK(block_IV(out) == w.B * block_IV(e));
        CHECK(block_II(out) == w.B * block_II(e));
        CHECK(block_VI(out) == w.B * block_VI(e));
    }

    SECTION("a general element realizes the block action formulas") {
        AutLElement w = random_aut(rng, F, 3, rho);
        ExtensionData out = aut_action(w, e);
        CHECK(block_I(out) == w.A * block_I(e) + w.H0 * block_II(e) + w.H1 * block_II_primed(e));
        CHECK(block_III(out) ==
              w.A * block_III(e) + w.H0 * block_IV(e) + w.H1 * block_IV_primed(e));
        CHECK(block_V(out) == w.A * block_V(e) + w.H0 * block_VI(e) + w.H1 * block_VI_primed(e));
        CHECK(block_II(out) == w.B * block_II(e));
        CHECK(block_IV(out) == w.B * block_IV(e));
        CHECK(block_VI(out) == w.B * block_VI(e));
    }

    SECTION("composition is a left action") {
        for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 6}, {2, 5}, {3, 5}}) {
            Rng rng2(4710 + 10 * r + m);
            ExtensionData d = random_extension_data(rng2, F, m, r);
            auto [aa, rr] = generic_splitting(m, r);
            (void)aa;
            AutLElement w1 = random_aut(rng2, F, r, rr), w2 = random_aut(rng2, F, r, rr);
            ExtensionData lhs = aut_action(aut_compose(w1, w2), d);
            ExtensionData rhs = aut_action(w1, aut_action(w2, d));
            CHECK(lhs.left == rhs.left);
            CHECK(lhs.right == rhs.right);
        }
    }

    SECTION("the evaluated pairs transform fiberwise by [[A, H0 + x_j H1],[0,B]]") {
        AutLElement w = random_aut(rng, F, 3, rho);
        QuadricBundlePresentation P = build_quadric_bundle(e);
        QuadricBundlePresentation Pw = build_quadric_bundle(aut_action(w, e));
        for (int j = 0; j < e.m; ++j) {
            Matrix W(F, e.r, e.r);
            for (int i = 0; i < e.r - rho; ++i) {
                for (int k = 0; k < e.r - rho; ++k) W.at(i, k) = w.A.at(i, k);
                for (int k = 0; k < rho; ++k)
                    W.at(i, e.r - rho + k) = w.H0.at(i, k) + e.points[j] * w.H1.at(i, k);
            }
            for (int i = 0; i < rho; ++i)
                for (int k = 0; k < rho; ++k)
                    W.at(e.r - rho + i, e.r - rho + k) = w.B.at(i, k);
            CHECK(W * P.eval_left.column(j) == Pw.eval_left.column(j));
            CHECK(W * P.eval_right.column(j) == Pw.eval_right.column(j));
        }
    }

    SECTION("shape and invertibility preconditions") {
        CHECK_THROWS_AS(aut_action(aut_identity(F, 4, 1), e), std::invalid_argument);
        Matrix sing(F, 2, 2);  // the zero matrix is not invertible
        CHECK_THROWS_AS(make_aut(Matrix::identity(F, 1), sing, Matrix(F, 1, 2), Matrix(F, 1, 2)),
                        std::invalid_argument);
        CHECK_THROWS_AS(make_aut(Matrix::identity(F, 1), Matrix::identity(F, 2), Matrix(F, 2, 1),
                                 Matrix(F, 2, 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("the ring action multiplies rows and scales fibers") {
    Field F = Field::rationals();
    Rng rng(4801);
    ExtensionData e = random_extension_data(rng, F, 5, 2);
    QuotientRing R = ring_of(e);

    SECTION("the unit 1 acts as the identity") {
        ExtensionData out = t_action(qre_one(R), e);
        CHECK(out.left == e.left);
        CHECK(out.right == e.right);
    }

    SECTION("non-units are rejected") {
        // z - x_1 annihilates the first CRT factor
        std::vector<Scalar> c(5, Scalar::zero(F));
        c[0] = -e.points[0];
        c[1] = Scalar::one(F);
        CHECK_THROWS_AS(t_action(qre_from_scalars(R, c), e), std::domain_error);
        QuotientRing R2 = quotient_ring(F, int_points(F, {1, 2}));
        CHECK_THROWS_AS(t_action(qre_one(R2), e), std::invalid_argument);  // wrong ring
    }

    SECTION("the action diagonalizes to scaling by t(x_j) on evaluated pairs") {
        std::vector<Scalar> c;
        for (int k = 0; k < 5; ++k) c.push_back(random_scalar(rng, F, -4, 4));
        QuotientRingElement t = qre_from_scalars(R, c);
        if (!qre_invertible(R, t)) t = qre_z(R);
        std::vector<Scalar> tv = qre_values(R, t);
        QuadricBundlePresentation P = build_quadric_bundle(e);
        QuadricBundlePresentation Pt = build_quadric_bundle(t_action(t, e));
        for (int j = 0; j < e.m; ++j)
            for (int i = 0; i < e.r; ++i) {
                CHECK(Pt.eval_left.at(i, j) == tv[j] * P.eval_left.at(i, j));
                CHECK(Pt.eval_right.at(i, j) == tv[j] * P.eval_right.at(i, j));
            }
    }

    SECTION("multiplication is a group action up to m = 6") {
        for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 6}, {2, 4}, {3, 5}}) {
            Rng rng2(4810 + 10 * r + m);
            ExtensionData d = random_extension_data(rng2, F, m, r);
            QuotientRing Rd = ring_of(d);
            auto rand_unit = [&]() {
                for (;;) {
                    std::vector<Scalar> c;
                    for (int k = 0; k < m; ++k) c.push_back(random_scalar(rng2, F, -4, 4));
                    QuotientRingElement t = qre_from_scalars(Rd, c);
                    if (qre_invertible(Rd, t)) return t;
                }
            };
            QuotientRingElement t1 = rand_unit(), t2 = rand_unit();
            ExtensionData lhs = t_action(qre_mul(Rd, t1, t2), d);
            ExtensionData rhs = t_action(t1, t_action(t2, d));
            CHECK(lhs.left == rhs.left);
            CHECK(lhs.right == rhs.right);
        }
    }
}

TEST_CASE("symbolic and numeric computations agree at the support") {
    Field F = Field::rationals();
    Rng rng(4901);
    ExtensionData e = random_extension_data(rng, F, 3, 2);
    std::vector<std::vector<Form>> sl(2), sr(2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) {
            sl[i].push_back(Form::constant(F, 3, e.left.at(i, j)));
            sr[i].push_back(Form::constant(F, 3, e.right.at(i, j)));
        }
    ExtensionData es = make_symbolic_extension_data(F, 3, 2, sl, sr);
    QuotientRing Rs = symbolic_quotient_ring(F, 3);
    QuotientRing Rn = ring_of(e);

    SECTION("the z-action commutes with evaluation") {
        ExtensionData sym = evaluate_at_support(t_action(qre_z(Rs), es), e.points);
        ExtensionData num = t_action(qre_z(Rn), e);
        CHECK(sym.left == num.left);
        CHECK(sym.right == num.right);
    }

    SECTION("a symbolic-coefficient unit commutes with evaluation") {
        // t = z^2 - 2: invertible generically and at the chosen support
        std::vector<Scalar> c{Scalar::of_int(F, -2), Scalar::zero(F), Scalar::one(F)};
        QuotientRingElement ts = qre_from_scalars(Rs, c);
        QuotientRingElement tn = qre_from_scalars(Rn, c);
        REQUIRE(qre_invertible(Rn, tn));
        ExtensionData sym = evaluate_at_support(t_action(ts, es), e.points);
        ExtensionData num = t_action(tn, e);
        CHECK(sym.left == num.left);
        CHECK(sym.right == num.right);
    }

    SECTION("the automorphism action commutes with evaluation") {
        AutLElement w = random_aut(rng, F, 2, 1);  // exercises the symbolic z-shift in H1
        ExtensionData sym = evaluate_at_support(aut_action(w, es), e.points);
        ExtensionData num = aut_action(w, e);
        CHECK(sym.left == num.left);
        CHECK(sym.right == num.right);
    }

    SECTION("the scalar diagonal acts the same way through both groups") {
        Scalar c = Scalar::of_int(F, 4);
        auto [a, rho] = generic_splitting(e.m, e.r);
        (void)a;
        AutLElement w = aut_identity(F, e.r, rho);
        for (size_t i = 0; i < w.A.rows; ++i) w.A.at(i, i) = c;
        for (size_t i = 0; i < w.B.rows; ++i) w.B.at(i, i) = c;
        ExtensionData via_aut = aut_action(w, e);
        ExtensionData via_ring = t_action(qre_constant(Rn, c), e);
        CHECK(via_aut.left == via_ring.left);
        CHECK(via_aut.right == via_ring.right);
        // and both are the plain entrywise scaling
        CHECK(via_aut.left == e.left.scaled(c));
    }

    SECTION("evaluation validates its arguments") {
        CHECK_THROWS_AS(evaluate_at_support(e, e.points), std::invalid_argument);
        CHECK_THROWS_AS(evaluate_at_support(es, int_points(F, {1, 2})), std::invalid_argument);
    }
}

TEST_CASE("slice normalization zeroes the off-diagonal block") {
    Field F = Field::rationals();

    SECTION("a rank-2 charge-5 datum with one jumping summand") {
        Rng rng(9302);
        ExtensionData e = random_extension_data(rng, F, 5, 2);
        auto [w, en] = normalize_u1_slice(e);
        // probed: [III] = -2, [IV'] = 3, so H1 = 2/3
        CHECK(block_III(e).at(0, 0) == Scalar::of_int(F, -2));
        CHECK(block_IV_primed(e).at(0, 0) == Scalar::of_int(F, 3));
        CHECK(w.H1.at(0, 0) == Scalar::of_rat(F, Rat(2, 3)));
        CHECK(w.A == Matrix::identity(F, 1));
        CHECK(w.B == Matrix::identity(F, 1));
        for (const Scalar& s : w.H0.a) CHECK(s.is_zero());
        for (const Scalar& s : block_III(en).a) CHECK(s.is_zero());

        // idempotence: normalizing the result is the identity
        auto [w2, en2] = normalize_u1_slice(en);
        for (const Scalar& s : w2.H1.a) CHECK(s.is_zero());
        CHECK(en2.left == en.left);
        CHECK(en2.right == en.right);

        // the normalizing element depends only on ([III], [IV'])
        ExtensionData mod = e;
        Rng rng2(9399);
        mod.right = random_matrix(rng2, F, 2, 5);
        mod.left.at(0, 0) = random_scalar(rng2, F, -9, 9);  // inside [I]
        mod.left.at(0, 2) = random_scalar(rng2, F, -9, 9);  // inside [V]
        auto [wmod, enmod] = normalize_u1_slice(mod);
        CHECK(wmod.H1 == w.H1);

        // normalization does not move the bundle
        QuadricBundlePresentation P = build_quadric_bundle(e);
        QuadricBundlePresentation Pn = build_quadric_bundle(en);
        for (auto [k1, k2] : twist_battery())
            CHECK(bundle_cohomology(P, k1, k2) == bundle_cohomology(Pn, k1, k2));
    }

    SECTION("a rank-3 charge-5 datum with a 1x2 correction block") {
        Rng rng(9310);
        ExtensionData e = random_extension_data(rng, F, 5, 3);
        auto [w, en] = normalize_u1_slice(e);
        for (const Scalar& s : block_III(en).a) CHECK(s.is_zero());
        auto [w2, en2] = normalize_u1_slice(en);
        for (const Scalar& s : w2.H1.a) CHECK(s.is_zero());
    }

    SECTION("a balanced splitting needs no correction") {
        Rng rng(9320);
        ExtensionData e = random_extension_data(rng, F, 4, 2);  // rho = 0
        auto [w, en] = normalize_u1_slice(e);
        CHECK(en.left == e.left);
        CHECK(en.right == e.right);
        CHECK(w.A == Matrix::identity(F, 2));
    }

    SECTION("the identity-recipe datum gives H1 = -[III]") {
        // with v_0 = 1 and v_{m-1} = 0 the shifted diagonal block is the
        // identity, so the correction is minus the off-diagonal block
        Rng rng(9330);
        ExtensionData e = random_extension_data(rng, F, 5, 2);
        e.left.at(1, 0) = Scalar::one(F);   // v_0
        e.left.at(1, 4) = Scalar::zero(F);  // v_{m-1}
        CHECK(block_IV_primed(e) == Matrix::identity(F, 1));
        auto [w, en] = normalize_u1_slice(e);
        CHECK(w.H1 == -block_III(e));
        for (const Scalar& s : block_III(en).a) CHECK(s.is_zero());
    }

    SECTION("a singular shifted block is flagged as non-generic") {
        Rng rng(9340);
        ExtensionData e = random_extension_data(rng, F, 5, 2);
        e.left.at(1, 0) = Scalar::zero(F);
        e.left.at(1, 4) = Scalar::zero(F);
        CHECK_THROWS_WITH(normalize_u1_slice(e), Catch::Matchers::ContainsSubstring("non-generic"));
        std::vector<std::vector<Form>> sl(2, std::vector<Form>(3, Form::zero(F, 3)));
        std::vector<std::vector<Form>> sr = sl;
        CHECK_THROWS_AS(normalize_u1_slice(make_symbolic_extension_data(F, 3, 2, sl, sr)),
                        std::invalid_argument);
    }
}

TEST_CASE("the presented bundles have the expected cohomology") {
    Field F = Field::rationals();

    SECTION("a rank-2 charge-4 sample") {
        Rng rng(9224);
        ExtensionData e = random_extension_data(rng, F, 4, 2);
        QuadricBundlePresentation P = build_quadric_bundle(e);
        CHECK(P.a == 2);
        CHECK(P.rho == 0);
        CHECK(bundle_cohomology(P, 0, 0) == dims3(0, 2, 0));
        CHECK(bundle_cohomology(P, -2, -2) == dims3(0, 2, 0));
        CHECK(bundle_cohomology(P, -1, 0) == dims3(0, 4, 0));
        CHECK(bundle_cohomology(P, 0, -1) == dims3(0, 4, 0));
        CHECK(bundle_cohomology(P, 1, 1) == dims3(4, 0, 0));
        CHECK(bundle_cohomology(P, -3, -1) == dims3(0, 4, 0));
        CHECK(bundle_cohomology(P, 2, 0) == dims3(2, 0, 0));
        CHECK(v_cohomology(P, 0, 0) == dims3(0, 2, 0));
        CheckReport rr = riemann_roch_check(P);
        CHECK(rr.pass);
        CHECK(rr.computed == "V cohomology [0,2,0], difference 2, chi -2");
        CHECK(rr.expected.find("m - r = 2") != std::string::npos);
    }

    SECTION("section profiles follow the direct image") {
        for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 4}, {2, 5}, {3, 5}, {2, 2}}) {
            Rng rng(9200 + 10 * r + m);
            ExtensionData e = random_extension_data(rng, F, m, r);
            QuadricBundlePresentation P = build_quadric_bundle(e);
            auto [a, rho] = generic_splitting(m, r);
            for (int k = 0; k <= a + 1; ++k) {
                auto vk = v_cohomology(P, k, 0);
                CHECK(vk[0] == predicted_h0(r, a, rho, k));
            }
            // first nonzero section exactly at k = a
            CHECK(v_cohomology(P, a, 0)[0] == static_cast<size_t>(r - rho));
            if (a > 0) CHECK(v_cohomology(P, a - 1, 0)[0] == 0);
            CHECK(riemann_roch_check(P).pass);
        }
    }

    SECTION("the charge equals minus the Euler characteristic shift") {
        for (auto [r, m] :
             std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {2, 5}, {3, 4}, {3, 6}, {4, 5}}) {
            Rng rng(9250 + 10 * r + m);
            QuadricBundlePresentation P = build_quadric_bundle(random_extension_data(rng, F, m, r));
            auto t = v_cohomology(P, 0, 0);
            long chi = static_cast<long>(t[0]) - static_cast<long>(t[1]) + static_cast<long>(t[2]);
            CHECK(chi == r - m);
            CHECK(t[2] == 0);
        }
    }

    SECTION("rows vanishing at a support point are rejected") {
        // rows divisible by (z - x_1) evaluate to the zero pair at j = 1
        std::vector<Scalar> pts = int_points(F, {1, 2, 3, 4});
        Matrix L(F, 2, 4), Rm(F, 2, 4);
        Rng rng(77);
        for (int i = 0; i < 2; ++i) {
            std::vector<Scalar> c{random_scalar(rng, F, -3, 3), random_scalar(rng, F, -3, 3),
                                  random_scalar(rng, F, -3, 3)};
            std::vector<Scalar> d{random_scalar(rng, F, -3, 3), random_scalar(rng, F, -3, 3),
                                  random_scalar(rng, F, -3, 3)};
            // coefficients of (z - 1) * (c0 + c1 z + c2 z^2)
            L.at(i, 0) = -c[0];
            L.at(i, 1) = c[0] - c[1];
            L.at(i, 2) = c[1] - c[2];
            L.at(i, 3) = c[2];
            Rm.at(i, 0) = -d[0];
            Rm.at(i, 1) = d[0] - d[1];
            Rm.at(i, 2) = d[1] - d[2];
            Rm.at(i, 3) = d[2];
        }
        CHECK_THROWS_WITH(build_quadric_bundle(make_extension_data(pts, L, Rm)),
                          Catch::Matchers::ContainsSubstring("support point 1"));
    }

    SECTION("symbolic data cannot be built directly") {
        std::vector<std::vector<Form>> sl(2, std::vector<Form>(3, Form::zero(F, 3)));
        sl[0][0] = Form::constant(F, 3, Scalar::one(F));
        sl[1][1] = Form::constant(F, 3, Scalar::one(F));
        CHECK_THROWS_AS(build_quadric_bundle(make_symbolic_extension_data(F, 3, 2, sl, sl)),
                        std::invalid_argument);
    }
}

TEST_CASE("bundle cohomology agrees with the kernel-presentation complex") {
    Field F = Field::rationals();
    for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 4}, {3, 5}}) {
        Rng rng(9200 + 10 * r + m);
        ExtensionData e = random_extension_data(rng, F, m, r);
        QuadricBundlePresentation P = build_quadric_bundle(e);
        LineBundleComplex C = kernel_presentation_complex(P);
        for (auto [k1, k2] : twist_battery()) {
            auto les = bundle_cohomology(P, k1, k2);
            auto cech = sheaf_cohomology(C, Twist(k1, k2), 0);
            INFO("r=" << r << " m=" << m << " twist (" << k1 << "," << k2 << ")");
            CHECK(les[0] == cech[0]);
            CHECK(les[1] == cech[1]);
            CHECK(les[2] == cech[2]);
        }
    }
}

TEST_CASE("group actions leave the bundle cohomology unchanged") {
    Field F = Field::rationals();
    size_t trials = 0;
    for (auto [r, m] : std::vector<std::pair<int, int>>{{2, 4}, {2, 5}, {3, 5}, {2, 6}, {3, 6}}) {
        Rng rng(5000 + 10 * r + m);
        ExtensionData e = random_extension_data(rng, F, m, r);
        auto [a, rho] = generic_splitting(m, r);
        (void)a;
        AutLElement w = random_aut(rng, F, r, rho);
        QuotientRing R = ring_of(e);
        QuotientRingElement t = [&] {
            for (;;) {
                std::vector<Scalar> c;
                for (int k = 0; k < m; ++k) c.push_back(random_scalar(rng, F, -4, 4));
                QuotientRingElement u = qre_from_scalars(R, c);
                if (qre_invertible(R, u)) return u;
            }
        }();
        QuadricBundlePresentation P = build_quadric_bundle(e);
        QuadricBundlePresentation Pw = build_quadric_bundle(aut_action(w, e));
        QuadricBundlePresentation Pt = build_quadric_bundle(t_action(t, e));
        for (auto [k1, k2] : std::vector<std::pair<int, int>>{{0, 0}, {-2, -2}, {1, 0}, {2, 1}}) {
            INFO("r=" << r << " m=" << m << " twist (" << k1 << "," << k2 << ")");
            auto base = bundle_cohomology(P, k1, k2);
            CHECK(base == bundle_cohomology(Pw, k1, k2));
            CHECK(base == bundle_cohomology(Pt, k1, k2));
        }
        ++trials;
    }
    CHECK(trials == 5);
}
