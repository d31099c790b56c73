#include <catch2/catch_amalgamated.hpp>

#include <instanton/monad.hpp>

using namespace instanton;

namespace {

// linear form from four integer coefficients
Form lin4(const Field& f, int c0, int c1, int c2, int c3) {
    return Form::linear(f, {Scalar::of_int(f, c0), Scalar::of_int(f, c1),
                            Scalar::of_int(f, c2), Scalar::of_int(f, c3)});
}

// the rank-2, charge-1 reference monad: eps = (z2, -z1, z4, -z3)^T,
// q = (z1, z2, z3, z4); the middle pairing is the standard symplectic form
Monad reference_monad() {
    Field f = Field::rationals();
    Space X = Space::p3();
    FormMatrix eps(f, X, 4, 1), q(f, X, 1, 4);
    eps.at(0, 0) = lin4(f, 0, 1, 0, 0);
    eps.at(1, 0) = lin4(f, -1, 0, 0, 0);
    eps.at(2, 0) = lin4(f, 0, 0, 0, 1);
    eps.at(3, 0) = lin4(f, 0, 0, -1, 0);
    q.at(0, 0) = lin4(f, 1, 0, 0, 0);
    q.at(0, 1) = lin4(f, 0, 1, 0, 0);
    q.at(0, 2) = lin4(f, 0, 0, 1, 0);
    q.at(0, 3) = lin4(f, 0, 0, 0, 1);
    return make_monad(X, 2, 1, eps, q);
}

Line coordinate_line(const Field& f, int i, int j) {
    Matrix span(f, 2, 4);
    span.at(0, static_cast<size_t>(i)) = Scalar::one(f);
    span.at(1, static_cast<size_t>(j)) = Scalar::one(f);
    return Line{span};
}

std::array<size_t, 4> cech_bundle_dims(const Monad& m, int k) {
    auto v = sheaf_cohomology(monad_complex(m), monad_twist(m.space, k), 1);
    std::array<size_t, 4> out{0, 0, 0, 0};
    for (size_t i = 0; i < v.size() && i < 4; ++i) out[i] = v[i];
    return out;
}

} // namespace

TEST_CASE("reference monad validates and has the expected twist table") {
    Monad m = reference_monad();
    ValidationReport rep = validate(m);
    INFO(rep.summary());
    REQUIRE(rep.ok());
    REQUIRE(rep.probabilistic);
    REQUIRE(rep.items.size() == 4);
    REQUIRE(m.validated);

    auto h_m1 = monad_cohomology(m, -1);
    CHECK(h_m1 == std::array<size_t, 4>{0, 1, 0, 0});
    auto h_m2 = monad_cohomology(m, -2);
    CHECK(h_m2 == std::array<size_t, 4>{0, 0, 0, 0});
    auto h_m3 = monad_cohomology(m, -3);
    CHECK(h_m3 == std::array<size_t, 4>{0, 0, 1, 0});
    auto h_0 = monad_cohomology(m, 0);
    CHECK(h_0[0] == 0); // no global sections: the bundle is stable
    CHECK(h_0[1] == 0); // 2n - r = 0 for (2, 1)
}

TEST_CASE("monad construction rejects malformed input") {
    Field f = Field::rationals();
    Space X = Space::p3();
    Monad m = reference_monad();

    SECTION("shape mismatch") {
        FormMatrix eps(f, X, 4, 1), q(f, X, 1, 3);
        REQUIRE_THROWS_AS(make_monad(X, 2, 1, eps, q), std::invalid_argument);
    }
    SECTION("rank bounds") {
        REQUIRE_THROWS_AS(make_monad(X, 1, 1, FormMatrix(f, X, 3, 1), FormMatrix(f, X, 1, 3)),
                          std::invalid_argument);
    }
    SECTION("nonlinear entries") {
        FormMatrix eps(f, X, 4, 1), q(f, X, 1, 4);
        Form quad = lin4(f, 1, 0, 0, 0) * lin4(f, 0, 1, 0, 0);
        for (size_t i = 0; i < 4; ++i) {
            eps.at(i, 0) = quad;
            q.at(0, i) = quad;
        }
        REQUIRE_THROWS_AS(make_monad(X, 2, 1, eps, q), std::invalid_argument);
    }
    SECTION("cohomology requires validation") {
        REQUIRE_THROWS_AS(monad_cohomology(m, 0), std::invalid_argument);
    }
    SECTION("validation itemizes a broken complex instead of throwing") {
        FormMatrix eps(f, X, 4, 1), q(f, X, 1, 4);
        for (size_t i = 0; i < 4; ++i) {
            eps.at(i, 0) = lin4(f, 1, 1, 0, 0);
            q.at(0, i) = lin4(f, 0, 0, 1, static_cast<int>(i));
        }
        Monad bad = make_monad(X, 2, 1, eps, q);
        ValidationReport rep = validate(bad);
        REQUIRE_FALSE(rep.ok());
        REQUIRE_FALSE(bad.validated);
        CHECK_FALSE(rep.items[0].passed); // the complex condition fails
    }
}

TEST_CASE("sampled monads satisfy the twist dimension table") {
    for (auto [r, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 3}, {3, 4}}) {
        DYNAMIC_SECTION("r=" << r << " n=" << n) {
            Monad m = sample_instanton(r, n, 9000 + static_cast<uint64_t>(100 * r + n));
            REQUIRE(m.validated);
            auto h_m1 = monad_cohomology(m, -1);
            CHECK(h_m1[0] == 0);
            CHECK(h_m1[1] == static_cast<size_t>(n));
            CHECK(h_m1[2] == 0);
            CHECK(h_m1[3] == 0);
            auto h_m2 = monad_cohomology(m, -2);
            CHECK(h_m2[1] == 0);
            CHECK(h_m2[2] == 0);
            auto h_m3 = monad_cohomology(m, -3);
            CHECK(h_m3[2] == static_cast<size_t>(n));
            auto h_0 = monad_cohomology(m, 0);
            CHECK(h_0[0] == 0);
            CHECK(h_0[1] == static_cast<size_t>(2 * n - r));
        }
    }
}

TEST_CASE("sampling is deterministic in the seed") {
    Monad a = sample_instanton(2, 2, 31337);
    Monad b = sample_instanton(2, 2, 31337);
    CHECK(a.epsilon == b.epsilon);
    CHECK(a.q == b.q);
    Monad c = sample_instanton(2, 2, 31338);
    CHECK_FALSE(a.epsilon == c.epsilon);
}

TEST_CASE("sampling rejects ranks outside the supported range") {
    CHECK_THROWS_AS(sample_instanton(1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instanton(3, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_instanton(2, 0, 1), std::invalid_argument);
}

TEST_CASE("display chase agrees with the Cech engine across twists") {
    Monad m = sample_instanton(2, 2, 555);
    for (int k = -4; k <= 2; ++k) {
        auto disp = monad_cohomology(m, k);
        auto cech = cech_bundle_dims(m, k);
        INFO("twist " << k);
        CHECK(disp == cech);
    }
}

TEST_CASE("dualizing is an involution and satisfies top-degree duality") {
    Monad m = sample_instanton(2, 2, 777);
    Monad d = dualize(m);
    Monad dd = dualize(d);
    CHECK(dd.epsilon == m.epsilon);
    CHECK(dd.q == m.q);

    // the dual of the realizing complex is the realizing complex of the dual
    LineBundleComplex C1 = lbc_dual(monad_complex(m));
    LineBundleComplex C2 = monad_complex(d);
    REQUIRE(C1.terms == C2.terms);
    REQUIRE(C1.maps.size() == C2.maps.size());
    for (size_t i = 0; i < C1.maps.size(); ++i) CHECK(C1.maps[i] == C2.maps[i]);

    // h^i of the bundle at twist k matches h^(3-i) of the dual at -4-k
    for (int k : {-3, -2, -1, 0, 1}) {
        auto hm = monad_cohomology(m, k);
        auto hd = monad_cohomology(d, -4 - k);
        INFO("twist " << k);
        for (int i = 0; i <= 3; ++i)
            CHECK(hm[static_cast<size_t>(i)] == hd[static_cast<size_t>(3 - i)]);
    }
}

TEST_CASE("direct sums validate and add cohomology") {
    Monad a = sample_instanton(2, 1, 11);
    Monad b = sample_instanton(2, 2, 22);
    Monad s = direct_sum(a, b);
    REQUIRE(s.r == 4);
    REQUIRE(s.n == 3);
    REQUIRE(s.validated);
    for (int k : {-3, -2, -1, 0, 1}) {
        auto ha = monad_cohomology(a, k);
        auto hb = monad_cohomology(b, k);
        auto hs = monad_cohomology(s, k);
        INFO("twist " << k);
        for (size_t i = 0; i < 4; ++i) CHECK(hs[i] == ha[i] + hb[i]);
    }
}

TEST_CASE("tensor totals have the expected shape and charge behavior") {
    Monad a = sample_instanton(2, 1, 101);
    Monad b = sample_instanton(2, 1, 202);
    LineBundleComplex T = tensor_complex(a, b);
    REQUIRE(T.terms.size() == 5);
    CHECK(T.terms[0].size() == 1);
    CHECK(T.terms[1].size() == 8);
    CHECK(T.terms[2].size() == 18);
    CHECK(T.terms[3].size() == 8);
    CHECK(T.terms[4].size() == 1);
    CHECK(T.terms[0][0] == Twist(-2));
    CHECK(T.terms[4][0] == Twist(2));

    // tensoring against a one-term unit complex changes nothing
    LineBundleComplex unit;
    unit.field = a.field();
    unit.space = a.space;
    unit.terms = {{Twist(0)}};
    LineBundleComplex Ua = lbc_tensor(unit, monad_complex(a));
    auto du = cech_hypercohomology(Ua);
    auto da = cech_hypercohomology(monad_complex(a));
    CHECK(du == da);

    // second cohomology of the product bundle at twist -1 counts both charges
    auto t1 = sheaf_cohomology(T, Twist(-1), 2);
    CHECK(t1[1] == static_cast<size_t>(a.r * b.n + b.r * a.n));
    auto t2 = sheaf_cohomology(T, Twist(-2), 2);
    CHECK(t2[1] == 0);
    CHECK(t2[2] == 0);
}

TEST_CASE("endomorphism cohomology certifies simplicity and the deformation count") {
    for (auto [r, n] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}}) {
        DYNAMIC_SECTION("r=" << r << " n=" << n) {
            Monad m = sample_instanton(r, n, 404 + static_cast<uint64_t>(n));
            auto h = sheaf_cohomology(end_complex(m), Twist(0), 2);
            CHECK(h[0] == 1);
            CHECK(h[1] == static_cast<size_t>(4 * r * n - r * r + 1));
            CHECK(h[2] == 0);
            CHECK(h[3] == 0);
        }
    }
    // a sum of two non-isomorphic bundles has a two-dimensional endomorphism
    // space: one identity per summand
    Monad a = sample_instanton(2, 1, 881);
    Monad b = sample_instanton(2, 1, 882);
    Monad s = direct_sum(a, b);
    auto h = sheaf_cohomology(end_complex(s), Twist(0), 2);
    CHECK(h[0] == 2);
}

TEST_CASE("hyperplane restriction produces a validated surface monad") {
    Monad m = sample_instanton(2, 2, 616);
    Field f = m.field();
    std::vector<Scalar> plane = {Scalar::zero(f), Scalar::zero(f), Scalar::zero(f),
                                 Scalar::one(f)};
    HyperplaneRestriction hr = restrict_hyperplane_full(m, plane);
    INFO(hr.report.summary());
    REQUIRE(hr.report.ok());
    REQUIRE(hr.monad.space.kind == SpaceKind::P2);
    REQUIRE(hr.monad.validated);

    // the extremal dimensions survive restriction one twist longer
    auto h_m1 = monad_cohomology(hr.monad, -1);
    CHECK(h_m1[1] == static_cast<size_t>(m.n));
    auto h_m2 = monad_cohomology(hr.monad, -2);
    CHECK(h_m2[1] == static_cast<size_t>(m.n));

    // display chase and Cech engine agree on the surface as well
    for (int k = -3; k <= 1; ++k) {
        auto disp = monad_cohomology(hr.monad, k);
        auto cech = cech_bundle_dims(hr.monad, k);
        INFO("twist " << k);
        CHECK(disp == cech);
    }

    SECTION("a general plane works too") {
        std::vector<Scalar> p2 = {Scalar::of_int(f, 1), Scalar::of_int(f, -2),
                                  Scalar::of_int(f, 3), Scalar::of_int(f, 1)};
        HyperplaneRestriction hg = restrict_hyperplane_full(m, p2);
        INFO(hg.report.summary());
        REQUIRE(hg.report.ok());
        auto h = monad_cohomology(hg.monad, -1);
        CHECK(h[1] == static_cast<size_t>(m.n));
    }
    SECTION("the zero plane is rejected") {
        std::vector<Scalar> z(4, Scalar::zero(f));
        REQUIRE_THROWS_AS(restrict_hyperplane(m, z), std::invalid_argument);
    }
}

TEST_CASE("quadric restriction keeps the monad shape on the product ruling") {
    Monad m = sample_instanton(2, 1, 272);
    Monad mq = restrict_quadric(m);
    REQUIRE(mq.space.kind == SpaceKind::Quadric);
    auto C = monad_complex(mq);
    CHECK(C.terms[0][0] == Twist(-1, -1));
    CHECK(C.terms[1][0] == Twist(0, 0));
    CHECK(C.terms[2][0] == Twist(1, 1));
    ValidationReport rep = validate(mq, 24, 99);
    INFO(rep.summary());
    REQUIRE(rep.ok());
    // the engine accepts the diagonal-twist complex on the surface
    auto h = sheaf_cohomology(monad_complex(mq), Twist(0, 0), 1);
    CHECK(h[0] == 0); // restriction of a stable bundle stays sectionless here
}

TEST_CASE("splitting along lines detects the jumping locus of the reference monad") {
    Monad m = reference_monad();
    Field f = m.field();

    // the defining pairing vanishes on span(e0, e2), so the restriction
    // splits with a degree jump there; span(e0, e1) pairs to 1 and stays
    // trivial
    SplittingType jump = splitting_type(m, coordinate_line(f, 0, 2));
    CHECK(jump.degrees == std::vector<int>{-1, 1});
    CHECK(jump.sum() == 0);
    CHECK_FALSE(jump.trivial());

    SplittingType flat = splitting_type(m, coordinate_line(f, 0, 1));
    CHECK(flat.degrees == std::vector<int>{0, 0});
    CHECK(flat.trivial());

    // every splitting sums to zero: first summand degree balances the rest
    Rng rng(2024);
    Monad big = sample_instanton(2, 2, 121);
    size_t nontrivial = 0;
    for (int t = 0; t < 12; ++t) {
        Line L = random_line(rng, f);
        SplittingType st = splitting_type(big, L);
        CHECK(st.sum() == 0);
        CHECK(st.degrees.size() == 2);
        if (!st.trivial()) ++nontrivial;
    }
    CHECK(nontrivial <= 2); // jumping lines are rare on random draws

    auto L = find_trivializing_line(big, 50, 4242);
    REQUIRE(L.has_value());
    CHECK(splitting_type(big, *L).trivial());
}

TEST_CASE("framing succeeds exactly on trivializing lines") {
    Monad m = reference_monad();
    Field f = m.field();
    Frame fr = frame_along_line(m, coordinate_line(f, 0, 1));
    CHECK(fr.sections.rows == 4);
    CHECK(fr.sections.cols == 2);
    CHECK(fr.sections.rank() == 2);
    CHECK(fr.basis == Matrix::identity(f, 2));
    REQUIRE_THROWS_AS(frame_along_line(m, coordinate_line(f, 0, 2)), std::domain_error);
}

TEST_CASE("isomorphism testing recovers orbit points and separates strangers") {
    Monad m = sample_instanton(2, 2, 333);
    const Field& f = m.field();

    SECTION("a monad is isomorphic to itself via the identity") {
        auto iso = monad_isomorphic(m, m);
        REQUIRE(iso.has_value());
        CHECK(iso->gC == Matrix::identity(f, m.middle()));
    }

    SECTION("conjugated monads are recognized") {
        Rng rng(5150);
        for (int trial = 0; trial < 3; ++trial) {
            Matrix gV, gC, gW;
            do { gV = random_matrix(rng, f, 2, 2, -3, 3); } while (!gV.is_invertible());
            do { gC = random_matrix(rng, f, 6, 6, -2, 2); } while (!gC.is_invertible());
            do { gW = random_matrix(rng, f, 2, 2, -3, 3); } while (!gW.is_invertible());
            Monad other = m;
            other.epsilon = gC * m.epsilon * gV.inverse();
            other.q = gW * m.q * gC.inverse();
            auto iso = monad_isomorphic(m, other, 1000 + static_cast<uint64_t>(trial));
            REQUIRE(iso.has_value());
            // returned matrices intertwine the two monads exactly
            FormMatrix lhs = lift_constant(iso->gC, m.space) * m.epsilon;
            FormMatrix rhs = other.epsilon * lift_constant(iso->gV, m.space);
            CHECK((lhs + (-rhs)).is_zero());
        }
    }

    SECTION("independent samples are not isomorphic") {
        Monad other = sample_instanton(2, 2, 999);
        CHECK_FALSE(monad_isomorphic(m, other).has_value());
        Monad small = sample_instanton(2, 1, 999);
        CHECK_FALSE(monad_isomorphic(m, small).has_value());
    }
}

TEST_CASE("line restriction validates shape and rejects degenerate spans") {
    Monad m = reference_monad();
    Field f = m.field();
    Matrix bad(f, 2, 4);
    bad.at(0, 0) = Scalar::one(f);
    bad.at(1, 0) = Scalar::of_int(f, 2); // rank 1
    REQUIRE_THROWS_AS(restrict_line(m, Line{bad}), std::invalid_argument);

    Monad mL = restrict_line(m, coordinate_line(f, 0, 1));
    REQUIRE(mL.space.kind == SpaceKind::P1);
    auto h = sheaf_cohomology(monad_complex(mL), Twist(0), 1);
    CHECK(h[0] == 2); // rank many sections on a trivializing line
}
