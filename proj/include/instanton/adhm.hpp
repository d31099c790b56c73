#pragma once
// Real structure and quaternionic matrix data for instanton monads: the
// antiholomorphic involution of the ambient projective 3-space, twistor
// (real) lines, matrix quadruples subject to the adjoint constraint
// relations, their conversion to monads, a unit-charge sampler, and the
// reality checks (real-line triviality and the restricted plane-pair
// comparison).
//
// Quaternionic arithmetic is always represented in its four-component
// complex form over the gaussian rationals; no quaternion type appears.

#include "checks.hpp"

#include <array>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace instanton {

// ---------------------------------------------------------------------------
// the involution on points and planes
//
// rho sends (z1, z2, z3, z4) to (conj z2, -conj z1, conj z4, -conj z3).  It
// is antilinear with rho^2 = -id, hence an involution on projective points
// without fixed points.

inline std::vector<Scalar> rho_point(const std::vector<Scalar>& z) {
    if (z.size() != 4) throw std::invalid_argument("rho: need a 4-vector");
    const Field& F = z[0].field;
    bool allzero = true;
    for (const auto& c : z) allzero = allzero && c.is_zero();
    if (allzero) throw std::invalid_argument("rho: the zero vector has no image point");
    return {z[1].conj(), Scalar::zero(F) - z[0].conj(), z[3].conj(),
            Scalar::zero(F) - z[2].conj()};
}

// image of the plane {c . z = 0}: a point w lies on the image exactly when
// rho^{-1}(w) = -rho(w) lies on the plane, which conjugates and permutes the
// coefficients to (-conj c2, conj c1, -conj c4, conj c3)
inline std::vector<Scalar> rho_plane(const std::vector<Scalar>& c) {
    if (c.size() != 4) throw std::invalid_argument("rho: need 4 plane coefficients");
    const Field& F = c[0].field;
    bool allzero = true;
    for (const auto& s : c) allzero = allzero && s.is_zero();
    if (allzero) throw std::invalid_argument("rho: the zero plane has no image");
    return {Scalar::zero(F) - c[1].conj(), c[0].conj(), Scalar::zero(F) - c[3].conj(),
            c[2].conj()};
}

// ---------------------------------------------------------------------------
// twistor lines
//
// The line through [z] and [rho(z)].  The two points are never projectively
// equal: rho(z) = c z would force |c|^2 = -1 by applying rho twice.

struct RealLine {
    std::vector<Scalar> z; // the sampled point
    Line line;             // span of z and rho(z)
};

inline RealLine twistor_line(const std::vector<Scalar>& z) {
    std::vector<Scalar> w = rho_point(z);
    const Field& F = z[0].field;
    Matrix span(F, 2, 4);
    for (size_t j = 0; j < 4; ++j) {
        span.at(0, j) = z[j];
        span.at(1, j) = w[j];
    }
    if (span.rank() != 2)
        throw std::logic_error("twistor line: the point and its involute coincide");
    // the parametrized set s z + t rho(z) maps into itself under rho:
    // rho(s z + t rho(z)) = conj(s) rho(z) - conj(t) z.  Asserted at sample
    // parameters rather than assumed.
    const std::array<std::pair<int, int>, 4> params = {{{1, 0}, {0, 1}, {1, 1}, {2, -3}}};
    for (auto [s, t] : params) {
        std::vector<Scalar> p(4, Scalar::zero(F));
        for (size_t j = 0; j < 4; ++j)
            p[j] = Scalar::of_int(F, s) * z[j] + Scalar::of_int(F, t) * w[j];
        std::vector<Scalar> rp = rho_point(p);
        Matrix ext(F, 3, 4);
        for (size_t j = 0; j < 4; ++j) {
            ext.at(0, j) = z[j];
            ext.at(1, j) = w[j];
            ext.at(2, j) = rp[j];
        }
        if (ext.rank() != 2)
            throw std::logic_error("twistor line: a sampled image point left the line");
    }
    return RealLine{z, Line{span}};
}

// ---------------------------------------------------------------------------
// constrained matrix data
//
// Four left matrices of shape (r+2n) x n and four right matrices of shape
// n x (r+2n), tied by the adjoint relations
//   (left1)* = -right2,  (left2)* = right1,
//   (left3)* = -right4,  (left4)* = right3.
// The relations are linear; the quadratic condition q * eps = 0 on the
// induced monad maps is checked separately by the conversion, never implied.

struct ADHMData {
    int n = 0, r = 0;
    std::array<Matrix, 4> left;  // (r+2n) x n
    std::array<Matrix, 4> right; // n x (r+2n)
};

inline bool quaternionic_constraints_hold(const ADHMData& d) {
    return d.left[0].conj_transpose() == -d.right[1] &&
           d.left[1].conj_transpose() == d.right[0] &&
           d.left[2].conj_transpose() == -d.right[3] &&
           d.left[3].conj_transpose() == d.right[2];
}

inline ADHMData impose_quaternionic(const std::array<Matrix, 4>& left) {
    const Field& F = left[0].field;
    size_t rows = left[0].rows, cols = left[0].cols;
    for (const auto& L : left)
        if (L.rows != rows || L.cols != cols || !(L.field == F))
            throw std::invalid_argument(
                "quaternionic data: the four matrices must share shape and field");
    if (cols < 1 || rows < 2 * cols + 2)
        throw std::invalid_argument(
            "quaternionic data: need shape (r+2n) x n with r >= 2 and n >= 1");
    ADHMData d;
    d.n = static_cast<int>(cols);
    d.r = static_cast<int>(rows - 2 * cols);
    d.left = left;
    d.right[0] = left[1].conj_transpose();
    d.right[1] = -(left[0].conj_transpose());
    d.right[2] = left[3].conj_transpose();
    d.right[3] = -(left[2].conj_transpose());
    return d;
}

// the inverse relations: re-derive the left matrices from the right ones
inline std::array<Matrix, 4> recover_left(const std::array<Matrix, 4>& right) {
    return {(-right[1]).conj_transpose(), right[0].conj_transpose(),
            (-right[3]).conj_transpose(), right[2].conj_transpose()};
}

namespace detail {

// the matrix of linear forms sum_v comps[v] z_v
inline FormMatrix coefficient_pencil(const std::array<Matrix, 4>& comps, const Space& X) {
    const Field& F = comps[0].field;
    FormMatrix M(F, X, comps[0].rows, comps[0].cols);
    for (size_t i = 0; i < M.rows; ++i)
        for (size_t j = 0; j < M.cols; ++j) {
            Form f = Form::zero(F, X.nvars());
            for (size_t v = 0; v < 4; ++v)
                if (!comps[v].at(i, j).is_zero()) {
                    Expo e{0, 0, 0, 0};
                    e[v] = 1;
                    f.add_term(e, comps[v].at(i, j));
                }
            M.at(i, j) = f;
        }
    return M;
}

} // namespace detail

// ---------------------------------------------------------------------------
// conversion to a monad

struct ADHMConversion {
    std::optional<Monad> monad; // set only when every item passes
    ValidationReport report;
    bool accepted = false;
};

// eps = sum_j left_j z_j and q = sum_j right_j z_j.  The report itemizes the
// constraint relations, the quadratic condition q * eps = 0 (exact), the
// surjectivity of the stacked evaluation [left(z)* ; right(z)] at sampled
// points, and the full monad validation.  Only fully valid data yields an
// accepted monad.
inline ADHMConversion adhm_to_monad(const ADHMData& d, size_t trials = 24,
                                    uint64_t seed = 0x7265616Cull) {
    Space X = Space::p3();
    const Field& F = d.left[0].field;
    ADHMConversion out;
    bool cons = quaternionic_constraints_hold(d);
    out.report.items.push_back({"quaternionic-constraints", cons,
                                cons ? "the four adjoint relations hold exactly"
                                     : "an adjoint relation is violated"});
    FormMatrix eps = detail::coefficient_pencil(d.left, X);
    FormMatrix q = detail::coefficient_pencil(d.right, X);
    bool complex_ok = (q * eps).is_zero();
    out.report.items.push_back({"complex-condition", complex_ok,
                                complex_ok ? "q*eps vanishes identically"
                                           : "q*eps has a nonzero entry"});
    // stacked evaluation surjectivity: rank [left(z)* ; right(z)] = 2n at the
    // coordinate points and at seeded random points (probabilistic)
    Rng rng(seed);
    size_t mid = static_cast<size_t>(d.r) + 2 * static_cast<size_t>(d.n);
    size_t nn = static_cast<size_t>(d.n);
    bool il_ok = true;
    std::string il_detail = "rank 2n at all sampled points";
    for (size_t t = 0; t < trials && il_ok; ++t) {
        std::vector<Scalar> z(4, Scalar::zero(F));
        if (t < 4) {
            z[t] = Scalar::one(F);
        } else {
            bool nz = false;
            for (auto& c : z) {
                c = random_scalar(rng, F, -5, 5);
                nz = nz || !c.is_zero();
            }
            if (!nz) z[0] = Scalar::one(F);
        }
        Matrix Lz(F, mid, nn), Rz(F, nn, mid);
        for (size_t v = 0; v < 4; ++v) {
            for (size_t i = 0; i < mid; ++i)
                for (size_t j = 0; j < nn; ++j)
                    Lz.at(i, j) = Lz.at(i, j) + d.left[v].at(i, j) * z[v];
            for (size_t i = 0; i < nn; ++i)
                for (size_t j = 0; j < mid; ++j)
                    Rz.at(i, j) = Rz.at(i, j) + d.right[v].at(i, j) * z[v];
        }
        if (Matrix::vstack(Lz.conj_transpose(), Rz).rank() != 2 * nn) {
            il_ok = false;
            std::ostringstream os;
            os << "rank drop at z = (";
            for (size_t j = 0; j < 4; ++j) os << (j ? "," : "") << z[j].str();
            os << ")";
            il_detail = os.str();
        }
    }
    out.report.items.push_back({"evaluation-surjectivity", il_ok, il_detail});
    out.report.probabilistic = true;
    if (cons && complex_ok && il_ok) {
        Monad m = make_monad(X, d.r, d.n, std::move(eps), std::move(q));
        ValidationReport vr = validate(m, 32, seed ^ 0x5eedull);
        for (const auto& it : vr.items) out.report.items.push_back(it);
        if (vr.ok()) {
            out.monad = std::move(m);
            out.accepted = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// the unit-charge sampler
//
// The antilinear map J pairs coordinates as J(w)_{2k} = conj w_{2k+1},
// J(w)_{2k+1} = -conj w_{2k}, so J^2 = -id and (J x)* y is an alternating
// bilinear pairing of x and y.  Drawing the first and third left columns
// freely and completing the second and fourth as their J-partners makes
// every scalar relation of the n = 1 quadratic system cancel identically:
// the diagonal relations are values of the alternating pairing on equal
// arguments, and the mixed ones pair up with opposite signs.  A draw only
// fails when some evaluation degenerates, and is then simply redrawn.

inline std::vector<Scalar> j_conjugate(const std::vector<Scalar>& w) {
    if (w.empty() || w.size() % 2 != 0)
        throw std::invalid_argument("j: need a nonempty even-length vector");
    const Field& F = w[0].field;
    std::vector<Scalar> out(w.size(), Scalar::zero(F));
    for (size_t k = 0; k + 1 < w.size(); k += 2) {
        out[k] = w[k + 1].conj();
        out[k + 1] = Scalar::zero(F) - w[k].conj();
    }
    return out;
}

inline ADHMData sample_unit_charge(Rng& rng, int r = 2) {
    if (r < 2 || r % 2 != 0)
        throw std::invalid_argument("unit charge sampler: the rank must be even and >= 2");
    Field F = Field::gaussian();
    size_t mid = static_cast<size_t>(r) + 2;
    auto column = [&](const std::vector<Scalar>& w) {
        Matrix M(F, mid, 1);
        for (size_t i = 0; i < mid; ++i) M.at(i, 0) = w[i];
        return M;
    };
    std::vector<Scalar> w1(mid), w3(mid);
    for (auto& c : w1) c = random_scalar(rng, F, -4, 4);
    for (auto& c : w3) c = random_scalar(rng, F, -4, 4);
    return impose_quaternionic(
        {column(w1), column(j_conjugate(w1)), column(w3), column(j_conjugate(w3))});
}

struct SolvedCharge {
    ADHMData data;
    Monad monad;
    ValidationReport report;
    size_t attempts = 0; // draws consumed, including the accepted one
};

inline SolvedCharge solve_unit_charge(uint64_t seed, int r = 2, size_t max_attempts = 64) {
    Rng rng(seed);
    for (size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        ADHMData d = sample_unit_charge(rng, r);
        ADHMConversion conv = adhm_to_monad(d, 24, seed + attempt);
        if (conv.accepted)
            return SolvedCharge{std::move(d), std::move(*conv.monad), std::move(conv.report),
                                attempt};
    }
    throw std::runtime_error("unit charge sampler: no valid draw within the attempt budget");
}

// ---------------------------------------------------------------------------
// pullback along the involution
//
// The pullback of the bundle along rho, conjugated back to a holomorphic
// bundle and dualized: substitute the variables by the C-linear part of rho,
// conjugate every coefficient, and dualize the monad.  The result presents
// the image of the bundle under the natural real-structure action.

inline Monad rho_pullback(const Monad& m) {
    if (m.field().tag != FieldTag::Qi)
        throw std::invalid_argument(
            "rho pullback: the monad must live over the gaussian rationals");
    if (m.space.kind != SpaceKind::P3)
        throw std::invalid_argument("rho pullback: the involution acts on the ambient P3");
    const Field& F = m.field();
    const Space& X = m.space;
    auto var = [&](size_t v, int sign) {
        Form f = Form::zero(F, X.nvars());
        Expo e{0, 0, 0, 0};
        e[v] = 1;
        f.add_term(e, sign > 0 ? Scalar::one(F) : Scalar::zero(F) - Scalar::one(F));
        return f;
    };
    std::vector<Form> images = {var(1, +1), var(0, -1), var(3, +1), var(2, -1)};
    auto push = [&](const FormMatrix& M) {
        FormMatrix out = M.substitute(images, X);
        for (auto& f : out.a) f = f.conj();
        return out;
    };
    Monad s;
    s.space = X;
    s.r = m.r;
    s.n = m.n;
    s.epsilon = push(m.epsilon);
    s.q = push(m.q);
    s.validated = m.validated;
    return dualize(s);
}

// embed a monad over the rationals into the gaussian rationals
inline Monad lift_to_gaussian(const Monad& m) {
    if (m.field().tag == FieldTag::Qi) return m;
    if (m.field().tag != FieldTag::Q)
        throw std::invalid_argument("lift: only the rationals embed into the gaussian field");
    Field G = Field::gaussian();
    auto lift_form = [&](const Form& f) {
        Form out = Form::zero(G, f.nvars);
        for (const auto& [e, c] : f.terms) {
            Scalar s = Scalar::zero(G);
            s.re = c.re;
            out.add_term(e, s);
        }
        return out;
    };
    Monad out;
    out.space = m.space;
    out.r = m.r;
    out.n = m.n;
    out.epsilon = FormMatrix(G, m.space, m.epsilon.rows, m.epsilon.cols);
    out.q = FormMatrix(G, m.space, m.q.rows, m.q.cols);
    for (size_t i = 0; i < m.epsilon.rows; ++i)
        for (size_t j = 0; j < m.epsilon.cols; ++j)
            out.epsilon.at(i, j) = lift_form(m.epsilon.at(i, j));
    for (size_t i = 0; i < m.q.rows; ++i)
        for (size_t j = 0; j < m.q.cols; ++j) out.q.at(i, j) = lift_form(m.q.at(i, j));
    out.validated = m.validated;
    return out;
}

// ---------------------------------------------------------------------------
// reality checks

// splitting type along sampled twistor lines; the bundle of a physical
// (quaternionic) instanton restricts trivially to every such line
inline CheckReport check_real_line_trivial(const Monad& m, size_t trials = 20,
                                           uint64_t seed = 0x7477'6c69'6e65ull) {
    if (m.space.kind != SpaceKind::P3)
        throw std::invalid_argument("real lines: the monad must live on P3");
    detail::Stopwatch sw;
    CheckReport rep;
    rep.name = "real_line_trivial";
    rep.inputs = detail::monad_digest(m) + ", trials = " + std::to_string(trials) +
                 ", seed = " + std::to_string(seed);
    rep.expected = "splitting type all-zero on every sampled twistor line";
    const Field& F = m.field();
    Rng rng(seed);
    size_t trivial = 0;
    for (size_t t = 0; t < trials; ++t) {
        std::vector<Scalar> z(4, Scalar::zero(F));
        bool nz = false;
        for (auto& c : z) {
            c = random_scalar(rng, F, -5, 5);
            nz = nz || !c.is_zero();
        }
        if (!nz) z[0] = Scalar::one(F);
        RealLine L = twistor_line(z);
        std::ostringstream zs;
        zs << "(";
        for (size_t j = 0; j < 4; ++j) zs << (j ? "," : "") << z[j].str();
        zs << ")";
        try {
            SplittingType st = splitting_type(m, L.line);
            if (st.trivial())
                ++trivial;
            else
                rep.notes.push_back("jumping twistor line through z = " + zs.str() +
                                    " with splitting " + st.str());
        } catch (const std::exception& ex) {
            rep.notes.push_back("unsettled splitting on the twistor line through z = " +
                                zs.str() + ": " + ex.what());
        }
    }
    rep.computed = std::to_string(trivial) + " of " + std::to_string(trials) +
                   " sampled twistor lines split trivially";
    rep.pass = (trivial == trials);
    rep.seconds = sw.stop();
    return rep;
}

// the restricted pair comparison: with D the image plane rho(H), the bundle
// pulled back along rho restricts to H as the transport of the original
// bundle's restriction to D, so reality of the bundle makes the two
// restrictions to H isomorphic as monads.
inline CheckReport check_atiyah_pair(const Monad& m, const std::vector<Scalar>& H,
                                     uint64_t seed = 0x70616972ull) {
    detail::Stopwatch sw;
    CheckReport rep;
    rep.name = "atiyah_pair";
    std::vector<Scalar> D = rho_plane(H);
    auto plane_str = [](const std::vector<Scalar>& c) {
        std::ostringstream os;
        os << "{";
        for (size_t j = 0; j < 4; ++j) os << (j ? "," : "") << c[j].str();
        os << "}";
        return os.str();
    };
    rep.inputs = detail::monad_digest(m) + ", H = " + plane_str(H);
    rep.expected =
        "restriction of the involution pullback to H isomorphic to the restriction of the "
        "monad to H";
    rep.notes.push_back("paired plane D = rho(H) = " + plane_str(D));
    Monad p = rho_pullback(m);
    Monad mH = restrict_hyperplane(m, H);
    Monad pH = restrict_hyperplane(p, H);
    auto iso = monad_isomorphic(mH, pH, seed, 24);
    rep.computed = iso.has_value() ? "intertwiner found on the common plane"
                                   : "no intertwiner on the common plane";
    rep.pass = iso.has_value();
    rep.seconds = sw.stop();
    return rep;
}

} // namespace instanton
