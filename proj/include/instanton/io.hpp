#pragma once
// File formats: canonical JSON for monads, extension data, and constrained
// quaternionic data; CSV layouts for cohomology tables; file helpers and the
// parse -> serialize -> compare roundtrip used to enforce canonical form.
//
// Serialization is hand-written so that the emitted byte sequence is the
// canonical form: fixed key order, no insignificant whitespace, scalar
// coefficients as exact strings, and a single trailing newline.  Parsing goes
// through a JSON reader that reports byte positions on malformed input.

#include "adhm.hpp"
#include "hirzebruch.hpp"

#include <json.hpp>

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace instanton {

inline constexpr const char* library_version = "1.0.0";

// ---------------------------------------------------------------------------
// file helpers

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("io: short write to '" + path + "'");
}

namespace detail {

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw std::runtime_error(what + ": " + ex.what());
    }
}

inline const nlohmann::json& field_of(const nlohmann::json& j, const char* key,
                                      const std::string& what) {
    auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error(what + ": missing key '" + key + "'");
    return *it;
}

inline std::string scalar_field_tag(const nlohmann::json& j, const std::string& what) {
    const auto& f = field_of(j, "field", what);
    if (!f.is_string()) throw std::runtime_error(what + ": 'field' must be a string");
    return f.get<std::string>();
}

inline Scalar parse_scalar(const nlohmann::json& j, const Field& F, const std::string& what) {
    if (!j.is_string()) throw std::runtime_error(what + ": scalars must be strings");
    try {
        return Scalar::parse(F, j.get<std::string>());
    } catch (const std::exception& ex) {
        throw std::runtime_error(what + ": bad scalar '" + j.get<std::string>() +
                                 "': " + ex.what());
    }
}

inline Matrix parse_scalar_matrix(const nlohmann::json& j, const Field& F, size_t rows,
                                  size_t cols, const std::string& what) {
    if (!j.is_array() || j.size() != rows)
        throw std::runtime_error(what + ": expected " + std::to_string(rows) + " rows");
    Matrix M(F, rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols)
            throw std::runtime_error(what + ": row " + std::to_string(i) + " must have " +
                                     std::to_string(cols) + " entries");
        for (size_t c = 0; c < cols; ++c) M.at(i, c) = parse_scalar(row[c], F, what);
    }
    return M;
}

inline void append_scalar_matrix(std::string& out, const Matrix& M) {
    out += "[";
    for (size_t i = 0; i < M.rows; ++i) {
        if (i) out += ",";
        out += "[";
        for (size_t j = 0; j < M.cols; ++j) {
            if (j) out += ",";
            out += "\"" + M.at(i, j).str() + "\"";
        }
        out += "]";
    }
    out += "]";
}

// a matrix of linear forms on P3 as nested arrays of coefficient 4-vectors
inline void append_linear_formmatrix(std::string& out, const FormMatrix& M) {
    out += "[";
    for (size_t i = 0; i < M.rows; ++i) {
        if (i) out += ",";
        out += "[";
        for (size_t j = 0; j < M.cols; ++j) {
            if (j) out += ",";
            out += "[";
            for (size_t v = 0; v < 4; ++v) {
                if (v) out += ",";
                Expo e{0, 0, 0, 0};
                e[v] = 1;
                out += "\"" + M.at(i, j).coeff(e).str() + "\"";
            }
            out += "]";
        }
        out += "]";
    }
    out += "]";
}

inline FormMatrix parse_linear_formmatrix(const nlohmann::json& j, const Field& F,
                                          size_t rows, size_t cols,
                                          const std::string& what) {
    Space X = Space::p3();
    if (!j.is_array() || j.size() != rows)
        throw std::runtime_error(what + ": expected " + std::to_string(rows) + " rows");
    FormMatrix M(F, X, rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != cols)
            throw std::runtime_error(what + ": row " + std::to_string(i) + " must have " +
                                     std::to_string(cols) + " entries");
        for (size_t c = 0; c < cols; ++c) {
            const auto& entry = row[c];
            if (!entry.is_array() || entry.size() != 4)
                throw std::runtime_error(what + ": each entry must list 4 coefficients");
            Form f = Form::zero(F, X.nvars());
            for (size_t v = 0; v < 4; ++v) {
                Scalar cv = parse_scalar(entry[v], F, what);
                if (!cv.is_zero()) {
                    Expo e{0, 0, 0, 0};
                    e[v] = 1;
                    f.add_term(e, cv);
                }
            }
            M.at(i, c) = f;
        }
    }
    return M;
}

} // namespace detail

// ---------------------------------------------------------------------------
// monad files: {"field":"Q","r":2,"n":2,"epsilon":[[[c0,c1,c2,c3],...]],"q":[...]}

inline std::string monad_to_json(const Monad& m) {
    if (m.space.kind != SpaceKind::P3)
        throw std::invalid_argument("io: monad files carry monads on the ambient P3");
    std::string out = "{\"field\":\"" + m.field().str() + "\",\"r\":" + std::to_string(m.r) +
                      ",\"n\":" + std::to_string(m.n) + ",\"epsilon\":";
    detail::append_linear_formmatrix(out, m.epsilon);
    out += ",\"q\":";
    detail::append_linear_formmatrix(out, m.q);
    out += "}\n";
    return out;
}

inline Monad parse_monad_json(const std::string& text) {
    const std::string what = "monad file";
    nlohmann::json j = detail::parse_json(text, what);
    Field F = Field::parse(detail::scalar_field_tag(j, what));
    const auto& rj = detail::field_of(j, "r", what);
    const auto& nj = detail::field_of(j, "n", what);
    if (!rj.is_number_integer() || !nj.is_number_integer())
        throw std::runtime_error(what + ": r and n must be integers");
    int r = rj.get<int>(), n = nj.get<int>();
    if (r < 2 || n < 1) throw std::runtime_error(what + ": need r >= 2 and n >= 1");
    size_t mid = static_cast<size_t>(r) + 2 * static_cast<size_t>(n);
    FormMatrix eps = detail::parse_linear_formmatrix(detail::field_of(j, "epsilon", what), F,
                                                     mid, static_cast<size_t>(n), what);
    FormMatrix q = detail::parse_linear_formmatrix(detail::field_of(j, "q", what), F,
                                                   static_cast<size_t>(n), mid, what);
    return make_monad(Space::p3(), r, n, std::move(eps), std::move(q));
}

// ---------------------------------------------------------------------------
// extension-data files:
// {"field":"Q","m":5,"r":2,"points":[...],"left":[[...]],"right":[[...]]}

inline std::string extension_to_json(const ExtensionData& e) {
    if (e.symbolic)
        throw std::invalid_argument("io: only numeric extension data serializes to files");
    std::string out = "{\"field\":\"" + e.field.str() + "\",\"m\":" + std::to_string(e.m) +
                      ",\"r\":" + std::to_string(e.r) + ",\"points\":[";
    for (size_t k = 0; k < e.points.size(); ++k) {
        if (k) out += ",";
        out += "\"" + e.points[k].str() + "\"";
    }
    out += "],\"left\":";
    detail::append_scalar_matrix(out, e.left);
    out += ",\"right\":";
    detail::append_scalar_matrix(out, e.right);
    out += "}\n";
    return out;
}

inline ExtensionData parse_extension_json(const std::string& text) {
    const std::string what = "extension file";
    nlohmann::json j = detail::parse_json(text, what);
    Field F = Field::parse(detail::scalar_field_tag(j, what));
    const auto& mj = detail::field_of(j, "m", what);
    const auto& rj = detail::field_of(j, "r", what);
    if (!mj.is_number_integer() || !rj.is_number_integer())
        throw std::runtime_error(what + ": m and r must be integers");
    int m = mj.get<int>(), r = rj.get<int>();
    const auto& pj = detail::field_of(j, "points", what);
    if (!pj.is_array() || pj.size() != static_cast<size_t>(m))
        throw std::runtime_error(what + ": expected " + std::to_string(m) + " points");
    std::vector<Scalar> points;
    for (const auto& pe : pj) points.push_back(detail::parse_scalar(pe, F, what));
    Matrix left = detail::parse_scalar_matrix(detail::field_of(j, "left", what), F,
                                              static_cast<size_t>(r),
                                              static_cast<size_t>(m), what);
    Matrix right = detail::parse_scalar_matrix(detail::field_of(j, "right", what), F,
                                               static_cast<size_t>(r),
                                               static_cast<size_t>(m), what);
    return make_extension_data(points, left, right);
}

// ---------------------------------------------------------------------------
// constrained quaternionic data files (mirrors the monad file layout with
// four coefficient matrices per side):
// {"field":"Qi","r":2,"n":1,"left":[M1,M2,M3,M4],"right":[N1,N2,N3,N4]}

inline std::string adhm_to_json(const ADHMData& d) {
    std::string out = "{\"field\":\"" + d.left[0].field.str() +
                      "\",\"r\":" + std::to_string(d.r) + ",\"n\":" + std::to_string(d.n) +
                      ",\"left\":[";
    for (size_t k = 0; k < 4; ++k) {
        if (k) out += ",";
        detail::append_scalar_matrix(out, d.left[k]);
    }
    out += "],\"right\":[";
    for (size_t k = 0; k < 4; ++k) {
        if (k) out += ",";
        detail::append_scalar_matrix(out, d.right[k]);
    }
    out += "]}\n";
    return out;
}

inline ADHMData parse_adhm_json(const std::string& text) {
    const std::string what = "adhm file";
    nlohmann::json j = detail::parse_json(text, what);
    Field F = Field::parse(detail::scalar_field_tag(j, what));
    const auto& rj = detail::field_of(j, "r", what);
    const auto& nj = detail::field_of(j, "n", what);
    if (!rj.is_number_integer() || !nj.is_number_integer())
        throw std::runtime_error(what + ": r and n must be integers");
    int r = rj.get<int>(), n = nj.get<int>();
    if (r < 2 || n < 1) throw std::runtime_error(what + ": need r >= 2 and n >= 1");
    size_t mid = static_cast<size_t>(r) + 2 * static_cast<size_t>(n);
    const auto& lj = detail::field_of(j, "left", what);
    const auto& qj = detail::field_of(j, "right", what);
    if (!lj.is_array() || lj.size() != 4 || !qj.is_array() || qj.size() != 4)
        throw std::runtime_error(what + ": need four matrices per side");
    ADHMData d;
    d.r = r;
    d.n = n;
    for (size_t k = 0; k < 4; ++k) {
        d.left[k] = detail::parse_scalar_matrix(lj[k], F, mid, static_cast<size_t>(n), what);
        d.right[k] =
            detail::parse_scalar_matrix(qj[k], F, static_cast<size_t>(n), mid, what);
    }
    if (!quaternionic_constraints_hold(d))
        throw std::runtime_error(what + ": an adjoint constraint relation is violated");
    return d;
}

// ---------------------------------------------------------------------------
// cohomology tables
//
// Long form, one row per (degree, twist): "i,k,dim" with a header line.
// Wide form, one row per twist: "k,h0,h1,h2,h3" with no header, so a twist
// range of width w emits exactly w lines.

struct CohomologyRow {
    int i = 0;
    int k = 0;
    size_t dim = 0;
};

struct CohomologyTable {
    std::vector<CohomologyRow> rows;

    std::string csv() const {
        std::string out = "i,k,dim\n";
        for (const auto& r : rows)
            out += std::to_string(r.i) + "," + std::to_string(r.k) + "," +
                   std::to_string(r.dim) + "\n";
        return out;
    }

    std::string json() const {
        std::string out = "{\"rows\":[";
        for (size_t t = 0; t < rows.size(); ++t) {
            if (t) out += ",";
            out += "{\"i\":" + std::to_string(rows[t].i) +
                   ",\"k\":" + std::to_string(rows[t].k) +
                   ",\"dim\":" + std::to_string(rows[t].dim) + "}";
        }
        out += "]}\n";
        return out;
    }
};

inline CohomologyTable monad_cohomology_table(const Monad& m, int klo, int khi) {
    if (klo > khi) throw std::invalid_argument("io: empty twist range");
    CohomologyTable T;
    for (int k = klo; k <= khi; ++k) {
        auto h = monad_cohomology(m, k);
        for (int i = 0; i < 4; ++i)
            T.rows.push_back({i, k, h[static_cast<size_t>(i)]});
    }
    return T;
}

inline std::string cohomology_wide_csv(const Monad& m, int klo, int khi) {
    if (klo > khi) throw std::invalid_argument("io: empty twist range");
    std::string out;
    for (int k = klo; k <= khi; ++k) {
        auto h = monad_cohomology(m, k);
        out += std::to_string(k);
        for (size_t i = 0; i < 4; ++i) out += "," + std::to_string(h[i]);
        out += "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// roundtrip: parse, re-serialize, compare byte-for-byte.  True exactly for
// files already in canonical form; any whitespace or ordering variant fails.

enum class FileKind { Monad, Extension, Adhm };

inline FileKind detect_file_kind(const std::string& text) {
    nlohmann::json j = detail::parse_json(text, "file");
    if (!j.is_object()) throw std::runtime_error("file: top level must be an object");
    if (j.contains("epsilon")) return FileKind::Monad;
    if (j.contains("points")) return FileKind::Extension;
    if (j.contains("left")) return FileKind::Adhm;
    throw std::runtime_error("file: unrecognized layout (no epsilon/points/left key)");
}

inline bool roundtrip_text(const std::string& text) {
    switch (detect_file_kind(text)) {
        case FileKind::Monad: return monad_to_json(parse_monad_json(text)) == text;
        case FileKind::Extension: return extension_to_json(parse_extension_json(text)) == text;
        case FileKind::Adhm: return adhm_to_json(parse_adhm_json(text)) == text;
    }
    return false;
}

inline bool roundtrip_file(const std::string& path) { return roundtrip_text(read_file(path)); }

} // namespace instanton
