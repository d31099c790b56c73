#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "scalar.hpp"

namespace instanton {

// Exponent vector of a monomial in up to four variables; unused slots stay 0.
using Expo = std::array<int16_t, 4>;

inline Expo expo_add(const Expo& a, const Expo& b) {
    Expo c{};
    for (int i = 0; i < 4; ++i) c[i] = static_cast<int16_t>(a[i] + b[i]);
    return c;
}

// A polynomial in nvars variables with exact coefficients. Terms with zero
// coefficient are never stored, so equality is structural.
struct Form {
    Field field;
    int nvars = 0;
    std::map<Expo, Scalar> terms;

    Form() : field(Field::rationals()) {}
    Form(const Field& f, int nv) : field(f), nvars(nv) {}

    static Form zero(const Field& f, int nv) { return Form(f, nv); }
    static Form constant(const Field& f, int nv, const Scalar& c) {
        Form p(f, nv);
        if (!c.is_zero()) p.terms[Expo{}] = c;
        return p;
    }
    static Form variable(const Field& f, int nv, int v, int power = 1) {
        if (v < 0 || v >= nv) throw std::out_of_range("form: variable index");
        Form p(f, nv);
        Expo e{};
        e[v] = static_cast<int16_t>(power);
        p.terms[e] = Scalar::one(f);
        return p;
    }
    // linear form c0*x0 + ... from a coefficient list
    static Form linear(const Field& f, const std::vector<Scalar>& coeffs) {
        Form p(f, static_cast<int>(coeffs.size()));
        for (size_t v = 0; v < coeffs.size(); ++v) {
            if (coeffs[v].is_zero()) continue;
            Expo e{};
            e[v] = 1;
            p.terms[e] = coeffs[v];
        }
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(const Expo& e, const Scalar& c) {
        if (c.is_zero()) return;
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(e, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    Scalar coeff(const Expo& e) const {
        auto it = terms.find(e);
        return it == terms.end() ? Scalar::zero(field) : it->second;
    }

    void check(const Form& o) const {
        if (field != o.field || nvars != o.nvars)
            throw std::invalid_argument("form: field/variable mismatch");
    }

    Form operator+(const Form& o) const {
        check(o);
        Form p = *this;
        for (const auto& [e, c] : o.terms) p.add_term(e, c);
        return p;
    }
    Form operator-(const Form& o) const {
        check(o);
        Form p = *this;
        for (const auto& [e, c] : o.terms) p.add_term(e, -c);
        return p;
    }
    Form operator-() const {
        Form p(field, nvars);
        for (const auto& [e, c] : terms) p.terms[e] = -c;
        return p;
    }
    Form operator*(const Form& o) const {
        check(o);
        Form p(field, nvars);
        for (const auto& [e1, c1] : terms)
            for (const auto& [e2, c2] : o.terms) p.add_term(expo_add(e1, e2), c1 * c2);
        return p;
    }
    Form scaled(const Scalar& s) const {
        Form p(field, nvars);
        if (s.is_zero()) return p;
        for (const auto& [e, c] : terms) p.terms[e] = c * s;
        return p;
    }
    bool operator==(const Form& o) const {
        return field == o.field && nvars == o.nvars && terms == o.terms;
    }
    bool operator!=(const Form& o) const { return !(*this == o); }

    Form pow(int k) const {
        if (k < 0) throw std::invalid_argument("form: negative power");
        Form r = Form::constant(field, nvars, Scalar::one(field));
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    // total degree of the highest term, -1 for the zero form
    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms) {
            int s = 0;
            for (int i = 0; i < 4; ++i) s += e[i];
            d = std::max(d, s);
        }
        return d;
    }
    bool is_homogeneous(int d) const {
        for (const auto& [e, c] : terms) {
            int s = 0;
            for (int i = 0; i < 4; ++i) s += e[i];
            if (s != d) return false;
        }
        return true;
    }
    // degree in the variable block [lo, hi)
    int block_degree(int lo, int hi) const {
        int d = terms.empty() ? -1 : 0;
        for (const auto& [e, c] : terms) {
            int s = 0;
            for (int i = lo; i < hi; ++i) s += e[i];
            d = std::max(d, s);
        }
        return d;
    }

    // conjugate coefficients (identity unless the field is Q(i))
    Form conj() const {
        Form p(field, nvars);
        for (const auto& [e, c] : terms) p.terms[e] = c.conj();
        return p;
    }

    Scalar evaluate(const std::vector<Scalar>& pt) const {
        if (static_cast<int>(pt.size()) != nvars)
            throw std::invalid_argument("form: evaluation point arity");
        Scalar acc = Scalar::zero(field);
        for (const auto& [e, c] : terms) {
            Scalar t = c;
            for (int v = 0; v < nvars; ++v) {
                if (e[v] < 0) throw std::domain_error("form: negative exponent in evaluation");
                for (int k = 0; k < e[v]; ++k) t = t * pt[v];
            }
            acc = acc + t;
        }
        return acc;
    }

    // substitute variable v -> images[v]; all images share a variable count
    Form substitute(const std::vector<Form>& images) const {
        if (static_cast<int>(images.size()) != nvars)
            throw std::invalid_argument("form: substitution arity");
        int out_nv = images.empty() ? 0 : images[0].nvars;
        for (const auto& g : images)
            if (g.field != field || g.nvars != out_nv)
                throw std::invalid_argument("form: substitution images mismatch");
        Form out(field, out_nv);
        for (const auto& [e, c] : terms) {
            Form t = Form::constant(field, out_nv, c);
            for (int v = 0; v < nvars; ++v) {
                if (e[v] < 0) throw std::domain_error("form: negative exponent in substitution");
                if (e[v] > 0) t = t * images[v].pow(e[v]);
            }
            out = out + t;
        }
        return out;
    }

    // coefficient vector of a linear form, length nvars
    std::vector<Scalar> linear_coeffs() const {
        std::vector<Scalar> out(nvars, Scalar::zero(field));
        for (const auto& [e, c] : terms) {
            int v = -1, s = 0;
            for (int i = 0; i < nvars; ++i) {
                s += e[i];
                if (e[i] == 1) v = i;
            }
            if (s != 1 || v < 0) throw std::domain_error("form: not linear");
            out[v] = c;
        }
        return out;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (terms.empty()) return "0";
        std::string out;
        for (const auto& [e, c] : terms) {
            if (!out.empty()) out += " + ";
            std::string mono;
            for (int v = 0; v < nvars; ++v) {
                if (e[v] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += names[v];
                if (e[v] != 1) mono += "^" + std::to_string(e[v]);
            }
            if (mono.empty()) out += c.str();
            else out += "(" + c.str() + ")*" + mono;
        }
        return out;
    }
};

inline Form random_linear_form(Rng& rng, const Field& f, int nvars, int64_t lo = -5, int64_t hi = 5) {
    std::vector<Scalar> c;
    c.reserve(nvars);
    for (int v = 0; v < nvars; ++v) c.push_back(random_scalar(rng, f, lo, hi));
    return Form::linear(f, c);
}

} // namespace instanton
