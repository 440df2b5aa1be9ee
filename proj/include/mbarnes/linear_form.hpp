#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mbarnes/rational.hpp"
#include "mbarnes/symbol.hpp"

namespace mb {

using ComplexVal = std::complex<double>;
using Assignment = std::map<Symbol, ComplexVal>;

/// An affine form c0 + sum_i c_i * s_i with exact rational coefficients over
/// symbols; the argument type of every gamma factor and rational prefactor.
/// Zero coefficients are never stored, and the coefficient list is kept
/// sorted by symbol, so equality is plain member equality.
class LinearForm {
public:
    LinearForm() : constant_(0) {}
    /*implicit*/ LinearForm(Rational constant) : constant_(std::move(constant)) {}
    /*implicit*/ LinearForm(int constant) : constant_(constant) {}
    /*implicit*/ LinearForm(const Symbol& s) : constant_(0) {
        coeffs_.emplace_back(s, Rational(1));
    }

    static LinearForm term(const Symbol& s, Rational coeff) {
        LinearForm f;
        if (coeff != 0) f.coeffs_.emplace_back(s, std::move(coeff));
        return f;
    }

    const Rational& constant() const { return constant_; }
    const std::vector<std::pair<Symbol, Rational>>& coeffs() const { return coeffs_; }

    bool is_constant() const { return coeffs_.empty(); }
    bool is_zero() const { return coeffs_.empty() && constant_ == 0; }

    bool contains(const Symbol& s) const {
        return std::any_of(coeffs_.begin(), coeffs_.end(),
                           [&](const auto& p) { return p.first == s; });
    }

    Rational coeff(const Symbol& s) const {
        for (const auto& [name, c] : coeffs_)
            if (name == s) return c;
        return Rational(0);
    }

    std::vector<Symbol> symbols() const {
        std::vector<Symbol> out;
        out.reserve(coeffs_.size());
        for (const auto& p : coeffs_) out.push_back(p.first);
        return out;
    }

    LinearForm& operator+=(const LinearForm& o) {
        constant_ += o.constant_;
        for (const auto& [s, c] : o.coeffs_) add_term(s, c);
        return *this;
    }
    LinearForm& operator-=(const LinearForm& o) {
        constant_ -= o.constant_;
        for (const auto& [s, c] : o.coeffs_) add_term(s, -c);
        return *this;
    }
    LinearForm& operator*=(const Rational& k) {
        if (k == 0) {
            constant_ = 0;
            coeffs_.clear();
            return *this;
        }
        constant_ *= k;
        for (auto& p : coeffs_) p.second *= k;
        return *this;
    }

    friend LinearForm operator+(LinearForm a, const LinearForm& b) { return a += b; }
    friend LinearForm operator-(LinearForm a, const LinearForm& b) { return a -= b; }
    friend LinearForm operator*(LinearForm a, const Rational& k) { return a *= k; }
    friend LinearForm operator*(const Rational& k, LinearForm a) { return a *= k; }
    friend LinearForm operator-(LinearForm a) { return a *= Rational(-1); }

    /// Replaces every occurrence of s by the form f.
    LinearForm substitute(const Symbol& s, const LinearForm& f) const {
        LinearForm out;
        out.constant_ = constant_;
        for (const auto& [name, c] : coeffs_) {
            if (name == s)
                out += f * c;
            else
                out.add_term(name, c);
        }
        return out;
    }

    ComplexVal evaluate(const Assignment& a) const {
        ComplexVal acc(to_double(constant_), 0.0);
        for (const auto& [s, c] : coeffs_) {
            auto it = a.find(s);
            if (it == a.end())
                throw std::invalid_argument("unbound symbol in evaluation: " + s.name());
            acc += to_double(c) * it->second;
        }
        return acc;
    }

    /// Real part of the form with each symbol replaced by a real value
    /// (contour admissibility arithmetic).
    double evaluate_real(const std::map<Symbol, double>& a) const {
        double acc = to_double(constant_);
        for (const auto& [s, c] : coeffs_) {
            auto it = a.find(s);
            if (it == a.end())
                throw std::invalid_argument("unbound symbol in evaluation: " + s.name());
            acc += to_double(c) * it->second;
        }
        return acc;
    }

    /// Sign of the first nonzero coefficient (or of the constant if there are
    /// no symbols); 0 only for the zero form. Drives the canonical
    /// orientation of rational prefactors.
    int leading_sign() const {
        if (!coeffs_.empty()) return coeffs_.front().second < 0 ? -1 : 1;
        if (constant_ == 0) return 0;
        return constant_ < 0 ? -1 : 1;
    }

    friend bool operator==(const LinearForm& a, const LinearForm& b) {
        return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
    }
    friend bool operator!=(const LinearForm& a, const LinearForm& b) { return !(a == b); }

    /// Canonical total order: lexicographic on the sorted (symbol, coefficient)
    /// pairs, then on the constant.
    friend bool operator<(const LinearForm& a, const LinearForm& b) {
        const auto n = std::min(a.coeffs_.size(), b.coeffs_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.coeffs_[i].first != b.coeffs_[i].first)
                return a.coeffs_[i].first < b.coeffs_[i].first;
            if (a.coeffs_[i].second != b.coeffs_[i].second)
                return a.coeffs_[i].second < b.coeffs_[i].second;
        }
        if (a.coeffs_.size() != b.coeffs_.size())
            return a.coeffs_.size() < b.coeffs_.size();
        return a.constant_ < b.constant_;
    }

    /// Canonical text form, e.g. "1 - eps1 - eps2 + z2 + z3"; the parser in
    /// expr_io accepts exactly this grammar (in any term order).
    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        bool first = true;
        if (constant_ != 0) {
            out += rational_to_string(constant_);
            first = false;
        }
        for (const auto& [s, c] : coeffs_) {
            const bool neg = c < 0;
            const Rational mag = neg ? Rational(-c) : c;
            if (first) {
                if (neg) out += "-";
                first = false;
            } else {
                out += neg ? " - " : " + ";
            }
            if (mag != 1) out += rational_to_string(mag) + "*";
            out += s.name();
        }
        return out;
    }

private:
    void add_term(const Symbol& s, const Rational& c) {
        if (c == 0) return;
        auto it = std::lower_bound(
            coeffs_.begin(), coeffs_.end(), s,
            [](const auto& p, const Symbol& key) { return p.first < key; });
        if (it != coeffs_.end() && it->first == s) {
            it->second += c;
            if (it->second == 0) coeffs_.erase(it);
        } else {
            coeffs_.insert(it, {s, c});
        }
    }

    Rational constant_;
    std::vector<std::pair<Symbol, Rational>> coeffs_; // sorted by symbol
};

} // namespace mb
