#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "mbarnes/errors.hpp"

namespace mb {

/// Exact arbitrary-precision rational; the coefficient type of every linear
/// form and the scalar type of every expression.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

/// r^p for integer p (p < 0 inverts; 0^negative throws).
inline Rational pow_rational(const Rational& r, int p) {
    if (p == 0) return Rational(1);
    if (r == 0) {
        if (p < 0) throw DivisionByZero("0 raised to a negative power");
        return Rational(0);
    }
    Rational base = p > 0 ? r : Rational(1) / r;
    int n = p > 0 ? p : -p;
    Rational acc(1);
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

/// n! as an exact integer (n small; used for folding Gamma(n) constants).
inline Integer factorial_int(long n) {
    Integer acc(1);
    for (long k = 2; k <= n; ++k) acc *= k;
    return acc;
}

inline std::string rational_to_string(const Rational& r) { return r.str(); }

/// Parses "n" or "n/d" with optional leading '-'. Throws ParseError.
inline Rational rational_from_string(const std::string& s) {
    try {
        if (s.empty()) throw ParseError("empty rational literal");
        return Rational(s);
    } catch (const std::exception&) {
        throw ParseError("bad rational literal: '" + s + "'");
    }
}

} // namespace mb
