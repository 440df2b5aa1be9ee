#pragma once

#include <cmath>
#include <complex>

#include "mbarnes/errors.hpp"
#include "mbarnes/rational.hpp"

namespace mb {

using Complex = std::complex<double>;

/// A pole of Gamma at z = -n with its exact residue (-1)^n / n!.
struct GammaPole {
    long location;     // nonnegative n; the pole sits at z = -n
    Rational residue;  // (-1)^n / n!
};

/// Exact residue of Gamma at z = -n: residue(0)=1, residue(n)=-residue(n-1)/n.
inline Rational gamma_residue(long n) {
    if (n < 0) throw std::invalid_argument("gamma_residue: n must be >= 0");
    Rational r(1);
    for (long k = 1; k <= n; ++k) r = -r / k;
    return r;
}

inline GammaPole gamma_pole(long n) { return GammaPole{n, gamma_residue(n)}; }

/// Exponential decay coefficient r in |integrand| ~ |t|^p e^{-r|t|} along a
/// vertical line, from the net count of gamma factors (numerator minus
/// denominator): r = (pi/2) * net. Each |Gamma(x+it)| contributes a factor
/// ~ e^{-pi |t|/2}.
inline double decay_rate(int net_gamma_count) {
    if (net_gamma_count <= 0)
        throw DivergentTailError(
            "no exponential decay along the line: net gamma count = " +
            std::to_string(net_gamma_count));
    return 0.5 * M_PI * static_cast<double>(net_gamma_count);
}

namespace detail {

// Godfrey's 15-coefficient Lanczos set for g = 607/128; relative accuracy
// ~1e-15 on the half-plane Re z >= 0.5 in double precision.
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr double kLanczos[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

inline const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

// Lanczos log-gamma, valid for Re z >= 0.5.
inline Complex log_gamma_right(const Complex& z) {
    Complex s(kLanczos[0], 0.0);
    for (int i = 1; i < 15; ++i) s += kLanczos[i] / (z + static_cast<double>(i - 1));
    const Complex t = z + (kLanczosG - 0.5);
    return kHalfLog2Pi + (z - 0.5) * std::log(t) - t + std::log(s);
}

// Branch-corrected log(sin(pi z)) for Im z >= 0, continuous off the real
// axis; keeps the reflection formula on the standard analytic continuation
// of log Gamma. For Im z > 0 use sin(pi z) = (i/2) e^{-i pi z}(1 - e^{2 i pi z}).
inline Complex log_sin_pi(const Complex& z) {
    if (z.imag() > 0.0) {
        return Complex(-std::log(2.0), 0.5 * M_PI) + Complex(0.0, -M_PI) * z +
               std::log(1.0 - std::exp(Complex(0.0, 2.0 * M_PI) * z));
    }
    return std::log(std::sin(M_PI * z));
}

} // namespace detail

/// Distance from z to the nearest pole of Gamma (nonpositive integer), or a
/// large value when Re z > 0.5.
inline double distance_to_pole(const Complex& z) {
    if (z.real() > 0.5) return 1e300;
    const double n = std::round(z.real());
    if (n > 0.5) return 1e300;
    return std::hypot(z.real() - n, z.imag());
}

/// Log of the gamma function on its standard analytic continuation
/// (principal branch): Lanczos approximation on Re z >= 0.5, reflection with
/// branch-corrected log-sin otherwise, conjugate symmetry for Im z < 0.
/// Accuracy: >= 13 significant digits (gamma scale) for |z| <= 50.
///
/// Throws PoleError within 1e-12 of a nonpositive integer and OverflowError
/// if the result is not finite.
inline Complex log_gamma(const Complex& z) {
    if (distance_to_pole(z) < 1e-12)
        throw PoleError("log_gamma at a pole: z = (" + std::to_string(z.real()) +
                        ", " + std::to_string(z.imag()) + ")");
    Complex w = z;
    const bool conjugated = w.imag() < 0.0;
    if (conjugated) w = std::conj(w);
    Complex r;
    if (w.real() >= 0.5)
        r = detail::log_gamma_right(w);
    else
        r = std::log(M_PI) - detail::log_sin_pi(w) - detail::log_gamma_right(1.0 - w);
    if (conjugated) r = std::conj(r);
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
        throw OverflowError("log_gamma overflow at z = (" + std::to_string(z.real()) +
                            ", " + std::to_string(z.imag()) + ")");
    return r;
}

/// Gamma(z) = exp(log_gamma(z)); same error cases, plus OverflowError when
/// the magnitude exceeds the double range.
inline Complex gamma(const Complex& z) {
    const Complex lg = log_gamma(z);
    if (lg.real() > 709.0)
        throw OverflowError("gamma overflow at z = (" + std::to_string(z.real()) +
                            ", " + std::to_string(z.imag()) + ")");
    return std::exp(lg);
}

} // namespace mb
