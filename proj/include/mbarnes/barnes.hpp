#pragma once

#include <vector>

#include "mbarnes/errors.hpp"
#include "mbarnes/expr.hpp"
#include "mbarnes/poles.hpp"

namespace mb {

namespace detail {

/// Splits e into the v-free content and the lambda offsets of the
/// v-carrying gamma factors: `plus` holds lambda with arg = lambda + v,
/// `minus` holds lambda with arg = lambda - v. Every v-carrying gamma must
/// have the expected power and coefficient +-1, and v must not survive
/// anywhere else, or the lemma pattern does not apply.
struct LambdaSplit {
    GammaProduct rest;
    std::vector<LinearForm> plus;
    std::vector<LinearForm> minus;
};

inline LambdaSplit split_lemma_numerator(const GammaProduct& e, const Symbol& v,
                                         const char* who) {
    LambdaSplit out;
    out.rest = GammaProduct::from_scalar(e.scalar());
    for (const auto& f : e.gammas()) {
        if (!f.arg.contains(v)) {
            out.rest.mul_gamma(f.arg, f.power);
            continue;
        }
        if (f.power < 1)
            throw PatternMismatch(std::string(who) + ": Gamma(" + f.arg.to_string() +
                                  ")^" + std::to_string(f.power) +
                                  " carries the integration variable");
        const Rational k = f.arg.coeff(v);
        // A power-p factor is p coincident lemma parameters.
        if (k == 1)
            out.plus.insert(out.plus.end(), f.power, f.arg - LinearForm(v));
        else if (k == -1)
            out.minus.insert(out.minus.end(), f.power, f.arg + LinearForm(v));
        else
            throw PatternMismatch(std::string(who) + ": coefficient of " + v.name() +
                                  " in Gamma(" + f.arg.to_string() + ") is not +-1");
    }
    for (const auto& [form, p] : e.polys()) {
        if (form.contains(v))
            throw PatternMismatch(std::string(who) + ": prefactor (" +
                                  form.to_string() + ") carries " + v.name());
        out.rest.mul_poly(form, p);
    }
    return out;
}

} // namespace detail

/// First lemma: (1/2pi i) integral over a separating vertical line of
/// Gamma(l1+v) Gamma(l2+v) Gamma(l3-v) Gamma(l4-v) equals
/// Gamma(l1+l3) Gamma(l1+l4) Gamma(l2+l3) Gamma(l2+l4) / Gamma(l1+l2+l3+l4).
/// The rewrite is formal: admissibility of the contour is the caller's
/// concern (check_contour / choose_contour), and the result no longer
/// depends on v — one integration fold is consumed.
inline GammaProduct apply_barnes_first(const GammaProduct& e, const Symbol& v) {
    auto s = detail::split_lemma_numerator(e, v, "apply_barnes_first");
    if (s.plus.size() != 2 || s.minus.size() != 2)
        throw PatternMismatch("apply_barnes_first: need Gamma(l1+v)Gamma(l2+v)"
                              "Gamma(l3-v)Gamma(l4-v); found " +
                              std::to_string(s.plus.size()) + " rising and " +
                              std::to_string(s.minus.size()) + " falling factors");
    GammaProduct out = std::move(s.rest);
    for (const auto& a : s.plus)
        for (const auto& b : s.minus) out.mul_gamma(a + b);
    out.mul_gamma(s.plus[0] + s.plus[1] + s.minus[0] + s.minus[1], -1);
    return out;
}

/// Second lemma: with the balance condition d = l1+l2+l3+l4+l5, the
/// integral of Gamma(l1+v)Gamma(l2+v)Gamma(l3+v)Gamma(l4-v)Gamma(l5-v) /
/// Gamma(d+v) equals
///   prod_{i<=3, j in {4,5}} Gamma(li+lj)
///   / [Gamma(l1+l2+l4+l5) Gamma(l1+l3+l4+l5) Gamma(l2+l3+l4+l5)].
inline GammaProduct apply_barnes_second(const GammaProduct& e, const Symbol& v) {
    // peel off the single Gamma(d+v)^{-1} before matching the numerator
    const LinearForm* denom = nullptr;
    for (const auto& f : e.gammas()) {
        if (!f.arg.contains(v) || f.power >= 0) continue;
        if (f.power != -1 || denom)
            throw PatternMismatch("apply_barnes_second: expected exactly one "
                                  "denominator gamma carrying " + v.name());
        denom = &f.arg;
    }
    if (!denom)
        throw PatternMismatch("apply_barnes_second: no denominator gamma carrying " +
                              v.name());
    if (denom->coeff(v) != 1)
        throw PatternMismatch("apply_barnes_second: denominator Gamma(" +
                              denom->to_string() + ") must carry +" + v.name());

    GammaProduct numerator = e;
    numerator.mul_gamma(*denom, 1); // cancel the stored power -1
    auto s = detail::split_lemma_numerator(numerator, v, "apply_barnes_second");
    if (s.plus.size() != 3 || s.minus.size() != 2)
        throw PatternMismatch("apply_barnes_second: need three rising and two "
                              "falling gamma factors; found " +
                              std::to_string(s.plus.size()) + " and " +
                              std::to_string(s.minus.size()));
    LinearForm sum = s.minus[0] + s.minus[1];
    for (const auto& a : s.plus) sum += a;
    if (!(*denom - LinearForm(v) == sum))
        throw PatternMismatch("apply_barnes_second: denominator Gamma(" +
                              denom->to_string() +
                              ") does not equal the sum of the five offsets plus " +
                              v.name());
    GammaProduct out = std::move(s.rest);
    for (const auto& a : s.plus)
        for (const auto& b : s.minus) out.mul_gamma(a + b);
    const LinearForm tail = s.minus[0] + s.minus[1];
    out.mul_gamma(s.plus[0] + s.plus[1] + tail, -1);
    out.mul_gamma(s.plus[0] + s.plus[2] + tail, -1);
    out.mul_gamma(s.plus[1] + s.plus[2] + tail, -1);
    return out;
}

/// Contribution of collapsing one contour fold onto the first (n = 0)
/// member of a right pole family at v = pole: with the 1/(2pi i) fold
/// normalization, the shifted-contour bookkeeping gives
/// I(separating) = I(shifted right) + take_right_residue(e, v, pole),
/// i.e. the returned value is (-1) x the analytic residue. For a gamma-pole
/// Gamma(b - v) at v = b this is simply the remaining factors evaluated at
/// the pole; for a prefactor 1/(b - v) likewise.
inline GammaProduct take_right_residue(const GammaProduct& e, const Symbol& v,
                                       const LinearForm& pole) {
    // locate every factor that becomes singular at v = pole
    struct Hit {
        bool is_gamma = false;
        std::size_t index = 0;
        long gamma_member = 0; // n for a gamma pole at argument -n
    };
    std::vector<Hit> hits;
    const auto& gammas = e.gammas();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (!gammas[i].arg.contains(v)) continue;
        const LinearForm at = gammas[i].arg.substitute(v, pole);
        if (!at.is_constant() || !is_integer(at.constant()) || at.constant() > 0)
            continue;
        if (gammas[i].power < 0)
            continue; // 1/Gamma vanishes there; the product has no pole from it
        Hit h;
        h.is_gamma = true;
        h.index = i;
        h.gamma_member = -static_cast<long>(at.constant().template convert_to<Integer>());
        for (int rep = 0; rep < gammas[i].power; ++rep) hits.push_back(h);
    }
    const auto& polys = e.polys();
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (!polys[i].first.contains(v)) continue;
        const LinearForm at = polys[i].first.substitute(v, pole);
        if (!at.is_zero() || polys[i].second > 0) continue;
        Hit h;
        h.index = i;
        for (int rep = 0; rep < -polys[i].second; ++rep) hits.push_back(h);
    }
    if (hits.empty())
        throw NotARightPole("no factor of the integrand is singular at " + v.name() +
                            " = " + pole.to_string());
    if (hits.size() > 1)
        throw HigherOrderPole("multiple factors singular at " + v.name() + " = " +
                              pole.to_string());

    const Hit& h = hits.front();
    GammaProduct rest = GammaProduct::from_scalar(e.scalar());
    Rational weight(1);
    if (h.is_gamma) {
        const GammaFactor& f = gammas[h.index];
        if (f.arg.coeff(v) != -1)
            throw NotARightPole("Gamma(" + f.arg.to_string() +
                                ") puts a left-family pole at " + v.name() + " = " +
                                pole.to_string());
        // Gamma(b - v) near v = b + n: residue in v is -gamma_residue(n);
        // the contribution is +gamma_residue(n) x rest(pole).
        weight = gamma_residue(h.gamma_member);
        for (std::size_t i = 0; i < gammas.size(); ++i)
            if (i != h.index) rest.mul_gamma(gammas[i].arg, gammas[i].power);
        for (const auto& [form, p] : polys) rest.mul_poly(form, p);
    } else {
        const auto& [form, p] = polys[h.index];
        if (form.coeff(v) != -1)
            throw NotARightPole("prefactor (" + form.to_string() +
                                ") puts a left-family pole at " + v.name() + " = " +
                                pole.to_string());
        for (const auto& f : gammas) rest.mul_gamma(f.arg, f.power);
        for (std::size_t i = 0; i < polys.size(); ++i)
            if (i != h.index) rest.mul_poly(polys[i].first, polys[i].second);
    }
    GammaProduct collapsed = substitute(rest, v, pole);
    collapsed.mul_scalar(weight);
    return collapsed;
}

} // namespace mb
