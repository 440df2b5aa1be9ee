#pragma once

#include <map>
#include <string>
#include <vector>

#include "mbarnes/errors.hpp"
#include "mbarnes/expr.hpp"

namespace mb {

/// One arithmetic family of poles of the integrand in a single integration
/// variable. A right family sits at variable = base + n (n >= 0) and comes
/// from a factor whose argument carries the variable with coefficient -1; a
/// left family sits at variable = -base - n and carries coefficient +1.
/// Only right families contribute when a contour is collapsed rightward.
struct PoleFamily {
    enum class Side { Left, Right };

    explicit PoleFamily(Symbol v) : variable(std::move(v)) {}

    Symbol variable;
    Side side = Side::Right;
    LinearForm base;
    bool from_prefactor = false; // true when the origin is a 1/L factor
    std::size_t origin = 0;      // index into gammas() or polys()
};

/// Poles of e in v, one family per positive-power gamma factor containing v
/// plus one (simple) family per rational prefactor 1/L containing v. Gamma
/// arguments must carry v with coefficient +-1; anything else is outside the
/// engine's pattern language.
inline std::vector<PoleFamily> classify_poles(const GammaProduct& e, const Symbol& v) {
    std::vector<PoleFamily> out;
    const auto& gammas = e.gammas();
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        if (gammas[i].power <= 0 || !gammas[i].arg.contains(v)) continue;
        const Rational k = gammas[i].arg.coeff(v);
        if (k != 1 && k != -1)
            throw PatternMismatch("classify_poles: Gamma(" + gammas[i].arg.to_string() +
                                  ") carries " + v.name() +
                                  " with coefficient " + rational_to_string(k));
        PoleFamily f(v);
        f.origin = i;
        if (k == -1) {
            f.side = PoleFamily::Side::Right;
            f.base = gammas[i].arg + LinearForm(v); // arg = base - v
        } else {
            f.side = PoleFamily::Side::Left;
            f.base = gammas[i].arg - LinearForm(v); // arg = base + v
        }
        out.push_back(std::move(f));
    }
    const auto& polys = e.polys();
    for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].second >= 0 || !polys[i].first.contains(v)) continue;
        const Rational k = polys[i].first.coeff(v);
        PoleFamily f(v);
        f.from_prefactor = true;
        f.origin = i;
        f.side = k < 0 ? PoleFamily::Side::Right : PoleFamily::Side::Left;
        // L = k*v + rest vanishes at v = -rest/k; a right family reports the
        // pole as base, a left family as -base, matching the gamma families.
        const LinearForm rest = polys[i].first - LinearForm::term(v, k);
        f.base = f.side == PoleFamily::Side::Right ? rest * (Rational(-1) / k)
                                                   : rest * (Rational(1) / k);
        out.push_back(std::move(f));
    }
    return out;
}

/// A choice of vertical-line abscissae for the integration variables,
/// together with the verdict of the separation conditions: every
/// positive-power gamma factor must keep Re(arg) > 0 once integration
/// variables sit at their offsets and parameters at their declared real
/// parts.
struct ContourSpec {
    struct Violation {
        LinearForm arg;
        double real_part = 0.0;
    };

    std::map<Symbol, double> offsets;
    bool admissible = false;
    std::vector<Violation> violated;

    /// For deliberate off-window experiments (contour-shift welding): trust
    /// the caller's offsets without evaluating the separation conditions.
    static ContourSpec unchecked(std::map<Symbol, double> offsets) {
        ContourSpec c;
        c.offsets = std::move(offsets);
        c.admissible = true;
        return c;
    }
};

namespace detail {

inline double real_part_at(const LinearForm& form,
                           const std::map<Symbol, double>& offsets,
                           const std::map<Symbol, double>& params) {
    double re = to_double(form.constant());
    for (const auto& [s, k] : form.coeffs()) {
        const auto io = offsets.find(s);
        if (io != offsets.end()) {
            re += to_double(k) * io->second;
            continue;
        }
        const auto ip = params.find(s);
        if (ip == params.end())
            throw std::invalid_argument("contour check: no real part given for " +
                                        s.name());
        re += to_double(k) * ip->second;
    }
    return re;
}

} // namespace detail

/// Evaluates the separation conditions of e at the given offsets.
inline ContourSpec check_contour(const GammaProduct& e,
                                 std::map<Symbol, double> offsets,
                                 const std::map<Symbol, double>& params) {
    ContourSpec c;
    c.offsets = std::move(offsets);
    c.admissible = true;
    for (const auto& f : e.gammas()) {
        if (f.power <= 0) continue;
        const double re = detail::real_part_at(f.arg, c.offsets, params);
        if (re <= 0.0) {
            c.admissible = false;
            c.violated.push_back({f.arg, re});
        }
    }
    return c;
}

/// Picks contour offsets for every integration variable of e by walking the
/// variables in canonical order and placing each at the midpoint of the
/// interval cut out by the separation conditions whose other integration
/// variables are already placed. Infeasibility is reported in the result,
/// not thrown: the final admissibility verdict re-checks every condition.
inline ContourSpec choose_contour(const GammaProduct& e,
                                  const std::map<Symbol, double>& params) {
    std::vector<Symbol> vars;
    for (const Symbol& s : e.symbols())
        if (s.is_integration_variable() && !params.count(s)) vars.push_back(s);

    std::map<Symbol, double> offsets;
    for (const Symbol& v : vars) {
        double lo = -1e300, hi = 1e300;
        for (const auto& f : e.gammas()) {
            if (f.power <= 0 || !f.arg.contains(v)) continue;
            bool deferred = false;
            for (const Symbol& other : vars)
                if (!(other == v) && !offsets.count(other) && f.arg.contains(other))
                    deferred = true;
            if (deferred) continue; // handled once the later variable is placed
            const double k = to_double(f.arg.coeff(v));
            // k*c + rest > 0
            const double rest =
                detail::real_part_at(f.arg - LinearForm::term(v, f.arg.coeff(v)),
                                     offsets, params);
            if (k > 0)
                lo = std::max(lo, -rest / k);
            else
                hi = std::min(hi, -rest / k);
        }
        if (lo >= hi) {
            // no window for this variable: fall back to the midpoint of the
            // crossed bounds so the final check reports the violations
            offsets[v] = 0.5 * (std::max(lo, -1.0) + std::min(hi, 1.0));
            continue;
        }
        const double left = lo < -1e299 ? (hi < 1e299 ? hi - 1.0 : -0.5) : lo;
        const double right = hi > 1e299 ? (lo > -1e299 ? lo + 1.0 : 0.5) : hi;
        offsets[v] = 0.5 * (left + right);
    }
    return check_contour(e, std::move(offsets), params);
}

} // namespace mb
