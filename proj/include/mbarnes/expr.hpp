#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "mbarnes/errors.hpp"
#include "mbarnes/gamma.hpp"
#include "mbarnes/linear_form.hpp"

namespace mb {

/// One Gamma(arg)^power factor; power is a nonzero integer (negative powers
/// are denominators).
struct GammaFactor {
    LinearForm arg;
    int power = 1;

    friend bool operator==(const GammaFactor& a, const GammaFactor& b) {
        return a.power == b.power && a.arg == b.arg;
    }
    friend bool operator<(const GammaFactor& a, const GammaFactor& b) {
        if (a.arg != b.arg) return a.arg < b.arg;
        return a.power < b.power;
    }
};

/// scalar * prod Gamma(arg_i)^p_i * prod (L_j)^q_j with exact rational
/// scalar, gamma factors of linear forms, and rational linear-form
/// prefactors (e.g. 1/(eps1 - z3)).
///
/// Every reachable value is kept in a light canonical form:
///   - gamma factors sorted by argument, equal arguments merged, zero powers
///     dropped, Gamma(n) for positive integer constant n folded into the
///     scalar as (n-1)!;
///   - prefactor forms sign-canonicalized (first nonzero coefficient
///     positive; the (-1)^power lands in the scalar), sorted and merged;
///     constant prefactors folded into the scalar;
///   - scalar 0 collapses the whole product to the canonical zero.
///
/// Gamma *arguments* are never sign-flipped (Gamma(-L) != Gamma(L)); the
/// rewrites that need the deeper identities live in normalize().
class GammaProduct {
public:
    GammaProduct() : scalar_(1) {}

    static GammaProduct from_scalar(Rational s) {
        GammaProduct e;
        e.scalar_ = std::move(s);
        return e;
    }
    static GammaProduct zero() { return from_scalar(Rational(0)); }

    const Rational& scalar() const { return scalar_; }
    const std::vector<GammaFactor>& gammas() const { return gammas_; }
    const std::vector<std::pair<LinearForm, int>>& polys() const { return polys_; }
    bool is_zero() const { return scalar_ == 0; }
    bool is_scalar() const { return gammas_.empty() && polys_.empty(); }

    GammaProduct& mul_scalar(const Rational& k) {
        scalar_ *= k;
        if (scalar_ == 0) collapse_to_zero();
        return *this;
    }

    GammaProduct& mul_gamma(const LinearForm& arg, int power = 1) {
        if (power == 0 || is_zero()) return *this;
        if (arg.is_constant() && is_integer(arg.constant()) && arg.constant() > 0) {
            // Gamma(n) = (n-1)! folds into the scalar exactly.
            const long n = static_cast<long>(arg.constant().template convert_to<Integer>());
            return mul_scalar(pow_rational(Rational(factorial_int(n - 1)), power));
        }
        auto it = std::lower_bound(
            gammas_.begin(), gammas_.end(), arg,
            [](const GammaFactor& f, const LinearForm& key) { return f.arg < key; });
        if (it != gammas_.end() && it->arg == arg) {
            it->power += power;
            if (it->power == 0) gammas_.erase(it);
        } else {
            gammas_.insert(it, GammaFactor{arg, power});
        }
        return *this;
    }

    GammaProduct& mul_poly(LinearForm form, int power = 1) {
        if (power == 0 || is_zero()) return *this;
        if (form.is_constant()) return mul_scalar(pow_rational(form.constant(), power));
        if (form.leading_sign() < 0) {
            form = -form;
            if (power % 2 != 0) scalar_ = -scalar_;
        }
        auto it = std::lower_bound(
            polys_.begin(), polys_.end(), form,
            [](const auto& p, const LinearForm& key) { return p.first < key; });
        if (it != polys_.end() && it->first == form) {
            it->second += power;
            if (it->second == 0) polys_.erase(it);
        } else {
            polys_.insert(it, {form, power});
        }
        return *this;
    }

    GammaProduct& mul(const GammaProduct& o) {
        mul_scalar(o.scalar_);
        for (const auto& f : o.gammas_) mul_gamma(f.arg, f.power);
        for (const auto& [form, p] : o.polys_) mul_poly(form, p);
        return *this;
    }

    int gamma_power(const LinearForm& arg) const {
        for (const auto& f : gammas_)
            if (f.arg == arg) return f.power;
        return 0;
    }

    /// Power of the sign-canonical image of `form` among the prefactors,
    /// together with the orientation actually stored.
    int poly_power(const LinearForm& form) const {
        LinearForm canon = form;
        if (canon.leading_sign() < 0) canon = -canon;
        for (const auto& [stored, p] : polys_)
            if (stored == canon) return p;
        return 0;
    }

    bool contains(const Symbol& s) const {
        for (const auto& f : gammas_)
            if (f.arg.contains(s)) return true;
        for (const auto& [form, p] : polys_)
            if (form.contains(s)) return true;
        return false;
    }

    std::set<Symbol> symbols() const {
        std::set<Symbol> out;
        for (const auto& f : gammas_)
            for (const auto& s : f.arg.symbols()) out.insert(s);
        for (const auto& [form, p] : polys_)
            for (const auto& s : form.symbols()) out.insert(s);
        return out;
    }

    friend bool operator==(const GammaProduct& a, const GammaProduct& b) {
        return a.scalar_ == b.scalar_ && a.gammas_ == b.gammas_ && a.polys_ == b.polys_;
    }
    friend bool operator!=(const GammaProduct& a, const GammaProduct& b) {
        return !(a == b);
    }
    friend bool operator<(const GammaProduct& a, const GammaProduct& b) {
        if (a.gammas_ != b.gammas_)
            return std::lexicographical_compare(a.gammas_.begin(), a.gammas_.end(),
                                                b.gammas_.begin(), b.gammas_.end());
        if (a.polys_ != b.polys_)
            return std::lexicographical_compare(
                a.polys_.begin(), a.polys_.end(), b.polys_.begin(), b.polys_.end(),
                [](const auto& x, const auto& y) {
                    if (x.first != y.first) return x.first < y.first;
                    return x.second < y.second;
                });
        return a.scalar_ < b.scalar_;
    }

    std::size_t hash() const {
        std::size_t h = std::hash<std::string>{}(rational_to_string(scalar_));
        auto mix = [&h](std::size_t v) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        };
        for (const auto& f : gammas_) {
            mix(std::hash<std::string>{}(f.arg.to_string()));
            mix(std::hash<int>{}(f.power));
        }
        for (const auto& [form, p] : polys_) {
            mix(std::hash<std::string>{}(form.to_string()));
            mix(std::hash<int>{}(p));
        }
        return h;
    }

private:
    void collapse_to_zero() {
        gammas_.clear();
        polys_.clear();
        scalar_ = 0;
    }

    Rational scalar_;
    std::vector<GammaFactor> gammas_;
    std::vector<std::pair<LinearForm, int>> polys_;
};

/// A sum of gamma products (e.g. the three-term right-hand side of the
/// identity). Terms are kept sorted in the canonical product order, zero
/// terms dropped.
class ExprSum {
public:
    ExprSum() = default;
    /*implicit*/ ExprSum(GammaProduct term) { push(std::move(term)); }
    explicit ExprSum(std::vector<GammaProduct> terms) {
        for (auto& t : terms) push(std::move(t));
    }

    const std::vector<GammaProduct>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    std::set<Symbol> symbols() const {
        std::set<Symbol> out;
        for (const auto& t : terms_) {
            auto s = t.symbols();
            out.insert(s.begin(), s.end());
        }
        return out;
    }

    friend bool operator==(const ExprSum& a, const ExprSum& b) {
        return a.terms_ == b.terms_;
    }
    friend bool operator!=(const ExprSum& a, const ExprSum& b) { return !(a == b); }

private:
    void push(GammaProduct t) {
        if (t.is_zero()) return;
        terms_.insert(std::upper_bound(terms_.begin(), terms_.end(), t), std::move(t));
    }

    std::vector<GammaProduct> terms_;
};

/// Canonicalizes an expression. With absorb_prefactors = false (default) the
/// gamma recurrence is applied as a contraction to a fixed point:
/// Gamma(L)/Gamma(1+L) -> 1/L and Gamma(1+L)/Gamma(L) -> L. With
/// absorb_prefactors = true every rational prefactor is rewritten the other
/// way: L^q -> Gamma(1+L)^q Gamma(L)^{-q} (so 1/L -> Gamma(L)/Gamma(1+L)).
/// Both modes are idempotent.
inline GammaProduct normalize(const GammaProduct& e, bool absorb_prefactors = false) {
    if (e.is_zero()) return e;
    GammaProduct out = e;
    if (absorb_prefactors) {
        GammaProduct acc = GammaProduct::from_scalar(out.scalar());
        for (const auto& f : out.gammas()) acc.mul_gamma(f.arg, f.power);
        for (const auto& [form, q] : out.polys()) {
            acc.mul_gamma(form + Rational(1), q);
            acc.mul_gamma(form, -q);
        }
        return acc;
    }
    // Contract opposite-power pairs whose arguments differ by a positive
    // integer n: Gamma(A+n)/Gamma(A) = (A)(A+1)...(A+n-1). Pairs where a
    // factor (A+s) would be identically zero are left alone so symbolic
    // poles stay visible. The scan restarts after every rewrite and stops
    // at a fixed point, which makes both modes idempotent.
    bool changed = true;
    while (changed) {
        changed = false;
        const auto& gs = out.gammas();
        for (std::size_t i = 0; i < gs.size() && !changed; ++i) {
            if (gs[i].power <= 0) continue;
            for (std::size_t j = 0; j < gs.size() && !changed; ++j) {
                if (gs[j].power >= 0) continue;
                const LinearForm gap = gs[i].arg - gs[j].arg;
                if (!gap.is_constant() || !is_integer(gap.constant()) ||
                    gap.constant() == 0)
                    continue;
                // low = the smaller argument; sign = +1 when the positive
                // power sits on the *larger* argument (product of polys),
                // -1 when it sits on the smaller one (product of inverses).
                const bool pos_on_top = gap.constant() > 0;
                const LinearForm low = pos_on_top ? gs[j].arg : gs[i].arg;
                const Rational mag =
                    pos_on_top ? gap.constant() : -gap.constant();
                const long n = numerator(mag).convert_to<long>();
                bool hits_zero = false;
                for (long s = 0; s < n; ++s)
                    if ((low + Rational(s)).is_zero()) hits_zero = true;
                if (hits_zero) continue;
                const int k = std::min(gs[i].power, -gs[j].power);
                GammaProduct next = out;
                next.mul_gamma(gs[i].arg, -k);
                next.mul_gamma(gs[j].arg, k);
                for (long s = 0; s < n; ++s)
                    next.mul_poly(low + Rational(s), pos_on_top ? k : -k);
                out = std::move(next);
                changed = true;
            }
        }
    }
    return out;
}

/// Replaces every occurrence of symbol s by the linear form f.
inline GammaProduct substitute(const GammaProduct& e, const Symbol& s,
                               const LinearForm& f) {
    GammaProduct out = GammaProduct::from_scalar(e.scalar());
    for (const auto& g : e.gammas()) out.mul_gamma(g.arg.substitute(s, f), g.power);
    for (const auto& [form, p] : e.polys()) out.mul_poly(form.substitute(s, f), p);
    return out;
}

inline ExprSum substitute(const ExprSum& e, const Symbol& s, const LinearForm& f) {
    std::vector<GammaProduct> terms;
    terms.reserve(e.size());
    for (const auto& t : e.terms()) terms.push_back(substitute(t, s, f));
    return ExprSum(std::move(terms));
}

/// Bookkeeping returned by reflect_variable: the contour offset of the
/// reflected variable negates. The returned expression is value-preserving
/// as an integrand over the mirrored upward vertical line — the sign that
/// the derivation displays after a reflection comes out of the prefactor
/// orientation (1/(z-a) -> -1/(z+a)), which the canonical form produces
/// automatically; no separate measure factor is applied.
struct ReflectNote {
    Symbol variable;
    bool offset_negates = true;
};

/// z -> -z for one integration variable.
inline std::pair<GammaProduct, ReflectNote> reflect_variable(const GammaProduct& e,
                                                             const Symbol& v) {
    if (!v.is_integration_variable())
        throw std::invalid_argument("reflect_variable: " + v.name() +
                                    " is not an integration variable");
    return {substitute(e, v, -LinearForm(v)), ReflectNote{v, true}};
}

/// Splits rest/(p1*p2) * Gamma(g) with g = p1+p2+1 into
/// rest*Gamma(g-1)/p1 + rest*Gamma(g-1)/p2 (an exact rational identity via
/// Gamma(g) = (g-1)Gamma(g-1)). The first returned term carries 1/p1.
/// Throws PatternMismatch unless e contains prefactors 1/p1, 1/p2 and the
/// gamma factor Gamma(p1+p2+1).
inline ExprSum partial_fraction_split(const GammaProduct& e, const LinearForm& p1,
                                      const LinearForm& p2) {
    const LinearForm g = p1 + p2 + Rational(1);
    if (e.gamma_power(g) < 1)
        throw PatternMismatch("partial_fraction_split: Gamma(" + g.to_string() +
                              ") with g = p1+p2+1 not present");
    if (e.poly_power(p1) > -1)
        throw PatternMismatch("partial_fraction_split: prefactor 1/(" +
                              p1.to_string() + ") not present");
    if (e.poly_power(p2) > -1)
        throw PatternMismatch("partial_fraction_split: prefactor 1/(" +
                              p2.to_string() + ") not present");
    GammaProduct with_p1 = e; // multiplying by p2 cancels the 1/p2 prefactor
    with_p1.mul_poly(p2, 1);
    with_p1.mul_gamma(g, -1);
    with_p1.mul_gamma(g - Rational(1), 1);
    GammaProduct with_p2 = e;
    with_p2.mul_poly(p1, 1);
    with_p2.mul_gamma(g, -1);
    with_p2.mul_gamma(g - Rational(1), 1);
    return ExprSum(std::vector<GammaProduct>{std::move(with_p1), std::move(with_p2)});
}

/// Numeric value of the product at a point, computed in log space (sum of
/// log_gamma plus logs of prefactors, one final exp) so that ten-gamma
/// products cannot overflow intermediate results.
inline Complex evaluate(const GammaProduct& e, const Assignment& a) {
    if (e.is_zero()) return Complex(0.0, 0.0);
    bool vanishes = false;
    Complex acc(0.0, 0.0);
    for (const auto& f : e.gammas()) {
        const Complex arg = f.arg.evaluate(a);
        if (distance_to_pole(arg) < 1e-12) {
            if (f.power > 0)
                throw PoleError("gamma factor at a pole: Gamma(" +
                                f.arg.to_string() + ")");
            vanishes = true; // 1/Gamma(pole) = 0
            continue;
        }
        acc += static_cast<double>(f.power) * log_gamma(arg);
    }
    for (const auto& [form, p] : e.polys()) {
        const Complex w = form.evaluate(a);
        if (w == Complex(0.0, 0.0)) {
            if (p < 0)
                throw DivisionByZero("prefactor (" + form.to_string() +
                                     ") vanishes in a denominator");
            vanishes = true;
            continue;
        }
        acc += static_cast<double>(p) * std::log(w);
    }
    if (vanishes) return Complex(0.0, 0.0);
    const double sign = e.scalar() < 0 ? -1.0 : 1.0;
    acc += std::log(std::abs(to_double(e.scalar())));
    if (acc.real() > 709.0)
        throw OverflowError("expression value exceeds double range");
    const Complex r = sign * std::exp(acc);
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
        throw OverflowError("expression value is not finite");
    return r;
}

inline Complex evaluate(const ExprSum& e, const Assignment& a) {
    Complex acc(0.0, 0.0);
    for (const auto& t : e.terms()) acc += evaluate(t, a);
    return acc;
}

/// Draws one random assignment for the given symbols inside the region that
/// keeps the studied integrands away from poles: Re in [-0.45,-0.05] for
/// integration variables and u, v; Re in [0.03,0.15] for eps1, eps2;
/// Re in [0.1,0.8] otherwise; Im in [-0.5,0.5] throughout.
inline Assignment sample_assignment(const std::set<Symbol>& symbols,
                                    std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Assignment a;
    for (const Symbol& s : symbols) {
        double re_lo = 0.1, re_hi = 0.8;
        if (s.is_integration_variable() || s.name() == "u" || s.name() == "v") {
            re_lo = -0.45;
            re_hi = -0.05;
        } else if (s.name() == "eps1" || s.name() == "eps2") {
            re_lo = 0.03;
            re_hi = 0.15;
        }
        const double re = re_lo + (re_hi - re_lo) * unit(rng);
        const double im = -0.5 + 1.0 * unit(rng);
        a.emplace(s, Complex(re, im));
    }
    return a;
}

struct EqualityWitness {
    Assignment point;
    Complex lhs;
    Complex rhs;
};

struct EqualityResult {
    bool equal = false;
    std::optional<EqualityWitness> witness; // set when equal == false
};

/// Probabilistic structural-equality oracle: samples n non-singular points
/// and compares |a-b| / max(|a|,|b|,1) against tol. Singular draws are
/// rejected and redrawn (at most 100x oversampling). Symbols listed in
/// `pinned` keep their given values at every sample point instead of being
/// drawn at random.
inline EqualityResult expr_equal_numeric(const ExprSum& a, const ExprSum& b,
                                         int n_samples, double tol,
                                         std::uint64_t seed = 20250814,
                                         const Assignment& pinned = {}) {
    std::set<Symbol> syms = a.symbols();
    {
        auto sb = b.symbols();
        syms.insert(sb.begin(), sb.end());
    }
    for (const auto& kv : pinned) syms.erase(kv.first);
    std::mt19937_64 rng(seed);
    int accepted = 0;
    int draws = 0;
    const int max_draws = 100 * std::max(n_samples, 1);
    while (accepted < n_samples) {
        if (++draws > max_draws)
            throw MbError("expr_equal_numeric: too many singular draws");
        Assignment pt = sample_assignment(syms, rng);
        for (const auto& [s, val] : pinned) pt[s] = val;
        Complex va, vb;
        try {
            va = evaluate(a, pt);
            vb = evaluate(b, pt);
        } catch (const PoleError&) {
            continue;
        } catch (const DivisionByZero&) {
            continue;
        } catch (const OverflowError&) {
            continue;
        }
        ++accepted;
        const double denom = std::max({std::abs(va), std::abs(vb), 1.0});
        if (std::abs(va - vb) / denom >= tol)
            return {false, EqualityWitness{pt, va, vb}};
    }
    return {true, std::nullopt};
}

} // namespace mb
