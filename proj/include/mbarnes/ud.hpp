#pragma once

#include "mbarnes/expr.hpp"
#include "mbarnes/symbol.hpp"

namespace mb {

/// Analytic-regularization parameters. Only the first two are stored; the
/// third is derived so that eps1 + eps2 + eps3 = 0 holds identically and can
/// never drift out of sync.
struct RegTriple {
    LinearForm eps1 = LinearForm(sym("eps1"));
    LinearForm eps2 = LinearForm(sym("eps2"));

    LinearForm eps3() const { return -(eps1 + eps2); }

    static RegTriple symbolic() { return RegTriple{}; }
};

/// Parameters of the triangle MB transform D^{(mb1,mb2)}[nu1,nu2,nu3]:
/// two MB variables, three indices, and the spacetime dimension (kept as a
/// linear form; the identity this engine targets lives at dim = 4).
struct DParams {
    LinearForm mb1;
    LinearForm mb2;
    LinearForm nu1;
    LinearForm nu2;
    LinearForm nu3;
    LinearForm dim = LinearForm(Rational(4));
};

/// D^{(mb1,mb2)}[nu1,nu2,nu3] =
///   Gamma(-mb1) Gamma(-mb2) Gamma(-mb1-nu2-nu3+d/2) Gamma(-mb2-nu1-nu3+d/2)
///   * Gamma(mb1+mb2+nu3) Gamma(nu1+nu2+nu3-d/2+mb1+mb2)
///   / (Gamma(nu1) Gamma(nu2) Gamma(nu3) Gamma(d-nu1-nu2-nu3))
inline GammaProduct build_D(const DParams& p) {
    const LinearForm half_d = p.dim * Rational(1, 2);
    const LinearForm sum_nu = p.nu1 + p.nu2 + p.nu3;
    GammaProduct out;
    out.mul_gamma(-p.mb1);
    out.mul_gamma(-p.mb2);
    out.mul_gamma(-p.mb1 - p.nu2 - p.nu3 + half_d);
    out.mul_gamma(-p.mb2 - p.nu1 - p.nu3 + half_d);
    out.mul_gamma(p.mb1 + p.mb2 + p.nu3);
    out.mul_gamma(sum_nu - half_d + p.mb1 + p.mb2);
    out.mul_gamma(p.nu1, -1);
    out.mul_gamma(p.nu2, -1);
    out.mul_gamma(p.nu3, -1);
    out.mul_gamma(p.dim - sum_nu, -1);
    return out;
}

/// Shorthand D^{(a,b)}[1+nu] == D^{(a,b)}[1, 1, 1+nu] at dimension 4.
inline GammaProduct build_D_short(const Symbol& a, const Symbol& b,
                                  const LinearForm& nu,
                                  [[maybe_unused]] const RegTriple& reg) {
    DParams p;
    p.mb1 = LinearForm(a);
    p.mb2 = LinearForm(b);
    p.nu1 = LinearForm(Rational(1));
    p.nu2 = LinearForm(Rational(1));
    p.nu3 = LinearForm(Rational(1)) + nu;
    return build_D(p);
}

/// J = Gamma(1-eps1) Gamma(1-eps2) Gamma(1-eps3)
///     / (Gamma(1+eps1) Gamma(1+eps2) Gamma(1+eps3))
inline GammaProduct build_J(const RegTriple& reg) {
    const LinearForm one(Rational(1));
    const LinearForm e3 = reg.eps3();
    GammaProduct out;
    out.mul_gamma(one - reg.eps1);
    out.mul_gamma(one - reg.eps2);
    out.mul_gamma(one - e3);
    out.mul_gamma(one + reg.eps1, -1);
    out.mul_gamma(one + reg.eps2, -1);
    out.mul_gamma(one + e3, -1);
    return out;
}

/// The two-fold integrand: the product of
///   D^{(z2,z3)}[1+eps2, 1+eps1, 1+eps3] and
///   D^{(u,v)}[1+eps1-z3, 1+eps2-z2, 1+eps3],
/// normalized. The cancellation of Gamma(1+z2+z3) and the collapse of
/// Gamma(eps1-z3)/Gamma(1+eps1-z3) into the 1/(eps1-z3) prefactor (and its
/// z2 twin) fall out of the canonical form and the recurrence contraction;
/// nothing here is transcribed from the collapsed display.
inline GammaProduct build_lhs_integrand(const RegTriple& reg) {
    const LinearForm one(Rational(1));
    const LinearForm e3 = reg.eps3();

    DParams inner; // MB variables z2, z3
    inner.mb1 = LinearForm(sym("z2"));
    inner.mb2 = LinearForm(sym("z3"));
    inner.nu1 = one + reg.eps2;
    inner.nu2 = one + reg.eps1;
    inner.nu3 = one + e3;

    DParams outer; // MB variables u, v with z-shifted indices
    outer.mb1 = LinearForm(sym("u"));
    outer.mb2 = LinearForm(sym("v"));
    outer.nu1 = one + reg.eps1 - LinearForm(sym("z3"));
    outer.nu2 = one + reg.eps2 - LinearForm(sym("z2"));
    outer.nu3 = one + e3;

    GammaProduct im = build_D(outer);
    im.mul(build_D(inner));
    return normalize(im);
}

/// The three-term closed form:
///   J [ D^{(u,v-eps2)}[1-eps1]/(eps2 eps3)
///     + D^{(u,v)}[1+eps3]/(eps1 eps2)
///     + D^{(u-eps1,v)}[1-eps2]/(eps1 eps3) ].
/// The shifted-variable D's are produced by substitution into the unshifted
/// builder so the transform display has a single source of truth.
inline ExprSum build_rhs_terms(const RegTriple& reg) {
    const Symbol u = sym("u");
    const Symbol v = sym("v");
    const LinearForm e1 = reg.eps1;
    const LinearForm e2 = reg.eps2;
    const LinearForm e3 = reg.eps3();
    const GammaProduct J = build_J(reg);

    GammaProduct shifted_v = substitute(build_D_short(u, v, -e1, reg), v,
                                        LinearForm(v) - e2);
    shifted_v.mul(J);
    shifted_v.mul_poly(e2, -1);
    shifted_v.mul_poly(e3, -1);

    GammaProduct central = build_D_short(u, v, e3, reg);
    central.mul(J);
    central.mul_poly(e1, -1);
    central.mul_poly(e2, -1);

    GammaProduct shifted_u = substitute(build_D_short(u, v, -e2, reg), u,
                                        LinearForm(u) - e1);
    shifted_u.mul(J);
    shifted_u.mul_poly(e1, -1);
    shifted_u.mul_poly(e3, -1);

    return ExprSum(std::vector<GammaProduct>{std::move(shifted_v),
                                             std::move(central),
                                             std::move(shifted_u)});
}

} // namespace mb
