#pragma once

#include <utility>

#include "mbarnes/barnes.hpp"
#include "mbarnes/trace.hpp"
#include "mbarnes/ud.hpp"

namespace mb {

struct ReduceResult {
    ExprSum terms;
    ProofTrace trace;
};

namespace detail {

/// One split branch: consume the inner fold with the first lemma, turn the
/// surviving 1/(eps - z) prefactor into its gamma form, mirror the contour
/// of the remaining variable, and close the fold with the second lemma.
inline GammaProduct run_lemma_branch(const GammaProduct& branch,
                                     const Symbol& inner_var,
                                     const Symbol& outer_var, ProofTrace& trace) {
    GammaProduct after_first = apply_barnes_first(branch, inner_var);
    trace.steps.push_back({.rule = "barnes-first",
                           .input = ExprSum(branch),
                           .output = ExprSum(after_first),
                           .variable = inner_var});

    GammaProduct absorbed = normalize(after_first, true);
    trace.steps.push_back({.rule = "absorb",
                           .input = ExprSum(after_first),
                           .output = ExprSum(absorbed)});

    GammaProduct reflected = reflect_variable(absorbed, outer_var).first;
    trace.steps.push_back({.rule = "reflect",
                           .input = ExprSum(absorbed),
                           .output = ExprSum(reflected),
                           .variable = outer_var});

    GammaProduct closed = apply_barnes_second(reflected, outer_var);
    trace.steps.push_back({.rule = "barnes-second",
                           .input = ExprSum(reflected),
                           .output = ExprSum(closed),
                           .variable = outer_var});
    return closed;
}

} // namespace detail

/// Reduces the two-fold integrand to the three-term closed form and records
/// the certificate:
///   (a) right residues at z2 = eps2 and z3 = eps1 (the central term);
///   (b) the partial-fraction split of the shared gamma factor;
///   (c) the 1/(z2-eps2) branch via first lemma in z3, prefactor
///       absorption, z2 reflection, second lemma in z2;
///   (d) the mirrored branch with the variable roles swapped.
/// Requires generic regularization parameters (distinct, nonzero).
inline ReduceResult reduce_identity_lhs(const RegTriple& reg) {
    const Symbol z2 = sym("z2");
    const Symbol z3 = sym("z3");
    ProofTrace trace;
    const GammaProduct im = build_lhs_integrand(reg);

    const GammaProduct r1 = take_right_residue(im, z2, reg.eps2);
    trace.steps.push_back({.rule = "residue",
                           .input = ExprSum(im),
                           .output = ExprSum(r1),
                           .variable = z2,
                           .pole = reg.eps2,
                           .residues = {{z2, reg.eps2, r1}}});

    const GammaProduct central = take_right_residue(r1, z3, reg.eps1);
    trace.steps.push_back({.rule = "residue",
                           .input = ExprSum(r1),
                           .output = ExprSum(central),
                           .variable = z3,
                           .pole = reg.eps1,
                           .residues = {{z3, reg.eps1, central}}});

    const LinearForm p1 = LinearForm(z3) - reg.eps1;
    const LinearForm p2 = LinearForm(z2) - reg.eps2;
    const ExprSum split = partial_fraction_split(im, p1, p2);
    trace.steps.push_back({.rule = "split",
                           .input = ExprSum(im),
                           .output = split,
                           .part1 = p1,
                           .part2 = p2});

    const GammaProduct* keeps_z2_pole = nullptr;
    const GammaProduct* keeps_z3_pole = nullptr;
    for (const auto& t : split.terms()) {
        if (t.poly_power(p2) < 0)
            keeps_z2_pole = &t;
        else if (t.poly_power(p1) < 0)
            keeps_z3_pole = &t;
    }
    if (!keeps_z2_pole || !keeps_z3_pole)
        throw PatternMismatch("reduce_identity_lhs: split did not yield one branch "
                              "per surviving prefactor");

    const GammaProduct shifted_u = detail::run_lemma_branch(*keeps_z2_pole, z3, z2, trace);
    const GammaProduct shifted_v = detail::run_lemma_branch(*keeps_z3_pole, z2, z3, trace);

    return {ExprSum(std::vector<GammaProduct>{central, shifted_u, shifted_v}),
            std::move(trace)};
}

} // namespace mb
