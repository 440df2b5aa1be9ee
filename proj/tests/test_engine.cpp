// Rewrite engine: pole classification, contour selection, the two Barnes
// lemma rewrites, right-residue extraction, and the full reduction with its
// replayable proof trace.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "mbarnes/poles.hpp"
#include "mbarnes/reduce.hpp"
#include "test_support.hpp"

using namespace mb;
using mbtest::close;

namespace {

const Symbol kU = sym("u");
const Symbol kV = sym("v");
const Symbol kZ = sym("z");
const Symbol kZ2 = sym("z2");
const Symbol kZ3 = sym("z3");
const Symbol kE1 = sym("eps1");
const Symbol kE2 = sym("eps2");

const LinearForm one(Rational(1));
const LinearForm u_(kU);
const LinearForm v_(kV);
const LinearForm z_(kZ);
const LinearForm z2_(kZ2);
const LinearForm z3_(kZ3);
const LinearForm e1_(kE1);
const LinearForm e2_(kE2);
const LinearForm e3_ = -(e1_ + e2_);

LinearForm lam(int i) { return LinearForm(sym("lambda" + std::to_string(i))); }

std::map<Symbol, double> headline_params() {
    return {{kU, -0.4}, {kV, -0.4}, {kE1, 0.1}, {kE2, 0.07}};
}

} // namespace

TEST_CASE("pole families of gamma factors") {
    GammaProduct e;
    e.mul_gamma(-z2_).mul_gamma(e2_ - z2_).mul_gamma(-u_ + e1_ + z2_);
    const auto fams = classify_poles(e, kZ2);
    REQUIRE(fams.size() == 3);

    int rights = 0, lefts = 0;
    for (const auto& f : fams) {
        CHECK(f.variable == kZ2);
        CHECK_FALSE(f.from_prefactor);
        if (f.side == PoleFamily::Side::Right) {
            ++rights;
            CHECK((f.base == LinearForm() || f.base == e2_));
        } else {
            ++lefts;
            CHECK(f.base == e1_ - u_);
        }
    }
    CHECK(rights == 2);
    CHECK(lefts == 1);

    GammaProduct left_only;
    left_only.mul_gamma(z_);
    const auto lf = classify_poles(left_only, kZ);
    REQUIRE(lf.size() == 1);
    CHECK(lf[0].side == PoleFamily::Side::Left);
    CHECK(lf[0].base == LinearForm());

    GammaProduct bad;
    bad.mul_gamma(z_ * Rational(2) + 1);
    CHECK_THROWS_AS(classify_poles(bad, kZ), PatternMismatch);
}

TEST_CASE("pole families of rational prefactors") {
    GammaProduct e;
    e.mul_poly(e2_ - z2_, -1);   // simple right pole at z2 = eps2
    e.mul_poly(z2_ + u_, -1);    // simple left pole at z2 = -u
    e.mul_gamma(one + z2_, -1);  // 1/Gamma never contributes poles
    const auto fams = classify_poles(e, kZ2);
    REQUIRE(fams.size() == 2);
    for (const auto& f : fams) {
        CHECK(f.from_prefactor);
        if (f.side == PoleFamily::Side::Right)
            CHECK(f.base == e2_);
        else
            CHECK(f.base == u_); // pole at z2 = -base = -u
    }
}

TEST_CASE("contour choice on the two-fold integrand") {
    const RegTriple reg;
    const GammaProduct im = build_lhs_integrand(reg);
    const auto params = headline_params();

    const ContourSpec spec = choose_contour(im, params);
    REQUIRE(spec.admissible);
    CHECK(spec.violated.empty());
    // First variable sees the window (-0.5, 0) from Gamma(-z2) and
    // Gamma(eps1+z2-u); the second lands inside (-0.47, 0).
    CHECK(spec.offsets.at(kZ2) == Catch::Approx(-0.25));
    CHECK(spec.offsets.at(kZ3) < 0.0);
    CHECK(spec.offsets.at(kZ3) > -0.47);

    // The hand-picked offsets (-0.2, -0.2) live in the same admissible region.
    CHECK(check_contour(im, {{kZ2, -0.2}, {kZ3, -0.2}}, params).admissible);
}

TEST_CASE("contour violations are reported with their real parts") {
    const RegTriple reg;
    const GammaProduct im = build_lhs_integrand(reg);
    const ContourSpec bad =
        check_contour(im, {{kZ2, -0.6}, {kZ3, -0.6}}, headline_params());
    REQUIRE_FALSE(bad.admissible);
    bool found = false;
    for (const auto& viol : bad.violated)
        if (viol.arg == e1_ + z2_ - u_) {
            found = true;
            CHECK(viol.real_part == Catch::Approx(-0.1));
        }
    CHECK(found);
}

TEST_CASE("contour choice degenerate cases") {
    GammaProduct b1;
    b1.mul_gamma(z_ + Rational(1, 2), 2).mul_gamma(LinearForm(Rational(1, 2)) - z_, 2);
    const ContourSpec s = choose_contour(b1, {});
    REQUIRE(s.admissible);
    CHECK(s.offsets.at(kZ) == Catch::Approx(0.0).margin(1e-15));

    GammaProduct infeasible;
    infeasible.mul_gamma(-z_).mul_gamma(z_ - 1);
    const ContourSpec f = choose_contour(infeasible, {});
    CHECK_FALSE(f.admissible);
    CHECK_FALSE(f.violated.empty());
}

TEST_CASE("first lemma closed form") {
    GammaProduct half;
    half.mul_gamma(z_ + Rational(1, 2), 2)
        .mul_gamma(LinearForm(Rational(1, 2)) - z_, 2);
    const GammaProduct r = apply_barnes_first(half, kZ);
    CHECK(r == GammaProduct::from_scalar(1));

    // The inner fold of the branch that keeps the z2 prefactor:
    GammaProduct chain;
    chain.mul_gamma(-z3_);
    chain.mul_gamma(z2_ + z3_ + e3_);
    chain.mul_gamma(e2_ - v_ + z3_);
    chain.mul_gamma(one - z2_ - z3_ + u_ + v_);
    GammaProduct want;
    want.mul_gamma(z2_ + e3_);
    want.mul_gamma(e2_ - v_);
    want.mul_gamma(one + e3_ + u_ + v_);
    want.mul_gamma(one + e2_ + u_ - z2_);
    want.mul_gamma(one + u_ - e1_, -1);
    CHECK(apply_barnes_first(chain, kZ3) == want);

    // Spectator content rides along untouched.
    GammaProduct spect = chain;
    spect.mul_scalar(Rational(3, 2));
    spect.mul_gamma(u_ + v_, 1);
    spect.mul_poly(e1_, -1);
    GammaProduct want2 = want;
    want2.mul_scalar(Rational(3, 2));
    want2.mul_gamma(u_ + v_, 1);
    want2.mul_poly(e1_, -1);
    CHECK(apply_barnes_first(spect, kZ3) == want2);
}

TEST_CASE("first lemma numeric cross-check") {
    GammaProduct e;
    e.mul_gamma(z_ + Rational(3, 10));
    e.mul_gamma(z_ + Rational(2, 5));
    e.mul_gamma(LinearForm(Rational(1, 2)) - z_);
    e.mul_gamma(LinearForm(Rational(3, 5)) - z_);
    const Complex closed = evaluate(apply_barnes_first(e, kZ), {});
    CHECK(close(closed, {1.427459128741526223386, 0.0}, 1e-13));

    // Complex parameters enter through symbols.
    GammaProduct s;
    s.mul_gamma(lam(1) + z_).mul_gamma(lam(2) + z_);
    s.mul_gamma(lam(3) - z_).mul_gamma(lam(4) - z_);
    Assignment at;
    at[sym("lambda1")] = Complex(0.3, 0.1);
    at[sym("lambda2")] = Complex(0.4, -0.2);
    at[sym("lambda3")] = Complex(0.5, 0.05);
    at[sym("lambda4")] = Complex(0.6, 0.3);
    CHECK(close(evaluate(apply_barnes_first(s, kZ), at),
                {1.086372971720037826764, -0.5004974131599245732641}, 1e-13));
}

TEST_CASE("first lemma pattern guards") {
    GammaProduct squared;
    squared.mul_gamma(z_ + Rational(1, 2), 2).mul_gamma(LinearForm(Rational(1, 2)) - z_, 1);
    CHECK_THROWS_AS(apply_barnes_first(squared, kZ), PatternMismatch);

    GammaProduct three_one;
    three_one.mul_gamma(z_ + 1).mul_gamma(z_ + 2).mul_gamma(z_ + 3)
        .mul_gamma(one - z_);
    CHECK_THROWS_AS(apply_barnes_first(three_one, kZ), PatternMismatch);

    GammaProduct coeff2;
    coeff2.mul_gamma(z_ * Rational(2) + 1).mul_gamma(z_ + 1)
        .mul_gamma(one - z_).mul_gamma(LinearForm(Rational(2)) - z_);
    CHECK_THROWS_AS(apply_barnes_first(coeff2, kZ), PatternMismatch);

    GammaProduct in_poly;
    in_poly.mul_gamma(z_ + Rational(1, 2), 1)
        .mul_gamma(z_ + Rational(2, 5), 1)
        .mul_gamma(LinearForm(Rational(1, 2)) - z_, 1)
        .mul_gamma(LinearForm(Rational(3, 5)) - z_, 1)
        .mul_poly(z_ - Rational(1, 4), -1);
    CHECK_THROWS_AS(apply_barnes_first(in_poly, kZ), PatternMismatch);
}

TEST_CASE("second lemma closed form") {
    GammaProduct half;
    half.mul_gamma(z_ + Rational(1, 2), 3)
        .mul_gamma(LinearForm(Rational(1, 2)) - z_, 2)
        .mul_gamma(z_ + Rational(5, 2), -1);
    CHECK(apply_barnes_second(half, kZ) == GammaProduct::from_scalar(1));

    // The reflected outer fold of the same branch:
    GammaProduct chain;
    chain.mul_gamma(z2_);
    chain.mul_gamma(z2_ + e2_);
    chain.mul_gamma(one + e2_ + u_ + z2_);
    chain.mul_gamma(e3_ - z2_);
    chain.mul_gamma(e1_ - u_ - z2_);
    chain.mul_gamma(one + z2_ + e2_, -1);
    GammaProduct want;
    want.mul_gamma(e3_);
    want.mul_gamma(-e1_);
    want.mul_gamma(one + u_ - e1_);
    want.mul_gamma(-u_ - e3_);
    want.mul_gamma(e1_ - u_);
    want.mul_gamma(one - e3_);
    want.mul_gamma(-u_, -1);
    want.mul_gamma(one + e2_, -1);
    CHECK(apply_barnes_second(chain, kZ2) == want);
}

TEST_CASE("second lemma enforces the denominator sum rule") {
    GammaProduct bad;
    bad.mul_gamma(z_ + Rational(1, 2), 3)
        .mul_gamma(LinearForm(Rational(1, 2)) - z_, 2)
        .mul_gamma(z_ + Rational(5, 2) + Rational(1, 10), -1);
    CHECK_THROWS_AS(apply_barnes_second(bad, kZ), PatternMismatch);

    GammaProduct no_denominator;
    no_denominator.mul_gamma(z_ + Rational(1, 2), 3)
        .mul_gamma(LinearForm(Rational(1, 2)) - z_, 2);
    CHECK_THROWS_AS(apply_barnes_second(no_denominator, kZ), PatternMismatch);
}

TEST_CASE("second lemma numeric cross-check") {
    GammaProduct e;
    e.mul_gamma(z_ + Rational(1, 5));
    e.mul_gamma(z_ + Rational(3, 10));
    e.mul_gamma(z_ + Rational(2, 5));
    e.mul_gamma(LinearForm(Rational(1, 2)) - z_);
    e.mul_gamma(LinearForm(Rational(3, 5)) - z_);
    e.mul_gamma(z_ + Rational(2), -1); // 0.2+0.3+0.4+0.5+0.6 = 2
    const Complex closed = evaluate(apply_barnes_second(e, kZ), {});
    CHECK(close(closed, {2.657065766987783898923, 0.0}, 1e-13));
}

TEST_CASE("lemma rewrites never fire on perturbed shapes") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        GammaProduct b1;
        b1.mul_gamma(lam(1) + z_).mul_gamma(lam(2) + z_);
        b1.mul_gamma(lam(3) - z_).mul_gamma(lam(4) - z_);
        GammaProduct b2 = b1;
        b2.mul_gamma(lam(5) + z_);
        b2.mul_gamma(lam(1) + lam(2) + lam(3) + lam(4) + lam(5) + z_, -1);

        switch (trial % 4) {
        case 0:
            b1.mul_gamma(lam(1) + z_); // power 2
            b2.mul_gamma(lam(5) + z_);
            break;
        case 1:
            b1.mul_gamma(lam(5) + z_); // extra rising factor
            b2.mul_gamma(sym("a") + z_);
            break;
        case 2:
            b1.mul_poly(z_ - Rational(1, 2), -1); // variable in a prefactor
            b2.mul_poly(z_ - Rational(1, 2), -1);
            break;
        case 3:
            b1.mul_gamma(z_ * Rational(2) + lam(5)); // non-unit coefficient
            b2.mul_gamma(lam(1) + lam(2) + lam(3) + lam(4) + lam(5) + z_ +
                             Rational(1, 7),
                         -1); // broken sum rule (second denominator factor)
            break;
        }
        CHECK_THROWS_AS(apply_barnes_first(b1, kZ), PatternMismatch);
        CHECK_THROWS_AS(apply_barnes_second(b2, kZ), PatternMismatch);
    }
}

TEST_CASE("right residues substitute the remaining factors") {
    GammaProduct e;
    e.mul_gamma(e1_ - z3_).mul_gamma(u_ + z3_).mul_gamma(v_ - z3_);

    GammaProduct at0;
    at0.mul_gamma(u_ + e1_).mul_gamma(v_ - e1_);
    CHECK(take_right_residue(e, kZ3, e1_) == at0);

    // n = 1 member: weight -1/1!.
    GammaProduct at1;
    at1.mul_gamma(u_ + e1_ + 1).mul_gamma(v_ - e1_ - 1);
    at1.mul_scalar(Rational(-1));
    CHECK(take_right_residue(e, kZ3, e1_ + 1) == at1);

    // Prefactor pole.
    GammaProduct p;
    p.mul_poly(e1_ - z3_, -1).mul_gamma(u_ + z3_);
    GammaProduct pw;
    pw.mul_gamma(u_ + e1_);
    CHECK(take_right_residue(p, kZ3, e1_) == pw);
}

TEST_CASE("right residue guards") {
    GammaProduct left;
    left.mul_gamma(z3_ + u_).mul_gamma(e1_ - z3_);
    CHECK_THROWS_AS(take_right_residue(left, kZ3, -u_), NotARightPole);

    GammaProduct e;
    e.mul_gamma(e1_ - z3_);
    CHECK_THROWS_AS(take_right_residue(e, kZ3, LinearForm(Rational(1, 2))),
                    NotARightPole);

    GammaProduct dbl;
    dbl.mul_gamma(e1_ - z3_, 2);
    CHECK_THROWS_AS(take_right_residue(dbl, kZ3, e1_), HigherOrderPole);

    GammaProduct mixed;
    mixed.mul_gamma(e1_ - z3_).mul_poly(e1_ - z3_, -1);
    CHECK_THROWS_AS(take_right_residue(mixed, kZ3, e1_), HigherOrderPole);
}

TEST_CASE("welding constant for the contour-shift experiment") {
    GammaProduct e;
    e.mul_gamma(z_ + Rational(1, 2));
    e.mul_gamma(z_ + Rational(1, 5));
    e.mul_gamma(LinearForm(Rational(3, 10)) - z_);
    e.mul_gamma(LinearForm(Rational(2, 5)) - z_);
    const GammaProduct r = take_right_residue(e, kZ, LinearForm(Rational(3, 10)));
    GammaProduct want;
    want.mul_gamma(LinearForm(Rational(4, 5)));
    want.mul_gamma(LinearForm(Rational(1, 2)));
    want.mul_gamma(LinearForm(Rational(1, 10)));
    CHECK(r == want);
    CHECK(close(evaluate(r, {}), {19.63153639756455746646, 0.0}, 1e-13));
}

TEST_CASE("double residue reproduces the central closed-form term") {
    const RegTriple reg;
    const GammaProduct im = build_lhs_integrand(reg);
    const GammaProduct central =
        take_right_residue(take_right_residue(im, kZ2, e2_), kZ3, e1_);

    const ExprSum rhs = build_rhs_terms(reg);
    const GammaProduct* want = nullptr;
    for (const auto& t : rhs.terms())
        if (t.poly_power(e1_) == -1 && t.poly_power(e2_) == -1) want = &t;
    REQUIRE(want != nullptr);
    CHECK(expr_equal_numeric(ExprSum(central), ExprSum(*want), 30, 1e-10, 606).equal);
}

TEST_CASE("full reduction produces the three-term closed form with a trace") {
    const RegTriple reg;
    const ReduceResult red = reduce_identity_lhs(reg);

    REQUIRE(red.terms.terms().size() == 3);
    const std::vector<std::string> expected_rules = {
        "residue", "residue",       "split",   "barnes-first",
        "absorb",  "reflect",       "barnes-second",
        "barnes-first", "absorb",   "reflect", "barnes-second"};
    REQUIRE(red.trace.steps.size() == expected_rules.size());
    for (std::size_t i = 0; i < expected_rules.size(); ++i)
        CHECK(red.trace.steps[i].rule == expected_rules[i]);
    CHECK(red.trace.count_rule("barnes-first") == 2);
    CHECK(red.trace.count_rule("barnes-second") == 2);
    CHECK(red.trace.count_rule("reflect") == 2);
    CHECK(red.trace.count_rule("split") == 1);

    const auto residues = red.trace.residues_collected();
    REQUIRE(residues.size() == 2);
    CHECK(residues[0].variable == kZ2);
    CHECK(residues[0].pole == e2_);
    CHECK(residues[1].variable == kZ3);
    CHECK(residues[1].pole == e1_);

    CHECK(expr_equal_numeric(red.terms, build_rhs_terms(reg), 50, 1e-10).equal);
}

TEST_CASE("proof trace replays and serializes deterministically") {
    const RegTriple reg;
    const ReduceResult red = reduce_identity_lhs(reg);
    CHECK(replay_trace(red.trace));

    const std::string text = red.trace.serialize();
    CHECK(text.find("step 1: residue") != std::string::npos);
    CHECK(text.find("step 3: split") != std::string::npos);
    CHECK(text.find("variable: z2") != std::string::npos);
    CHECK(text == reduce_identity_lhs(reg).trace.serialize());

    // A tampered step no longer replays.
    ProofTrace broken = red.trace;
    broken.steps[1].output = ExprSum(GammaProduct::from_scalar(2));
    CHECK_FALSE(replay_trace(broken));
}
