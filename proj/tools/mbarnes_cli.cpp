// Command-line front end for the Mellin-Barnes engine: closed-form checks of
// the two Barnes lemmas, the symbolic two-fold reduction with its proof
// trace, the end-to-end numeric verification, and a point evaluator for
// serialized expressions.
//
// Exit codes: 0 success, 1 usage/parse error, 2 infeasible or degenerate
// input (no admissible contour, singular prefactors), 3 evaluation budget
// exhausted, 4 expression does not match the rewrite pattern.

#include <algorithm>
#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbarnes/barnes.hpp"
#include "mbarnes/expr_io.hpp"
#include "mbarnes/quadrature.hpp"
#include "mbarnes/reduce.hpp"
#include "mbarnes/trace.hpp"
#include "mbarnes/ud.hpp"
#include "mbarnes/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;
constexpr int kExitPattern = 4;

/// Parses "a", "ai", "a+bi", "a-bi" (also accepting trailing 'j') into a
/// complex number. Throws mb::ParseError on malformed input.
mb::Complex parse_complex(const std::string& text) {
    const std::string err = "not a complex literal: '" + text + "'";
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw mb::ParseError(err);

    auto read_number = [&](std::size_t& pos) -> double {
        const char* start = s.c_str() + pos;
        char* end = nullptr;
        const double val = std::strtod(start, &end);
        if (end == start) throw mb::ParseError(err);
        pos += static_cast<std::size_t>(end - start);
        return val;
    };

    std::size_t pos = 0;
    double first = 1.0;
    bool first_explicit = false;
    // Leading sign with a bare imaginary unit ("i", "-i") has no digits.
    if (s[pos] == 'i' || s[pos] == 'j') {
        first = 1.0;
    } else if ((s[pos] == '+' || s[pos] == '-') &&
               pos + 1 < s.size() && (s[pos + 1] == 'i' || s[pos + 1] == 'j')) {
        first = (s[pos] == '-') ? -1.0 : 1.0;
        ++pos;
    } else {
        first = read_number(pos);
        first_explicit = true;
    }
    if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'j')) {
        ++pos;
        if (pos != s.size()) throw mb::ParseError(err);
        return {0.0, first};
    }
    if (!first_explicit) throw mb::ParseError(err);
    if (pos == s.size()) return {first, 0.0};

    // Second addend must be imaginary: "+bi", "-i", ...
    double second = 1.0;
    if ((s[pos] == '+' || s[pos] == '-') &&
        pos + 1 < s.size() && (s[pos + 1] == 'i' || s[pos + 1] == 'j')) {
        second = (s[pos] == '-') ? -1.0 : 1.0;
        ++pos;
    } else {
        second = read_number(pos);
    }
    if (pos >= s.size() || (s[pos] != 'i' && s[pos] != 'j'))
        throw mb::ParseError(err);
    ++pos;
    if (pos != s.size()) throw mb::ParseError(err);
    return {first, second};
}

/// Splits "name=value" bindings into an assignment.
mb::Assignment parse_bindings(const std::vector<std::string>& defs) {
    mb::Assignment out;
    for (const auto& def : defs) {
        const auto eq = def.find('=');
        if (eq == std::string::npos)
            throw mb::ParseError("binding must look like name=value: '" + def + "'");
        out[mb::sym(def.substr(0, eq))] = parse_complex(def.substr(eq + 1));
    }
    return out;
}

int run_barnes(int order, const std::vector<std::string>& lambda_text, double tol,
               long max_evals) {
    using namespace mb;
    const std::size_t need = (order == 1) ? 4 : 5;
    if (lambda_text.size() != need)
        throw ParseError("barnes lemma " + std::to_string(order) + " needs " +
                         std::to_string(need) + " parameters");
    std::vector<Complex> lam;
    for (const auto& t : lambda_text) lam.push_back(parse_complex(t));

    const Symbol z = sym("z");
    Assignment bound;
    std::map<Symbol, double> param_re;
    GammaProduct integrand = GammaProduct::from_scalar(1);
    LinearForm total;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const Symbol li = sym("lambda" + std::to_string(i + 1));
        bound[li] = lam[i];
        param_re[li] = lam[i].real();
        total += LinearForm(li);
        // First lemma: two + and two - factors. Second: three + and two -.
        const bool plus_side = (order == 1) ? (i < 2) : (i < 3);
        integrand = integrand.mul_gamma(
            plus_side ? LinearForm(li) + LinearForm(z) : LinearForm(li) - LinearForm(z),
            1);
    }
    if (order == 2) integrand = integrand.mul_gamma(total + LinearForm(z), -1);

    const ContourSpec spec = choose_contour(integrand, param_re);
    if (!spec.admissible) {
        std::cout << "no admissible contour: "
                  << detail::admissibility_complaint(spec) << "\n";
        return kExitInfeasible;
    }

    const GammaProduct closed = (order == 1) ? apply_barnes_first(integrand, z)
                                             : apply_barnes_second(integrand, z);
    QuadConfig cfg = QuadConfig::one_fold();
    cfg.rel_tol = tol;
    if (max_evals > 0) cfg.max_evaluations = max_evals;
    const QuadResult numeric = integrate_one(integrand, z, spec, bound, cfg);
    const Complex exact = evaluate(closed, bound);
    const double rel = std::abs(numeric.value - exact) / std::abs(exact);

    std::cout << "barnes lemma " << order << " at offset " << spec.offsets.at(z)
              << "\n";
    std::cout << "  quadrature  = " << format_complex(numeric.value) << " +- "
              << numeric.abs_error_estimate << "\n";
    std::cout << "  closed form = " << format_complex(exact) << "\n";
    std::cout << "  closed-form expression: " << to_string(closed) << "\n";
    std::cout << "quad_re=" << numeric.value.real() << "\n";
    std::cout << "quad_im=" << numeric.value.imag() << "\n";
    std::cout << "closed_re=" << exact.real() << "\n";
    std::cout << "closed_im=" << exact.imag() << "\n";
    std::cout << "rel_error=" << rel << "\n";
    std::cout << "evaluations=" << numeric.evaluations << "\n";
    std::cout << "status=" << (rel < 10.0 * tol ? "pass" : "fail") << "\n";
    return rel < 10.0 * tol ? kExitOk : kExitInfeasible;
}

int run_reduce(const std::string& eps1_text, const std::string& eps2_text,
               const std::string& trace_path, std::uint64_t seed) {
    using namespace mb;
    const Complex e1 = parse_complex(eps1_text);
    const Complex e2 = parse_complex(eps2_text);

    const RegTriple reg; // reduction is symbolic; the values pin the check
    const ReduceResult red = reduce_identity_lhs(reg);
    const ExprSum rhs = build_rhs_terms(reg);

    Assignment pinned;
    pinned[sym("eps1")] = e1;
    pinned[sym("eps2")] = e2;
    const EqualityResult eq = expr_equal_numeric(red.terms, rhs, 50, 1e-10, seed, pinned);

    const std::string serialized = red.trace.serialize();
    if (!trace_path.empty()) {
        std::ofstream out(trace_path);
        if (!out) throw MbError("cannot write trace file: " + trace_path);
        out << serialized;
        std::cout << "trace written to " << trace_path << "\n";
    } else {
        std::cout << serialized;
    }

    std::cout << "reduced to " << red.terms.terms().size() << " terms:\n";
    for (const auto& t : red.terms.terms())
        std::cout << "  " << to_string(t) << "\n";
    std::cout << "replay=" << (replay_trace(red.trace) ? "ok" : "mismatch") << "\n";
    std::cout << "equality_samples=50\n";
    std::cout << "equal=" << (eq.equal ? "yes" : "no") << "\n";
    if (!eq.equal && eq.witness) {
        std::cout << "witness_lhs=" << format_complex(eq.witness->lhs) << "\n";
        std::cout << "witness_rhs=" << format_complex(eq.witness->rhs) << "\n";
    }
    std::cout << "status=" << (eq.equal ? "pass" : "fail") << "\n";
    return eq.equal ? kExitOk : kExitInfeasible;
}

int run_verify_cmd(const std::string& eps1_text, const std::string& eps2_text,
                   const std::string& u_text, const std::string& v_text,
                   const std::vector<double>& offsets, double tol, long max_evals) {
    using namespace mb;
    std::optional<std::pair<double, double>> off;
    if (!offsets.empty()) {
        if (offsets.size() != 2)
            throw ParseError("--offsets needs exactly two values: Re z2, Re z3");
        off = std::make_pair(offsets[0], offsets[1]);
    }
    QuadConfig cfg = QuadConfig::two_fold();
    // Integrate two decades below the pass/fail tolerance so the quadrature
    // error never decides the verdict.
    cfg.rel_tol = std::clamp(tol / 100.0, 1e-10, 1e-3);
    if (max_evals > 0) cfg.max_evaluations = max_evals;

    const VerificationReport rep =
        run_verify(parse_complex(eps1_text), parse_complex(eps2_text),
                   parse_complex(u_text), parse_complex(v_text), off, cfg, tol);
    std::cout << rep.to_text();
    std::cout << "status=" << (rep.passed() ? "pass" : "fail") << "\n";
    return rep.passed() ? kExitOk : kExitInfeasible;
}

int run_eval(const std::string& expr_text, const std::vector<std::string>& defs) {
    using namespace mb;
    const ExprSum e = parse_expr(expr_text);
    const Assignment at = parse_bindings(defs);
    const Complex val = evaluate(e, at);
    std::cout << "expression: " << to_string(e) << "\n";
    std::cout << "value=" << format_complex(val) << "\n";
    std::cout << "value_re=" << val.real() << "\n";
    std::cout << "value_im=" << val.imag() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    std::cout.precision(15);
    CLI::App app{"Mellin-Barnes contour engine"};
    app.require_subcommand(1);

    // barnes
    auto* barnes = app.add_subcommand(
        "barnes", "check one Barnes lemma numerically against its closed form");
    int order = 1;
    std::vector<std::string> lambdas;
    double barnes_tol = 1e-9;
    long barnes_evals = 0;
    barnes->add_option("--order", order, "lemma order (1 or 2)")
        ->check(CLI::Range(1, 2));
    barnes->add_option("--lambda", lambdas,
                       "lemma parameters as complex literals (4 or 5 values)")
        ->required();
    barnes->add_option("--tol", barnes_tol, "relative quadrature tolerance");
    barnes->add_option("--max-evals", barnes_evals, "evaluation budget");

    // reduce
    auto* reduce = app.add_subcommand(
        "reduce", "run the symbolic two-fold reduction and check the result");
    std::string r_eps1 = "0.1", r_eps2 = "0.07", trace_path;
    std::uint64_t seed = 20250814;
    reduce->add_option("eps1", r_eps1, "first regulator (complex literal)");
    reduce->add_option("eps2", r_eps2, "second regulator (complex literal)");
    reduce->add_option("--trace", trace_path, "write the proof trace to this file");
    reduce->add_option("--seed", seed, "seed for the equality sampler");

    // verify
    auto* verify = app.add_subcommand(
        "verify", "integrate the two-fold numerically and compare conventions");
    std::string v_eps1 = "0.1", v_eps2 = "0.07", v_u = "-0.4", v_v = "-0.4";
    std::vector<double> offsets;
    double verify_tol = 1e-4;
    long verify_evals = 0;
    verify->add_option("--eps1", v_eps1, "first regulator");
    verify->add_option("--eps2", v_eps2, "second regulator");
    verify->add_option("--u", v_u, "first outer variable");
    verify->add_option("--v", v_v, "second outer variable");
    verify->add_option("--offsets", offsets,
                       "contour offsets Re z2, Re z3 (default: chosen automatically)")
        ->expected(2);
    verify->add_option("--tol", verify_tol, "pass tolerance for the discrepancy");
    verify->add_option("--max-evals", verify_evals, "evaluation budget");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a serialized expression");
    std::string expr_text;
    std::vector<std::string> bindings;
    eval->add_option("expr", expr_text, "expression, e.g. 'Gamma(1+u)^2 * (u-v)^-1'")
        ->required();
    eval->add_option("--at", bindings, "bindings name=complex (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (barnes->parsed())
            return run_barnes(order, lambdas, barnes_tol, barnes_evals);
        if (reduce->parsed()) return run_reduce(r_eps1, r_eps2, trace_path, seed);
        if (verify->parsed())
            return run_verify_cmd(v_eps1, v_eps2, v_u, v_v, offsets, verify_tol,
                                  verify_evals);
        if (eval->parsed()) return run_eval(expr_text, bindings);
    } catch (const mb::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mb::NotAdmissible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const mb::BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        std::cerr << "best_estimate=" << mb::format_complex(e.best.value) << "\n";
        return kExitBudget;
    } catch (const mb::PatternMismatch& e) {
        std::cerr << "pattern mismatch: " << e.what() << "\n";
        return kExitPattern;
    } catch (const mb::DivergentTailError& e) {
        std::cerr << "non-decaying integrand: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const mb::DivisionByZero& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const mb::PoleError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const mb::MbError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
