#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mbarnes/errors.hpp"
#include "mbarnes/expr.hpp"
#include "mbarnes/poles.hpp"

namespace mb {

struct QuadResult {
    Complex value{0.0, 0.0};
    double abs_error_estimate = 0.0;
    double truncation_T = 0.0;
    long evaluations = 0;
};

struct QuadConfig {
    double rel_tol = 1e-10;
    long max_evaluations = 200000;
    double initial_T = 20.0;

    static QuadConfig one_fold() { return QuadConfig{1e-10, 200000, 20.0}; }
    static QuadConfig two_fold() { return QuadConfig{1e-6, 40000000, 20.0}; }
};

/// Thrown when the evaluation budget runs out; carries the best estimate
/// assembled so far so callers can still report it.
struct BudgetExceeded : MbError {
    BudgetExceeded(const std::string& msg, QuadResult partial)
        : MbError(msg), best(partial) {}
    QuadResult best;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kGK15KronrodW[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGK15GaussW[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelEstimate {
    Complex value{0.0, 0.0};
    double error = 0.0;
};

/// One Gauss-Kronrod application on [a, b]; 15 integrand evaluations. The
/// error estimate is the raw |K15 - G7| difference, deliberately
/// conservative for smooth exponentially-decaying integrands.
template <class F>
PanelEstimate gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Complex kronrod(0.0, 0.0);
    Complex gauss(0.0, 0.0);
    for (int i = 0; i < 8; ++i) {
        const Complex fc = i == 7 ? f(mid)
                                  : f(mid - half * kGK15Nodes[i]) +
                                        f(mid + half * kGK15Nodes[i]);
        kronrod += kGK15KronrodW[i] * fc;
        // odd-index nodes (and the centre) carry the embedded 7-point rule
        if (i % 2 == 1 || i == 7) gauss += kGK15GaussW[i / 2] * fc;
    }
    PanelEstimate out;
    out.value = half * kronrod;
    out.error = std::abs(half * (kronrod - gauss));
    return out;
}

struct Panel {
    double a = 0.0, b = 0.0;
    Complex value{0.0, 0.0};
    double error = 0.0;
    long id = 0;
};

struct PanelWorse {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.id > y.id; // older panel first on ties, deterministically
    }
};

/// Adaptive bisection over [-T, T]: seed with uniform panels, then refine
/// the worst panel until the summed error estimate meets the target.
/// The raw line integral (no 1/2pi) is returned; `evals` is shared with the
/// caller so nested integrals draw from one budget.
template <class F>
PanelEstimate adapt_line(F&& f, double T, double rel_tol, long max_evals,
                         long& evals, const char* what) {
    std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
    long next_id = 0;
    const int seed_panels = std::max(4, static_cast<int>(std::ceil(T / 2.5)));
    Complex total(0.0, 0.0);
    double total_err = 0.0;
    auto push_panel = [&](double a, double b) {
        PanelEstimate est = gk15(f, a, b);
        evals += 15;
        Panel p{a, b, est.value, est.error, next_id++};
        total += p.value;
        total_err += p.error;
        queue.push(std::move(p));
    };
    for (int i = 0; i < seed_panels; ++i) {
        const double a = -T + 2.0 * T * i / seed_panels;
        const double b = -T + 2.0 * T * (i + 1) / seed_panels;
        push_panel(a, b);
    }
    const double floor_width = 1e-12 * T;
    while (total_err > rel_tol * std::abs(total) && !queue.empty()) {
        if (evals > max_evals) {
            QuadResult partial;
            partial.value = total / (2.0 * M_PI);
            partial.abs_error_estimate = total_err / (2.0 * M_PI);
            partial.truncation_T = T;
            partial.evaluations = evals;
            throw BudgetExceeded(std::string(what) +
                                     ": evaluation budget exhausted before the "
                                     "panel errors converged",
                                 partial);
        }
        Panel worst = queue.top();
        queue.pop();
        // a panel too narrow to split keeps its error contribution but is
        // retired from refinement
        if (worst.b - worst.a < floor_width) continue;
        total -= worst.value;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push_panel(worst.a, mid);
        push_panel(mid, worst.b);
    }
    PanelEstimate out;
    out.value = total;
    out.error = total_err;
    return out;
}

/// Decay data of a gamma-product integrand along the vertical line of one
/// variable: r such that |f| ~ C |t|^p e^{-r|t|}, from the gamma modulus
/// asymptotics |Gamma(x+it)| ~ sqrt(2pi) |t|^{x-1/2} e^{-pi|t|/2}.
struct DecayProfile {
    double r = 0.0;
    double p = 0.0;
};

inline DecayProfile decay_profile(const GammaProduct& e, const Symbol& v,
                                  double offset, const Assignment& bound) {
    Assignment at = bound;
    at[v] = Complex(offset, 0.0);
    int net = 0;
    double p = 0.0;
    for (const auto& f : e.gammas()) {
        if (!f.arg.contains(v)) continue;
        net += f.power;
        p += f.power * (f.arg.evaluate(at).real() - 0.5);
    }
    for (const auto& [form, q] : e.polys())
        if (form.contains(v)) p += q;
    DecayProfile out;
    out.r = decay_rate(net); // throws DivergentTailError when net <= 0
    out.p = p;
    return out;
}

/// Bound on both tails |t| > T of the (1/2pi) line integral, calibrated
/// from one endpoint evaluation per side: with |f| <= C |t|^p e^{-r|t|}
/// pinned at |t| = T, each tail integrates to at most |f(T)| / (r - p/T).
/// Infinity when T is still inside the polynomially-growing regime.
template <class F>
double tail_from_endpoints(F&& f, const DecayProfile& d, double T, long& evals) {
    const double margin = d.r - d.p / T;
    if (margin <= 0.0) return std::numeric_limits<double>::infinity();
    double endpoint = 0.0;
    for (const double t : {T, -T}) {
        try {
            endpoint += std::abs(f(t));
        } catch (const OverflowError&) {
            return std::numeric_limits<double>::infinity();
        }
        ++evals;
    }
    return endpoint / margin / (2.0 * M_PI);
}

/// Compiled evaluation plan for one live variable moving along Re = offset
/// (plus, in the two-fold case, an outer variable supplied per call). All
/// parameter dependence is folded into complex base points once.
struct LinePlan {
    struct Term {
        Complex base{0.0, 0.0};
        double k_live = 0.0;
        double k_outer = 0.0;
        int power = 0;
        bool is_gamma = true;
    };
    std::vector<Term> terms;
    double log_scalar_abs = 0.0;
    double scalar_sign = 1.0;
    bool zero = false;

    Complex eval(double t, Complex outer_z) const {
        if (zero) return Complex(0.0, 0.0);
        Complex acc(log_scalar_abs, 0.0);
        for (const Term& term : terms) {
            const Complex w = term.base + Complex(0.0, term.k_live * t) +
                              term.k_outer * outer_z;
            acc += static_cast<double>(term.power) *
                   (term.is_gamma ? log_gamma(w) : std::log(w));
        }
        if (acc.real() > 709.0)
            throw OverflowError("contour integrand overflows double range");
        return scalar_sign * std::exp(acc);
    }
};

inline LinePlan compile_line_plan(const GammaProduct& e, const Symbol& live,
                                  double live_offset, const Symbol* outer,
                                  const Assignment& bound) {
    LinePlan plan;
    if (e.is_zero()) {
        plan.zero = true;
        return plan;
    }
    Assignment at = bound;
    at[live] = Complex(live_offset, 0.0);
    if (outer) at[*outer] = Complex(0.0, 0.0);
    auto add = [&](const LinearForm& form, int power, bool is_gamma) {
        LinePlan::Term term;
        term.base = form.evaluate(at);
        term.k_live = to_double(form.coeff(live));
        term.k_outer = outer ? to_double(form.coeff(*outer)) : 0.0;
        term.power = power;
        term.is_gamma = is_gamma;
        plan.terms.push_back(term);
    };
    for (const auto& f : e.gammas()) add(f.arg, f.power, true);
    for (const auto& [form, q] : e.polys()) add(form, q, false);
    plan.log_scalar_abs = std::log(std::abs(to_double(e.scalar())));
    plan.scalar_sign = e.scalar() < 0 ? -1.0 : 1.0;
    return plan;
}

inline std::string admissibility_complaint(const ContourSpec& spec) {
    std::string msg = "contour is not admissible";
    for (const auto& viol : spec.violated)
        msg += "; Re(" + viol.arg.to_string() +
               ") = " + std::to_string(viol.real_part);
    return msg;
}

/// Grows T from cfg.initial_T until the tail bound drops under
/// rel_tol/10 x scale. Decay guarantees termination: e^{-rT} underflows
/// long before the hard cap.
template <class F>
std::pair<double, double> grow_truncation(F&& f, const DecayProfile& d,
                                          const QuadConfig& cfg, double scale,
                                          long& evals) {
    const double threshold = 0.1 * cfg.rel_tol * scale;
    double T = cfg.initial_T;
    double tail = tail_from_endpoints(f, d, T, evals);
    while (tail > threshold && T < 600.0) {
        T *= 1.4;
        tail = tail_from_endpoints(f, d, T, evals);
    }
    if (tail > threshold)
        throw DivergentTailError("tail bound will not pass below threshold at T = " +
                                 std::to_string(T));
    return {T, tail};
}

} // namespace detail

/// Public tail estimate for the (1/2pi) integral of e along Re(v) = offset,
/// truncated at |Im v| = T. Parameters are taken from `bound`.
inline double tail_bound(const GammaProduct& e, const Symbol& v, double offset,
                         double T, const Assignment& bound) {
    const detail::DecayProfile d = detail::decay_profile(e, v, offset, bound);
    detail::LinePlan plan = detail::compile_line_plan(e, v, offset, nullptr, bound);
    long evals = 0;
    return detail::tail_from_endpoints(
        [&](double t) { return plan.eval(t, Complex(0.0, 0.0)); }, d, T, evals);
}

/// (1/2pi) integral over t of e(offset + i t) with every other symbol bound.
/// T is grown until the decay-based tail bound is negligible, then the line
/// is integrated adaptively until the panel error estimate meets rel_tol.
inline QuadResult integrate_one(const GammaProduct& e, const Symbol& v,
                                const ContourSpec& spec, const Assignment& bound,
                                const QuadConfig& cfg = QuadConfig::one_fold()) {
    if (!spec.admissible)
        throw NotAdmissible("integrate_one: " + detail::admissibility_complaint(spec));
    const double c = spec.offsets.at(v);
    const detail::DecayProfile d = detail::decay_profile(e, v, c, bound);
    detail::LinePlan plan = detail::compile_line_plan(e, v, c, nullptr, bound);
    auto f = [&](double t) { return plan.eval(t, Complex(0.0, 0.0)); };

    long evals = 0;
    const double scale = std::max(1.0, std::abs(f(0.0)));
    ++evals;
    const auto [T, tail] = detail::grow_truncation(f, d, cfg, scale, evals);
    detail::PanelEstimate est =
        detail::adapt_line(f, T, cfg.rel_tol, cfg.max_evaluations, evals,
                           "integrate_one");
    QuadResult out;
    out.value = est.value / (2.0 * M_PI);
    out.abs_error_estimate = est.error / (2.0 * M_PI) + tail;
    out.truncation_T = T;
    out.evaluations = evals;
    return out;
}

/// Iterated two-fold integral: the canonically-first variable is the inner
/// fold at cfg.rel_tol, the outer fold runs at 10 x cfg.rel_tol. One shared
/// evaluation budget covers both folds.
inline QuadResult integrate_two(const GammaProduct& e, const Symbol& v1,
                                const Symbol& v2, const ContourSpec& spec,
                                const Assignment& bound,
                                const QuadConfig& cfg = QuadConfig::two_fold()) {
    if (!spec.admissible)
        throw NotAdmissible("integrate_two: " + detail::admissibility_complaint(spec));
    const Symbol inner = v1 < v2 ? v1 : v2;
    const Symbol outer = v1 < v2 ? v2 : v1;
    const double c_in = spec.offsets.at(inner);
    const double c_out = spec.offsets.at(outer);

    const detail::DecayProfile d_in = detail::decay_profile(
        e, inner, c_in, [&] {
            Assignment a = bound;
            a[outer] = Complex(c_out, 0.0);
            return a;
        }());
    detail::LinePlan plan = detail::compile_line_plan(e, inner, c_in, &outer, bound);

    long evals = 0;

    // Freeze the inner truncation at the outer line's midpoint: the inner
    // polynomial exponent depends only on Re(outer) = c_out, and the
    // calibration constant only shrinks as |Im(outer)| grows.
    auto f_mid = [&](double t) { return plan.eval(t, Complex(c_out, 0.0)); };
    const double scale_in = std::max(1.0, std::abs(f_mid(0.0)));
    ++evals;
    const auto [T_in, tail_in] = detail::grow_truncation(f_mid, d_in, cfg, scale_in,
                                                         evals);

    double worst_inner_err = 0.0;
    auto outer_integrand = [&](double t_out) {
        const Complex z_out(c_out, t_out);
        auto f_in = [&](double t) { return plan.eval(t, z_out); };
        detail::PanelEstimate est = detail::adapt_line(
            f_in, T_in, cfg.rel_tol, cfg.max_evaluations, evals, "integrate_two/inner");
        worst_inner_err = std::max(worst_inner_err, est.error);
        return est.value / (2.0 * M_PI);
    };

    const detail::DecayProfile d_out = detail::decay_profile(
        e, outer, c_out, [&] {
            Assignment a = bound;
            a[inner] = Complex(c_in, 0.0);
            return a;
        }());
    const double scale_out = std::max(1.0, std::abs(outer_integrand(0.0)));
    const auto [T_out, tail_out] =
        detail::grow_truncation(outer_integrand, d_out, cfg, scale_out, evals);
    detail::PanelEstimate est =
        detail::adapt_line(outer_integrand, T_out, 10.0 * cfg.rel_tol,
                           cfg.max_evaluations, evals, "integrate_two/outer");

    QuadResult out;
    out.value = est.value / (2.0 * M_PI);
    out.abs_error_estimate = (est.error + worst_inner_err * T_out / M_PI) /
                                 (2.0 * M_PI) +
                             tail_out;
    out.truncation_T = T_out;
    out.evaluations = evals;
    return out;
}

} // namespace mb
