#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbarnes/barnes.hpp"
#include "mbarnes/expr.hpp"
#include "mbarnes/expr_io.hpp"

namespace mb {

/// One recorded rewrite. `rule` is one of "residue", "split", "barnes-first",
/// "absorb", "reflect", "barnes-second"; the optional fields hold the rule's
/// parameters so the step can be re-executed verbatim.
struct TraceStep {
    struct ResidueRecord {
        Symbol variable;
        LinearForm pole;
        GammaProduct contribution;
    };

    std::string rule;
    ExprSum input;
    ExprSum output;
    std::optional<Symbol> variable;  // residue/lemma/reflection variable
    std::optional<LinearForm> pole;  // residue location
    std::optional<LinearForm> part1; // split denominators
    std::optional<LinearForm> part2;
    std::vector<ResidueRecord> residues;
};

/// A certificate of a reduction: the ordered rewrite steps with enough
/// parameters to replay each one. Serializes to a line-oriented text block
/// that is stable across runs because every expression prints canonically.
struct ProofTrace {
    std::vector<TraceStep> steps;

    std::vector<TraceStep::ResidueRecord> residues_collected() const {
        std::vector<TraceStep::ResidueRecord> out;
        for (const auto& s : steps)
            out.insert(out.end(), s.residues.begin(), s.residues.end());
        return out;
    }

    std::size_t count_rule(const std::string& rule) const {
        std::size_t n = 0;
        for (const auto& s : steps)
            if (s.rule == rule) ++n;
        return n;
    }

    std::string serialize() const {
        std::string out;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const TraceStep& s = steps[i];
            out += "step " + std::to_string(i + 1) + ": " + s.rule + "\n";
            if (s.variable) out += "  variable: " + s.variable->name() + "\n";
            if (s.pole) out += "  pole: " + s.pole->to_string() + "\n";
            if (s.part1) out += "  part1: " + s.part1->to_string() + "\n";
            if (s.part2) out += "  part2: " + s.part2->to_string() + "\n";
            out += "  input: " + to_string(s.input) + "\n";
            out += "  output: " + to_string(s.output) + "\n";
            for (const auto& r : s.residues)
                out += "  residue: " + r.variable.name() + " @ " +
                       r.pole.to_string() + " -> " + to_string(r.contribution) + "\n";
        }
        return out;
    }
};

namespace detail {

inline const GammaProduct& single_term(const ExprSum& e, const std::string& rule) {
    if (e.terms().size() != 1)
        throw MbError("trace replay: rule '" + rule +
                      "' expects a single-term expression");
    return e.terms().front();
}

} // namespace detail

/// Re-executes every recorded step and checks the recorded output
/// structurally. Returns false on the first mismatch.
inline bool replay_trace(const ProofTrace& trace) {
    for (const auto& s : trace.steps) {
        ExprSum recomputed;
        if (s.rule == "residue") {
            recomputed = ExprSum(take_right_residue(
                detail::single_term(s.input, s.rule), *s.variable, *s.pole));
        } else if (s.rule == "split") {
            recomputed = partial_fraction_split(detail::single_term(s.input, s.rule),
                                                *s.part1, *s.part2);
        } else if (s.rule == "barnes-first") {
            recomputed = ExprSum(
                apply_barnes_first(detail::single_term(s.input, s.rule), *s.variable));
        } else if (s.rule == "absorb") {
            recomputed = ExprSum(normalize(detail::single_term(s.input, s.rule), true));
        } else if (s.rule == "reflect") {
            recomputed = ExprSum(
                reflect_variable(detail::single_term(s.input, s.rule), *s.variable)
                    .first);
        } else if (s.rule == "barnes-second") {
            recomputed = ExprSum(apply_barnes_second(
                detail::single_term(s.input, s.rule), *s.variable));
        } else {
            throw MbError("trace replay: unknown rule '" + s.rule + "'");
        }
        if (!(recomputed == s.output)) return false;
    }
    return true;
}

} // namespace mb
