#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "mbarnes/errors.hpp"
#include "mbarnes/expr.hpp"
#include "mbarnes/symbol.hpp"

namespace mb {

inline std::string to_string(const GammaProduct& e) {
    if (e.is_zero()) return "0";
    std::string out = rational_to_string(e.scalar());
    for (const auto& f : e.gammas()) {
        out += " * Gamma(" + f.arg.to_string() + ")";
        if (f.power != 1) out += "^" + std::to_string(f.power);
    }
    for (const auto& [form, p] : e.polys()) {
        out += " * (" + form.to_string() + ")";
        if (p != 1) out += "^" + std::to_string(p);
    }
    return out;
}

inline std::string to_string(const ExprSum& e) {
    if (e.terms().empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < e.terms().size(); ++i) {
        const GammaProduct& t = e.terms()[i];
        if (i == 0) {
            out += to_string(t);
        } else if (t.scalar() < 0) {
            GammaProduct flipped = t;
            flipped.mul_scalar(Rational(-1));
            out += " - " + to_string(flipped);
        } else {
            out += " + " + to_string(t);
        }
    }
    return out;
}

namespace detail {

/// Hand-rolled tokenizer/parser for the canonical expression syntax
///   scalar * Gamma(form)^p * (form)^q + ...
/// where form is a linear combination like "1 - eps1 + 2*z3". Round trip
/// with to_string is exact because both sides share one canonical form.
class ExprParser {
public:
    explicit ExprParser(std::string text) : text_(std::move(text)) {}

    ExprSum parse_sum() {
        std::vector<GammaProduct> terms;
        skip_ws();
        bool negate = consume_sign();
        terms.push_back(parse_product(negate));
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c != '+' && c != '-')
                throw ParseError("expected '+' between terms at offset " +
                                 std::to_string(pos_));
            ++pos_;
            terms.push_back(parse_product(c == '-'));
        }
        return ExprSum(std::move(terms));
    }

    GammaProduct parse_single_product() {
        skip_ws();
        const bool negate = consume_sign();
        GammaProduct p = parse_product(negate);
        skip_ws();
        if (pos_ < text_.size())
            throw ParseError("trailing input after product at offset " +
                             std::to_string(pos_));
        return p;
    }

private:
    GammaProduct parse_product(bool negate) {
        skip_ws();
        if (consume_sign()) negate = !negate; // tolerate "+ -5/2 * ..."
        GammaProduct out = GammaProduct::from_scalar(negate ? Rational(-1)
                                                            : Rational(1));
        parse_factor(out);
        while (true) {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                parse_factor(out);
            } else {
                break;
            }
        }
        return out;
    }

    void parse_factor(GammaProduct& out) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input");
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            out.mul_scalar(parse_rational());
            return;
        }
        if (text_.compare(pos_, 6, "Gamma(") == 0) {
            pos_ += 6;
            const LinearForm arg = parse_form();
            expect(')');
            out.mul_gamma(arg, parse_power());
            return;
        }
        if (text_[pos_] == '(') {
            ++pos_;
            const LinearForm form = parse_form();
            expect(')');
            out.mul_poly(form, parse_power());
            return;
        }
        throw ParseError("unexpected character '" + std::string(1, text_[pos_]) +
                         "' at offset " + std::to_string(pos_));
    }

    int parse_power() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '^') return 1;
        ++pos_;
        skip_ws();
        bool paren = false;
        if (pos_ < text_.size() && text_[pos_] == '(') {
            paren = true;
            ++pos_;
            skip_ws();
        }
        int sign = 1;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
            if (text_[pos_] == '-') sign = -1;
            ++pos_;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) throw ParseError("expected integer exponent");
        const int mag = std::stoi(text_.substr(start, pos_ - start));
        if (paren) expect(')');
        return sign * mag;
    }

    LinearForm parse_form() {
        LinearForm form;
        skip_ws();
        bool negate = consume_sign();
        form += parse_form_term(negate);
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c != '+' && c != '-') break;
            ++pos_;
            form += parse_form_term(c == '-');
        }
        return form;
    }

    LinearForm parse_form_term(bool negate) {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of linear form");
        Rational coeff = negate ? Rational(-1) : Rational(1);
        if (std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            coeff *= parse_rational();
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '*') {
                ++pos_;
                return LinearForm::term(parse_symbol(), coeff);
            }
            return LinearForm(coeff);
        }
        return LinearForm::term(parse_symbol(), coeff);
    }

    Symbol parse_symbol() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start)
            throw ParseError("expected symbol name at offset " + std::to_string(pos_));
        return sym(text_.substr(start, pos_ - start));
    }

    Rational parse_rational() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string num = text_.substr(start, pos_ - start);
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            std::size_t dstart = pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            if (pos_ == dstart) throw ParseError("expected denominator digits");
            num += "/" + text_.substr(dstart, pos_ - dstart);
        }
        return rational_from_string(num);
    }

    bool consume_sign() {
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
            const bool neg = text_[pos_] == '-';
            ++pos_;
            return neg;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c)
            throw ParseError("expected '" + std::string(1, c) + "' at offset " +
                             std::to_string(pos_));
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    std::string text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline ExprSum parse_expr(const std::string& text) {
    if (text.empty()) throw ParseError("empty expression");
    {
        // canonical zero
        std::size_t i = 0, j = text.size();
        while (i < j && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
        if (text.substr(i, j - i) == "0") return ExprSum();
    }
    return detail::ExprParser(text).parse_sum();
}

inline GammaProduct parse_product(const std::string& text) {
    if (text.empty()) throw ParseError("empty expression");
    {
        std::size_t i = 0, j = text.size();
        while (i < j && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        while (j > i && std::isspace(static_cast<unsigned char>(text[j - 1]))) --j;
        if (text.substr(i, j - i) == "0") return GammaProduct::zero();
    }
    return detail::ExprParser(text).parse_single_product();
}

} // namespace mb
