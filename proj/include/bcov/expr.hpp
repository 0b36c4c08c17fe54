#pragma once

// Recursive-descent parser for rational functions of z written as
//   poly [ '/' poly ]
// where poly uses + - * ^ (non-negative integer exponents), parentheses,
// the variable z and complex literals such as 3, 2.5i, i.

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "bcov/poly.hpp"

namespace bcov {

class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& msg, std::size_t position)
        : std::invalid_argument(msg + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(const std::string& text) : s_(text) {}

    std::pair<Poly, Poly> parse() {
        Poly num = sum();
        Poly den = Poly::constant(1.0);
        skip();
        if (peek() == '/') {
            const std::size_t at = pos_;
            ++pos_;
            den = sum();
            if (den.is_zero()) throw ParseError("division by the zero polynomial", at);
        }
        skip();
        if (pos_ != s_.size()) {
            if (peek() == '/') throw ParseError("only one top-level division is allowed", pos_);
            throw ParseError(std::string("unexpected '") + peek() + "'", pos_);
        }
        return {std::move(num), std::move(den)};
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

    Poly sum() {
        skip();
        Poly acc;
        bool negate = false;
        if (peek() == '+' || peek() == '-') {
            negate = peek() == '-';
            ++pos_;
        }
        Poly t = product();
        acc = negate ? -t : t;
        for (;;) {
            skip();
            const char c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            Poly rhs = product();
            acc = c == '+' ? acc + rhs : acc - rhs;
        }
        return acc;
    }

    Poly product() {
        Poly acc = power();
        for (;;) {
            skip();
            if (peek() != '*') break;
            ++pos_;
            acc = acc * power();
        }
        return acc;
    }

    Poly power() {
        Poly base = atom();
        skip();
        if (peek() != '^') return base;
        ++pos_;
        skip();
        const std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (start == pos_) throw ParseError("expected a non-negative integer exponent", start);
        const unsigned long e = std::stoul(s_.substr(start, pos_ - start));
        if (e > 1000) throw ParseError("exponent too large", start);
        return base.pow(static_cast<unsigned>(e));
    }

    Poly atom() {
        skip();
        const char c = peek();
        if (c == '(') {
            const std::size_t open = pos_;
            ++pos_;
            Poly inner = sum();
            skip();
            if (peek() == '/') throw ParseError("division is only allowed at top level", pos_);
            if (peek() != ')') throw ParseError("unbalanced '('", open);
            ++pos_;
            return inner;
        }
        if (c == 'z') {
            ++pos_;
            return Poly::variable();
        }
        if (c == 'i') {
            ++pos_;
            return Poly::constant(Complex(0.0, 1.0));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::size_t start = pos_;
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') ++pos_;
            if (peek() == 'e' || peek() == 'E') {
                std::size_t save = pos_;
                ++pos_;
                if (peek() == '+' || peek() == '-') ++pos_;
                if (!std::isdigit(static_cast<unsigned char>(peek())))
                    pos_ = save;
                else
                    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
            double v = 0.0;
            try {
                std::size_t used = 0;
                const std::string lit = s_.substr(start, pos_ - start);
                v = std::stod(lit, &used);
                if (used != lit.size()) throw ParseError("malformed number", start);
            } catch (const std::logic_error&) {
                throw ParseError("malformed number", start);
            }
            if (peek() == 'i') {
                ++pos_;
                return Poly::constant(Complex(0.0, v));
            }
            return Poly::constant(v);
        }
        if (c == '\0') throw ParseError("unexpected end of input", pos_);
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Numerator and denominator as written (not yet reduced or checked).
inline std::pair<Poly, Poly> parse_rational_expression(const std::string& text) {
    return detail::ExprParser(text).parse();
}

}  // namespace bcov
