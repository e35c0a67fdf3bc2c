#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace ratopt {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

// Parses "3", "-5/4" or "1.25" into an exact rational.
inline Rational parse_rational(const std::string& text) {
    auto bad = [&]() -> Rational {
        throw std::invalid_argument("malformed rational literal: '" + text + "'");
    };
    if (text.empty()) return bad();
    std::size_t pos = 0;
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
        neg = (text[pos] == '-');
        ++pos;
    }
    BigInt num = 0, den = 1;
    bool any_digit = false;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        num = num * 10 + (text[pos] - '0');
        any_digit = true;
        ++pos;
    }
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            num = num * 10 + (text[pos] - '0');
            den *= 10;
            any_digit = true;
            ++pos;
        }
    } else if (pos < text.size() && text[pos] == '/') {
        ++pos;
        BigInt d = 0;
        bool dd = false;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            d = d * 10 + (text[pos] - '0');
            dd = true;
            ++pos;
        }
        if (!dd || d == 0) return bad();
        den = d;
    }
    if (!any_digit || pos != text.size()) return bad();
    Rational r(num, den);
    return neg ? Rational(-r) : r;
}

}  // namespace ratopt
