#pragma once

#include <string>
#include <vector>

#include "ratopt/polynomial.hpp"

namespace ratopt {

// Syntax or schema error carrying a character position when available.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& message, std::size_t position)
        : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    explicit ParseError(const std::string& message)
        : std::runtime_error(message), position_(std::string::npos) {}

    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

// A rational-function program: minimize p/q over the set cut out by the
// equality and inequality constraints.
struct RationalProgram {
    std::vector<std::string> variables;
    Polynomial numerator;    // p
    Polynomial denominator;  // q, never the zero polynomial
    std::vector<Polynomial> equalities;    // h_i = 0
    std::vector<Polynomial> inequalities;  // g_j >= 0

    RationalProgram() : numerator(0), denominator(0) {}
    int nvars() const { return static_cast<int>(variables.size()); }
};

// Grammar: rational/decimal literals, named variables, + - * ^ with
// nonnegative integer exponents, parentheses. No implicit multiplication.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables);

// JSON schema:
//   {"variables": [names], "numerator": expr, "denominator": expr,
//    "equalities": [expr...], "inequalities": [expr...]}
// denominator defaults to "1"; an expr may also be a sparse term list
// {"terms": [[coeff, [e...]], ...]}.
RationalProgram parse_problem(const std::string& json_text);

}  // namespace ratopt
