#include <doctest.h>

#include <random>

#include "ratopt/parser.hpp"
#include "test_support.hpp"

using namespace ratopt;
using testsupport::problem_path;
using testsupport::random_polynomial;
using testsupport::slurp;

TEST_CASE("six-degree trivariate numerator") {
    Polynomial p = parse_polynomial("x1^4*x2^2 + x1^2*x2^4 + 1", {"x1", "x2"});
    CHECK(p.terms().size() == 3);
    CHECK(p.degree() == 6);
    CHECK(p.coefficient({4, 2}) == 1);
    CHECK(p.coefficient({0, 0}) == 1);
}

TEST_CASE("integer literal parses to a constant") {
    Polynomial p = parse_polynomial("3", {"x1"});
    CHECK(p == Polynomial::constant(1, 3));
}

TEST_CASE("binomial cube expansion") {
    Polynomial p = parse_polynomial("(1-x1^2)^3", {"x1"});
    Polynomial x = Polynomial::variable(1, 0);
    Polynomial expect = Polynomial::constant(1, 1) - x.pow(2) * Rational(3) +
                        x.pow(4) * Rational(3) - x.pow(6);
    CHECK(p == expect);
}

TEST_CASE("decimal literals become exact rationals") {
    Polynomial p = parse_polynomial("1.25", {"x1"});
    CHECK(p.coefficient({0}) == Rational(5, 4));
    CHECK(parse_rational("1.25") == Rational(5, 4));
    CHECK(parse_rational("-5/4") == Rational(-5, 4));
}

TEST_CASE("unknown identifier and malformed syntax are rejected") {
    CHECK_THROWS_AS(parse_polynomial("x1 + y", {"x1"}), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x1^-2", {"x1"}), ParseError);
    CHECK_THROWS_AS(parse_polynomial("(x1", {"x1"}), ParseError);
}

TEST_CASE("constrained univariate problem file") {
    RationalProgram rp = parse_problem(slurp(problem_path("ex4_6.json")));
    CHECK(rp.nvars() == 1);
    CHECK(rp.equalities.size() == 0);
    CHECK(rp.inequalities.size() == 1);
    CHECK(!rp.denominator.is_zero());
    CHECK(rp.denominator.degree() == 4);
}

TEST_CASE("document without constraint arrays") {
    RationalProgram rp = parse_problem(
        R"({"variables":["x1"],"numerator":"x1^2","denominator":"1"})");
    CHECK(rp.equalities.empty());
    CHECK(rp.inequalities.empty());
}

TEST_CASE("missing numerator is a schema error") {
    CHECK_THROWS(parse_problem(R"({"variables":["x1"],"denominator":"1"})"));
}

TEST_CASE("denominator defaults to one") {
    RationalProgram rp = parse_problem(R"({"variables":["x1"],"numerator":"x1^2"})");
    CHECK(rp.denominator == Polynomial::constant(1, 1));
}

TEST_CASE("print-then-parse roundtrip on random polynomials") {
    std::mt19937 rng(41);
    std::vector<std::string> names{"x1", "x2", "x3"};
    for (int trial = 0; trial < 20; ++trial) {
        Polynomial p = random_polynomial(rng, 3, 4);
        Polynomial back = parse_polynomial(p.to_string(names), names);
        CHECK(back == p);
    }
}

TEST_CASE("parse is independent of source term order") {
    std::vector<std::string> names{"x1", "x2"};
    CHECK(parse_polynomial("x1^2 + x2 - 3", names) ==
          parse_polynomial("-3 + x2 + x1^2", names));
}
