#include <doctest.h>

#include <cmath>
#include <random>

#include "ratopt/homogenize.hpp"
#include "test_support.hpp"

using namespace ratopt;
using testsupport::problem_path;
using testsupport::slurp;

namespace {

Polynomial v3(int i) { return Polynomial::variable(3, i); }
Polynomial v2(int i) { return Polynomial::variable(2, i); }

RationalProgram load(const std::string& name) {
    return parse_problem(slurp(problem_path(name)));
}

}  // namespace

TEST_CASE("unconstrained bivariate sextic lifts without an x0 sign constraint") {
    HomogenizedProgram hp = build_homogenized(load("ex4_2.json"));
    CHECK(hp.nvars == 3);
    CHECK(hp.d == 6);
    CHECK(hp.m1 == 0);
    CHECK(hp.m2 == 0);
    CHECK_FALSE(hp.x0_included);
    Polynomial obj = v3(1).pow(4) * v3(2).pow(2) + v3(1).pow(2) * v3(2).pow(4) + v3(0).pow(6);
    CHECK(hp.objective == obj);
    REQUIRE(hp.equalities.size() == 1);
    Polynomial qm1 = v3(1).pow(2) * v3(2).pow(2) * v3(0).pow(2) - Polynomial::constant(3, 1);
    CHECK(hp.equalities[0] == qm1);
    CHECK(hp.dehomogenization_constraint() == qm1);
    CHECK(hp.inequalities.empty());
}

TEST_CASE("constrained univariate lift carries the x0 inequality") {
    HomogenizedProgram hp = build_homogenized(load("ex4_6.json"));
    CHECK(hp.nvars == 2);
    CHECK(hp.d == 4);
    Polynomial x0 = v2(0), x1 = v2(1);
    CHECK(hp.objective == x0.pow(4) + x1 * x0.pow(3));
    REQUIRE(hp.equalities.size() == 1);
    Polynomial qm1 = x0.pow(4) - x0.pow(2) * x1.pow(2) * Rational(2) + x1.pow(4) -
                     Polynomial::constant(2, 1);
    CHECK(hp.equalities[0] == qm1);
    REQUIRE(hp.inequalities.size() == 2);
    Polynomial g1 = x0.pow(6) - x0.pow(4) * x1.pow(2) * Rational(3) +
                    x0.pow(2) * x1.pow(4) * Rational(3) - x1.pow(6);
    CHECK(hp.inequalities[0] == g1);
    CHECK(hp.inequalities[1] == x0);
    CHECK(hp.x0_included);
}

TEST_CASE("reciprocal quadratic lifts to a circle-constrained square") {
    HomogenizedProgram hp = build_homogenized(load("intro.json"));
    CHECK(hp.nvars == 2);
    CHECK(hp.objective == v2(0).pow(2));
    REQUIRE(hp.equalities.size() == 1);
    CHECK(hp.equalities[0] ==
          v2(1).pow(2) + v2(0).pow(2) - Polynomial::constant(2, 1));
    CHECK_FALSE(hp.x0_included);
}

TEST_CASE("degree-dominant numerator certifies equivalence syntactically") {
    // constrained so the unconstrained shortcut does not apply
    RationalProgram rp = parse_problem(
        R"({"variables":["x1"],"numerator":"x1^4","denominator":"x1^2 + 1",
            "inequalities":["x1 + 2"]})");
    HomogenizedProgram hp = build_homogenized(rp);
    EquivalenceStatus st = certify_equivalence(rp, hp, {});
    CHECK(st.certified);
    CHECK(st.reason == EquivalenceStatus::Reason::Degree);
}

TEST_CASE("unconstrained problems certify equivalence outright") {
    RationalProgram rp = parse_problem(
        R"({"variables":["x1"],"numerator":"x1^2","denominator":"x1^2 + 1"})");
    HomogenizedProgram hp = build_homogenized(rp);
    EquivalenceStatus st = certify_equivalence(rp, hp, {});
    CHECK(st.certified);
    CHECK(st.reason == EquivalenceStatus::Reason::Unconstrained);
}

TEST_CASE("positive leading-coordinate minimizer certifies equivalence") {
    RationalProgram rp = load("ex4_6.json");
    HomogenizedProgram hp = build_homogenized(rp);
    EquivalenceStatus st = certify_equivalence(rp, hp, {{1.0607, -0.3536}});
    CHECK(st.certified);
    CHECK(st.reason == EquivalenceStatus::Reason::PositiveX0Minimizer);
}

TEST_CASE("no minimizer evidence leaves equivalence uncertified") {
    RationalProgram rp = load("remark2_5.json");
    HomogenizedProgram hp = build_homogenized(rp);
    EquivalenceStatus st = certify_equivalence(rp, hp, {});
    CHECK_FALSE(st.certified);
    CHECK(st.reason == EquivalenceStatus::Reason::Uncertified);
    CHECK(!st.notes.empty());
}

TEST_CASE("atoms with a clear leading coordinate map to quotients") {
    HomogenizedProgram hp = build_homogenized(load("ex4_6.json"));
    BackMapResult r = back_map({{1.0607, -0.3536}}, hp);
    REQUIRE(r.finite_minimizers.size() == 1);
    CHECK(r.finite_minimizers[0][0] == doctest::Approx(-0.3334).epsilon(1e-3));
    CHECK(r.attained == BackMapResult::Attained::Attained);
}

TEST_CASE("atoms with vanishing leading coordinate are reported asymptotic") {
    HomogenizedProgram hp = build_homogenized(load("ex4_2.json"));
    BackMapResult r = back_map({{0.0, 0.8909, 0.8909}}, hp);
    CHECK(r.finite_minimizers.empty());
    REQUIRE(r.asymptotic_atoms.size() == 1);
    CHECK(r.attained == BackMapResult::Attained::NotAttained);
}

TEST_CASE("unit leading coordinate is the identity map") {
    HomogenizedProgram hp = build_homogenized(load("ex4_2.json"));
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> unif(-2, 2);
    for (int trial = 0; trial < 5; ++trial) {
        double a = unif(rng), b = unif(rng);
        BackMapResult r = back_map({{1.0, a, b}}, hp);
        REQUIRE(r.finite_minimizers.size() == 1);
        CHECK(r.finite_minimizers[0][0] == doctest::Approx(a));
        CHECK(r.finite_minimizers[0][1] == doctest::Approx(b));
    }
}

TEST_CASE("empty atom list leaves attainment unknown") {
    HomogenizedProgram hp = build_homogenized(load("ex4_2.json"));
    BackMapResult r = back_map({}, hp);
    CHECK(r.attained == BackMapResult::Attained::Unknown);
}

TEST_CASE("feasible points lift onto the normalized slice") {
    // For feasible x with q(x) > 0, the scaled lift satisfies the lifted
    // constraints and reproduces the rational objective value.
    RationalProgram rp = load("ex4_7a.json");
    HomogenizedProgram hp = build_homogenized(rp);
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> unif(-0.7, 0.7);
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 10; ++trial) {
        std::vector<double> x{unif(rng), unif(rng)};
        bool ok = true;
        for (const auto& g : rp.inequalities) ok = ok && g.eval(x) >= 0;
        double q = rp.denominator.eval(x);
        if (!ok || q <= 1e-6) continue;
        ++tested;
        double t = std::pow(q, 1.0 / hp.d);
        std::vector<double> lift{1.0 / t, x[0] / t, x[1] / t};
        // the lift sits on the q-slice and every lifted inequality holds
        CHECK(hp.equalities.back().eval(lift) == doctest::Approx(0.0).epsilon(1e-9));
        for (size_t j = 0; j + (hp.x0_included ? 1 : 0) < hp.inequalities.size(); ++j)
            CHECK(hp.inequalities[j].eval(lift) >= -1e-9);
        double ratio = rp.numerator.eval(x) / q;
        CHECK(hp.objective.eval(lift) == doctest::Approx(ratio).epsilon(1e-9));
    }
    CHECK(tested == 10);
}
