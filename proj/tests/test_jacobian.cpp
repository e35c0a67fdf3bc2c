#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "ratopt/jacobian.hpp"
#include "test_support.hpp"

using namespace ratopt;
using testsupport::problem_path;
using testsupport::random_rational_point;
using testsupport::slurp;

namespace {

HomogenizedProgram load_hp(const std::string& name) {
    return build_homogenized(parse_problem(slurp(problem_path(name))));
}

bool same_up_to_sign(const Polynomial& a, const Polynomial& b) {
    return a == b || a == -b;
}

// Numeric rank of the matrix evaluated at a point.
int rank_at(const PolyMatrix& m, const std::vector<Rational>& pt) {
    Eigen::MatrixXd num(m.rows(), m.cols());
    std::vector<double> dpt(pt.size());
    for (size_t i = 0; i < pt.size(); ++i) dpt[i] = to_double(pt[i]);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) num(i, j) = m.at(i, j).eval(dpt);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(num);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-9 * s(0)) ++r;
    return r;
}

}  // namespace

TEST_CASE("index sets for the unconstrained lifted sextic") {
    auto plans = enumerate_index_sets(load_hp("ex4_2.json"));
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].J.empty());
    CHECK(plans[0].len == 3);
    CHECK_FALSE(plans[0].primed_active);
    CHECK(plans[0].t == 0);
}

TEST_CASE("index sets for the constrained univariate lift") {
    auto plans = enumerate_index_sets(load_hp("ex4_6.json"));
    REQUIRE(plans.size() == 1);
    CHECK(plans[0].J.empty());
    CHECK(plans[0].len == 1);
    CHECK_FALSE(plans[0].primed_active);
    CHECK(plans[0].t == 0);
}

TEST_CASE("index sets for the ball-constrained lift") {
    auto plans = enumerate_index_sets(load_hp("ex4_7a.json"));
    REQUIRE(plans.size() == 2);
    CHECK(plans[0].J.empty());
    CHECK(plans[1].J == std::vector<int>{0});
}

TEST_CASE("bordered matrix columns are the gradients") {
    HomogenizedProgram hp = load_hp("ex4_2.json");
    PolyMatrix m = bordered_jacobian(hp, {}, false);
    REQUIRE(m.rows() == 3);
    REQUIRE(m.cols() == 2);
    for (int i = 0; i < 3; ++i) {
        CHECK(m.at(i, 0) == hp.objective.differentiate(i));
        CHECK(m.at(i, 1) == hp.equalities[0].differentiate(i));
    }
    Polynomial x0 = Polynomial::variable(3, 0);
    CHECK(m.at(0, 0) == x0.pow(5) * Rational(6));
}

TEST_CASE("appended unit column for the sign constraint") {
    HomogenizedProgram hp = load_hp("ex4_7a.json");
    PolyMatrix base = bordered_jacobian(hp, {}, false);
    PolyMatrix primed = bordered_jacobian(hp, {}, true);
    REQUIRE(primed.cols() == base.cols() + 1);
    CHECK(primed.at(0, primed.cols() - 1) == Polynomial::constant(3, 1));
    for (int i = 1; i < primed.rows(); ++i)
        CHECK(primed.at(i, primed.cols() - 1).is_zero());
}

TEST_CASE("bordered matrix matches finite differences at random points") {
    HomogenizedProgram hp = load_hp("ex4_2.json");
    PolyMatrix m = bordered_jacobian(hp, {}, false);
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    const double h = 1e-5;
    std::vector<Polynomial> cols{hp.objective, hp.equalities[0]};
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> u(3);
        for (auto& v : u) v = unif(rng);
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 3; ++i) {
                std::vector<double> up = u, dn = u;
                up[i] += h;
                dn[i] -= h;
                double fd = (cols[j].eval(up) - cols[j].eval(dn)) / (2 * h);
                CHECK(m.at(i, j).eval(u) == doctest::Approx(fd).epsilon(1e-5));
            }
    }
}

TEST_CASE("reference minor of the lifted sextic system") {
    HomogenizedProgram hp = load_hp("ex4_2.json");
    auto minors = maximal_minors(bordered_jacobian(hp, {}, false));
    REQUIRE(minors.size() == 3);
    CHECK(minors[0].first == std::vector<int>{0, 1});
    CHECK(minors[2].first == std::vector<int>{1, 2});
    Polynomial x0 = Polynomial::variable(3, 0), x1 = Polynomial::variable(3, 1),
               x2 = Polynomial::variable(3, 2);
    Polynomial expect =
        x1.pow(3) * x2.pow(3) * x0.pow(2) * (x1.pow(2) - x2.pow(2)) * Rational(4);
    CHECK(same_up_to_sign(minors[2].second, expect));
}

TEST_CASE("lone minor of the cuspidal-constraint system") {
    // f = x1 x2^2 + x1, h = -x1^3 + x2^2
    Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
    Polynomial f = x1 * x2.pow(2) + x1;
    Polynomial h = -x1.pow(3) + x2.pow(2);
    PolyMatrix m(2, 2, 2);
    for (int i = 0; i < 2; ++i) {
        m.at(i, 0) = f.differentiate(i);
        m.at(i, 1) = h.differentiate(i);
    }
    auto minors = maximal_minors(m);
    REQUIRE(minors.size() == 1);
    Polynomial expect = x2 * (x2.pow(2) + Polynomial::constant(2, 1)) * Rational(2) +
                        x1.pow(3) * x2 * Rational(6);
    CHECK(same_up_to_sign(minors[0].second, expect));
}

TEST_CASE("augmentation of the unconstrained lifted sextic") {
    HomogenizedProgram hp = load_hp("ex4_2.json");
    JacobianAugmentedProgram jap = build_augmented(hp);
    CHECK(jap.nvars == 3);
    CHECK(jap.base_equalities.size() == 1);
    CHECK(jap.phis.size() == 3);
    for (const auto& phi : jap.phis) CHECK(phi.polynomial.degree() <= 10);
    CHECK(jap.all_equalities.size() == 4);
    REQUIRE(jap.nu_products.size() == 1);
    CHECK(jap.nu_products[0].product == Polynomial::constant(3, 1));
    // every defining equation vanishes at the known critical point
    std::vector<Rational> u{1, 1, 1};
    for (const auto& e : jap.all_equalities) CHECK(e.eval(u) == 0);
}

TEST_CASE("augmentation of the constrained univariate lift") {
    HomogenizedProgram hp = load_hp("ex4_6.json");
    JacobianAugmentedProgram jap = build_augmented(hp);
    REQUIRE(jap.phis.size() == 1);
    auto minors = maximal_minors(bordered_jacobian(hp, {}, false));
    REQUIRE(minors.size() == 1);
    Polynomial expect = minors[0].second * hp.inequalities[0] * hp.inequalities[1];
    CHECK(same_up_to_sign(jap.phis[0].polynomial, expect));
}

TEST_CASE("dropped equations factor through the sign variable") {
    HomogenizedProgram hp = load_hp("ex4_7a.json");
    auto plans = enumerate_index_sets(hp);
    Polynomial x0 = Polynomial::variable(hp.nvars, 0);
    bool any = false;
    for (const auto& plan : plans) {
        if (!plan.primed_active || plan.t == 0) continue;
        PolyMatrix base = bordered_jacobian(hp, plan.J, false);
        PolyMatrix primed = bordered_jacobian(hp, plan.J, true);
        auto bm = maximal_minors(base);
        auto pm = maximal_minors(primed);
        Polynomial prod_primed = Polynomial::constant(hp.nvars, 1);
        for (int j = 0; j < hp.m2; ++j) {
            bool in_j = false;
            for (int k : plan.J) in_j = in_j || (k == j);
            if (!in_j) prod_primed = prod_primed * hp.inequalities[j];
        }
        Polynomial prod_base = prod_primed * x0;
        for (const auto& [rows, minor] : bm) {
            bool avoids0 = true;
            for (int r : rows) avoids0 = avoids0 && (r != 0);
            if (!avoids0 || minor.is_zero()) continue;
            std::vector<int> want{0};
            want.insert(want.end(), rows.begin(), rows.end());
            for (const auto& [prows, pminor] : pm) {
                if (prows != want) continue;
                any = true;
                CHECK(same_up_to_sign(minor * prod_base, pminor * prod_primed * x0));
            }
        }
    }
    CHECK(any);
}

TEST_CASE("minors vanish exactly where the matrix drops rank") {
    for (const char* name : {"ex4_2.json", "ex4_6.json"}) {
        HomogenizedProgram hp = load_hp(name);
        auto plans = enumerate_index_sets(hp);
        std::mt19937 rng(59);
        for (const auto& plan : plans) {
            PolyMatrix m = bordered_jacobian(hp, plan.J, false);
            auto minors = maximal_minors(m);
            for (int trial = 0; trial < 50; ++trial) {
                auto pt = random_rational_point(rng, hp.nvars);
                bool all_zero = true;
                for (const auto& [rows, poly] : minors)
                    all_zero = all_zero && (poly.eval(pt) == 0);
                bool deficient = rank_at(m, pt) < m.cols();
                CHECK(all_zero == deficient);
            }
        }
    }
}

TEST_CASE("plain path on the cuspidal constraint") {
    Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
    Polynomial f = x1 * x2.pow(2) + x1;
    Polynomial h = -x1.pow(3) + x2.pow(2);
    JacobianAugmentedProgram jap = build_augmented_general(f, {h}, {});
    REQUIRE(jap.phis.size() == 1);
    Polynomial expect = x2 * (x2.pow(2) + Polynomial::constant(2, 1)) * Rational(2) +
                        x1.pow(3) * x2 * Rational(6);
    CHECK(same_up_to_sign(jap.phis[0].polynomial, expect));
    CHECK(jap.base_equalities.size() == 1);
    CHECK(jap.all_equalities.size() == 2);
}

TEST_CASE("plain path on an unconstrained objective gives the gradient system") {
    Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
    Polynomial f = x1.pow(4) + x2.pow(4) - x1 * x2;
    JacobianAugmentedProgram jap = build_augmented_general(f, {}, {});
    REQUIRE(jap.phis.size() == 2);
    CHECK(same_up_to_sign(jap.phis[0].polynomial, f.differentiate(0)));
    CHECK(same_up_to_sign(jap.phis[1].polynomial, f.differentiate(1)));
}
