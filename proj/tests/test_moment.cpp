#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "ratopt/moment.hpp"
#include "test_support.hpp"

using namespace ratopt;
using testsupport::problem_path;
using testsupport::random_polynomial;
using testsupport::random_rational_point;
using testsupport::slurp;

namespace {

JacobianAugmentedProgram load_jap(const std::string& name) {
    return build_augmented(build_homogenized(parse_problem(slurp(problem_path(name)))));
}

Rational mono_eval(const Exponents& e, const std::vector<Rational>& u) {
    Rational v = 1;
    for (size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) v *= u[i];
    return v;
}

// Dense exact reconstruction of a localizing block at the point u.
std::vector<std::vector<Rational>> block_at(const LocalizingBlock& b,
                                            const std::vector<Rational>& u) {
    std::vector<std::vector<Rational>> m(b.side, std::vector<Rational>(b.side, 0));
    for (const auto& [alpha, entries] : b.coeff) {
        Rational ua = mono_eval(alpha, u);
        for (const auto& [i, j, c] : entries) {
            m[i][j] += c * ua;
            if (i != j) m[j][i] += c * ua;
        }
    }
    return m;
}

}  // namespace

TEST_CASE("basis sizes and ordering") {
    MonomialBasis b = monomial_basis(3, 2);
    CHECK(b.size() == 10);
    CHECK(b.monomials.front() == Exponents{0, 0, 0});

    MonomialBasis b7 = monomial_basis(3, 7);
    CHECK(b7.size() == 120);
    CHECK(b7.monomials.back() == Exponents{7, 0, 0});
    // reverse map is a bijection
    for (int i = 0; i < b7.size(); ++i) CHECK(b7.index_of(b7.monomials[i]) == i);
}

TEST_CASE("moment matrix coefficients are shifted indicators") {
    Polynomial one = Polynomial::constant(2, 1);
    LocalizingBlock b = localizing_coefficients(one, 1);
    CHECK(b.side == 3);
    int found = 0;
    for (const auto& [alpha, entries] : b.coeff)
        for (const auto& [i, j, c] : entries) {
            Exponents sum(2, 0);
            const auto& bi = b.basis.monomials[i];
            const auto& bj = b.basis.monomials[j];
            for (int k = 0; k < 2; ++k) sum[k] = bi[k] + bj[k];
            CHECK(sum == alpha);
            CHECK(c == 1);
            ++found;
        }
    CHECK(found == 6);  // upper triangle of a 3x3
}

TEST_CASE("degree-one weight truncates to a single entry") {
    Polynomial x = Polynomial::variable(1, 0);
    LocalizingBlock b = localizing_coefficients(x, 1);
    CHECK(b.side == 1);
    REQUIRE(b.coeff.size() == 1);
    const auto& [alpha, entries] = *b.coeff.begin();
    CHECK(alpha == Exponents{1});
    REQUIRE(entries.size() == 1);
    CHECK(std::get<2>(entries[0]) == 1);
}

TEST_CASE("localizing reconstruction identity at random points") {
    std::mt19937 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        Polynomial psi = random_polynomial(rng, 2, 3);
        if (psi.is_zero()) continue;
        int order = 2 + trial % 2;
        LocalizingBlock b = localizing_coefficients(psi, order);
        auto u = random_rational_point(rng, 2);
        auto m = block_at(b, u);
        Rational pu = psi.eval(u);
        for (int i = 0; i < b.side; ++i)
            for (int j = 0; j < b.side; ++j) {
                Rational expect =
                    pu * mono_eval(b.basis.monomials[i], u) * mono_eval(b.basis.monomials[j], u);
                CHECK(m[i][j] == expect);
            }
    }
}

TEST_CASE("vanishing weight gives the zero block at its root") {
    // the slice constraint vanishes at the unit point, so the reconstructed
    // block there is identically zero
    JacobianAugmentedProgram jap = load_jap("ex4_2.json");
    const Polynomial& qm1 = jap.base_equalities[0];
    LocalizingBlock b = localizing_coefficients(qm1, 4);
    std::vector<Rational> u{1, 1, 1};
    REQUIRE(qm1.eval(u) == 0);
    auto m = block_at(b, u);
    for (const auto& row : m)
        for (const auto& v : row) CHECK(v == 0);
}

TEST_CASE("relaxation sizes for the lifted sextic") {
    JacobianAugmentedProgram jap = load_jap("ex4_2.json");
    CHECK(minimum_order(jap) == 5);
    MomentRelaxation rel = assemble_relaxation(jap, 5);
    CHECK(rel.moment_keys.size() == 286);
    REQUIRE(rel.blocks.size() == 1);
    CHECK(rel.blocks[0].side == 56);
    CHECK_THROWS(assemble_relaxation(jap, 4));
}

TEST_CASE("relaxation block sides for the constrained univariate lift") {
    JacobianAugmentedProgram jap = load_jap("ex4_6.json");
    MomentRelaxation rel = assemble_relaxation(jap, 7);
    std::vector<int> sides;
    for (const auto& b : rel.blocks) sides.push_back(b.side);
    CHECK(sides == std::vector<int>{36, 15, 28, 10});
}

TEST_CASE("atomic moment vector is feasible with rank-one blocks") {
    JacobianAugmentedProgram jap = load_jap("ex4_2.json");
    MomentRelaxation rel = assemble_relaxation(jap, 5);
    // moments of the point mass at (1,1,1): every moment equals 1
    std::vector<Rational> y(rel.moment_keys.size(), 1);
    for (const auto& row : rel.equality_rows) {
        Rational acc = 0;
        for (const auto& [idx, c] : row.coeff) acc += c * y[idx];
        CHECK(acc == 0);
    }
    for (const auto& block : rel.blocks) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(block.side, block.side);
        for (const auto& [idx, entries] : block.entries)
            for (const auto& [i, j, c] : entries) {
                m(i, j) += to_double(c);
                if (i != j) m(j, i) += to_double(c);
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        CHECK(es.eigenvalues().minCoeff() >= -1e-9);
        int rank = 0;
        double top = es.eigenvalues().maxCoeff();
        for (int i = 0; i < block.side; ++i)
            if (es.eigenvalues()(i) > 1e-9 * top) ++rank;
        CHECK(rank == 1);
    }
    // objective functional evaluates the lifted objective at the atom
    Rational obj = 0;
    for (const auto& [idx, c] : rel.objective) obj += c * y[idx];
    CHECK(obj == 3);
}

TEST_CASE("equality rows cover every admissible shift") {
    JacobianAugmentedProgram jap = load_jap("ex4_6.json");
    MomentRelaxation rel = assemble_relaxation(jap, minimum_order(jap));
    // each equality with degree de contributes one row per shift of degree
    // <= 2N - 2*ceil(de/2); rows are deduplicated, so check a lower bound
    CHECK(!rel.equality_rows.empty());
    for (const auto& row : rel.equality_rows) {
        CHECK(row.source >= 0);
        CHECK(row.source < static_cast<int>(jap.all_equalities.size()));
    }
}
