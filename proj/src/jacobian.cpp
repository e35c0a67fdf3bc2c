#include "ratopt/jacobian.hpp"

#include <algorithm>
#include <cassert>

namespace ratopt {
namespace {

Polynomial gradient_entry(const Polynomial& p, int var) { return p.differentiate(var); }

std::vector<Polynomial> base_columns(const HomogenizedProgram& hp, const std::vector<int>& J) {
    std::vector<Polynomial> cols;
    cols.push_back(hp.objective);
    for (const auto& h : hp.equalities) cols.push_back(h);  // includes q~ - 1 last
    for (int j : J) cols.push_back(hp.inequalities[j]);
    return cols;
}

Polynomial product_of(const JacobianAugmentedProgram& jap, const std::vector<int>& idx) {
    Polynomial p = Polynomial::constant(jap.nvars, 1);
    for (int j : idx) p = p * jap.inequalities[j];
    return p;
}

void add_nu_products(JacobianAugmentedProgram& jap) {
    const int k = static_cast<int>(jap.inequalities.size());
    if (k > kProductCap)
        throw std::invalid_argument(
            "too many inequality constraints for the preordering blocks (cap " +
            std::to_string(kProductCap) + "); reduce the constraint count");
    for (int mask = 0; mask < (1 << k); ++mask) {
        NuProduct np;
        for (int j = 0; j < k; ++j)
            if (mask & (1 << j)) np.nu.push_back(j);
        np.product = product_of(jap, np.nu);
        jap.nu_products.push_back(std::move(np));
    }
}

// deg eta <= sum of column-polynomial degrees minus column count
void check_phi_degree(const PhiEquation& phi, const std::vector<Polynomial>& cols,
                      const std::vector<Polynomial>& ineqs) {
    int bound = 0;
    for (const auto& c : cols) bound += std::max(c.degree() - 1, 0);
    for (int j : phi.multiplier_product) bound += std::max(ineqs[j].degree(), 0);
    assert(phi.polynomial.degree() <= bound);
    (void)bound;
}

}  // namespace

std::vector<IndexSetPlan> enumerate_index_sets(const HomogenizedProgram& hp) {
    const int n = hp.nvars - 1;
    const int m1 = hp.m1;
    const int m2 = hp.m2;
    const int m = std::min(m1 + m2 + 2, n);
    const int l = std::min(m - m1 - 1, m2);

    std::vector<IndexSetPlan> plans;
    for (int k = 0; k <= std::max(l, 0); ++k) {
        if (k > m2) break;
        if (k > 0 && k > l) break;
        for (auto& J : subsets_of_size(m2, k)) {
            IndexSetPlan plan;
            plan.J = J;
            const int c = m1 + k + 2;  // columns of the base bordered Jacobian
            plan.len = static_cast<int>(binomial(n + 1, c));
            plan.primed_active = hp.x0_included && (k + 1 <= m - m1 - 1);
            plan.t = plan.primed_active ? static_cast<int>(binomial(n, c)) : 0;
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

PolyMatrix bordered_jacobian(const HomogenizedProgram& hp, const std::vector<int>& J,
                             bool primed) {
    auto cols = base_columns(hp, J);
    const int ncols = static_cast<int>(cols.size()) + (primed ? 1 : 0);
    PolyMatrix m(hp.nvars, ncols, hp.nvars);
    for (int j = 0; j < static_cast<int>(cols.size()); ++j)
        for (int i = 0; i < hp.nvars; ++i) m.at(i, j) = gradient_entry(cols[j], i);
    if (primed) {
        // gradient of x0 is the unit vector e0
        m.at(0, ncols - 1) = Polynomial::constant(hp.nvars, 1);
    }
    return m;
}

std::vector<std::pair<std::vector<int>, Polynomial>> maximal_minors(const PolyMatrix& m) {
    if (m.rows() < m.cols()) throw std::invalid_argument("fewer rows than columns");
    std::vector<std::pair<std::vector<int>, Polynomial>> out;
    for (auto& rows : subsets_of_size(m.rows(), m.cols()))
        out.emplace_back(rows, m.select_rows(rows).determinant());
    return out;
}

JacobianAugmentedProgram build_augmented(const HomogenizedProgram& hp) {
    JacobianAugmentedProgram jap;
    jap.nvars = hp.nvars;
    jap.objective = hp.objective;
    jap.base_equalities = hp.equalities;
    jap.inequalities = hp.inequalities;

    const int m2 = hp.m2;
    const int x0_index = m2;  // position of the x0 inequality when included

    for (const auto& plan : enumerate_index_sets(hp)) {
        PolyMatrix b = bordered_jacobian(hp, plan.J, false);
        if (b.cols() > b.rows()) continue;
        for (auto& [rows, eta] : maximal_minors(b)) {
            if (eta.is_zero()) continue;
            bool avoids_row0 = std::find(rows.begin(), rows.end(), 0) == rows.end();
            bool primed = plan.primed_active && avoids_row0;
            PhiEquation phi;
            phi.J = plan.J;
            phi.primed = primed;
            phi.minor_rows = rows;
            for (int j = 0; j < m2; ++j)
                if (std::find(plan.J.begin(), plan.J.end(), j) == plan.J.end())
                    phi.multiplier_product.push_back(j);
            if (hp.x0_included && !primed) phi.multiplier_product.push_back(x0_index);
            phi.polynomial = eta * product_of(jap, phi.multiplier_product);
            check_phi_degree(phi, base_columns(hp, plan.J), jap.inequalities);
            jap.phis.push_back(std::move(phi));
        }
    }

    add_nu_products(jap);
    jap.all_equalities = jap.base_equalities;
    for (const auto& phi : jap.phis) jap.all_equalities.push_back(phi.polynomial);
    return jap;
}

JacobianAugmentedProgram build_augmented_general(const Polynomial& objective,
                                                 const std::vector<Polynomial>& equalities,
                                                 const std::vector<Polynomial>& inequalities) {
    const int n = objective.nvars();
    const int m1 = static_cast<int>(equalities.size());
    const int m2 = static_cast<int>(inequalities.size());
    if (m1 > n) throw std::invalid_argument("more equality constraints than variables");

    JacobianAugmentedProgram jap;
    jap.nvars = n;
    jap.objective = objective;
    jap.base_equalities = equalities;
    jap.inequalities = inequalities;

    const int m = std::min(m1 + m2, n - 1);
    for (int k = 0; k <= std::max(m - m1, 0); ++k) {
        if (k > m2) break;
        if (k > 0 && k > m - m1) break;
        for (auto& J : subsets_of_size(m2, k)) {
            const int c = m1 + k + 1;
            if (c > n) continue;
            PolyMatrix b(n, c, n);
            std::vector<Polynomial> cols;
            cols.push_back(objective);
            for (const auto& h : equalities) cols.push_back(h);
            for (int j : J) cols.push_back(inequalities[j]);
            for (int jcol = 0; jcol < c; ++jcol)
                for (int i = 0; i < n; ++i) b.at(i, jcol) = cols[jcol].differentiate(i);
            for (auto& [rows, eta] : maximal_minors(b)) {
                if (eta.is_zero()) continue;
                PhiEquation phi;
                phi.J = J;
                phi.minor_rows = rows;
                for (int j = 0; j < m2; ++j)
                    if (std::find(J.begin(), J.end(), j) == J.end())
                        phi.multiplier_product.push_back(j);
                phi.polynomial = eta * product_of(jap, phi.multiplier_product);
                check_phi_degree(phi, cols, jap.inequalities);
                jap.phis.push_back(std::move(phi));
            }
        }
    }

    add_nu_products(jap);
    jap.all_equalities = jap.base_equalities;
    for (const auto& phi : jap.phis) jap.all_equalities.push_back(phi.polynomial);
    return jap;
}

}  // namespace ratopt
