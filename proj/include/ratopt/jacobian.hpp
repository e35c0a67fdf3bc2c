#pragma once

#include "ratopt/homogenize.hpp"

namespace ratopt {

// One index set J of inequality constraints, with the predicted shape of
// its minor system. In the homogenized path the special inequality x0 >= 0
// plays the role of constraint m2+1; J' = J u {x0}.
struct IndexSetPlan {
    std::vector<int> J;       // 0-based indices into the inequality list
    int len = 0;              // number of maximal minors of the base matrix
    int t = 0;                // minors avoiding the x0-derivative row (0 if primed inactive)
    bool primed_active = false;
};

// A defining equation of the augmented program: minor times the product of
// the inequality constraints outside the index set.
struct PhiEquation {
    Polynomial polynomial;
    std::vector<int> J;
    bool primed = false;
    std::vector<int> minor_rows;
    std::vector<int> multiplier_product;  // indices into the inequality list
};

struct NuProduct {
    std::vector<int> nu;  // subset of inequality indices
    Polynomial product;
};

// The program fed to the moment relaxation: base equalities plus the phi
// equations, with PSD localization over all nu-products of inequalities.
struct JacobianAugmentedProgram {
    int nvars = 0;
    Polynomial objective;
    std::vector<Polynomial> base_equalities;
    std::vector<Polynomial> inequalities;
    std::vector<PhiEquation> phis;
    std::vector<NuProduct> nu_products;
    std::vector<Polynomial> all_equalities;  // base_equalities then phi polynomials

    JacobianAugmentedProgram() : objective(0) {}
};

// Maximum number of inequality constraints entering nu-products; beyond
// this the 2^k PSD blocks are impractical.
inline constexpr int kProductCap = 7;

std::vector<IndexSetPlan> enumerate_index_sets(const HomogenizedProgram& hp);

// Columns: grad p~, grad h_i, grad(q~-1), grad g_j for j in J, plus the
// unit column e0 when primed. Rows are the n+1 partial derivatives.
PolyMatrix bordered_jacobian(const HomogenizedProgram& hp, const std::vector<int>& J,
                             bool primed);

// All maximal (cols x cols) minors in lexicographic row-set order,
// identically-zero minors included.
std::vector<std::pair<std::vector<int>, Polynomial>> maximal_minors(const PolyMatrix& m);

// Homogenized (rational) path.
JacobianAugmentedProgram build_augmented(const HomogenizedProgram& hp);

// Plain polynomial path, used when the denominator is constant.
JacobianAugmentedProgram build_augmented_general(const Polynomial& objective,
                                                 const std::vector<Polynomial>& equalities,
                                                 const std::vector<Polynomial>& inequalities);

}  // namespace ratopt
