#pragma once

#include <map>

#include "ratopt/jacobian.hpp"

namespace ratopt {

// All monomials of degree <= max_degree in graded-lex order, with the
// reverse index map.
struct MonomialBasis {
    int nvars = 0;
    int max_degree = 0;
    std::vector<Exponents> monomials;
    std::map<Exponents, int, GradedLexLess> index;

    int size() const { return static_cast<int>(monomials.size()); }
    int index_of(const Exponents& e) const;
};

MonomialBasis monomial_basis(int nvars, int degree);

// Coefficient tensor of a localizing matrix: for each moment key alpha a
// sparse symmetric matrix (upper-triangle entries) over the degree-d basis.
struct LocalizingBlock {
    std::string label;
    int d = 0;     // N - ceil(deg psi / 2)
    int side = 0;  // C(nvars + d, nvars)
    MonomialBasis basis;
    // alpha -> upper-triangle entries (i <= j)
    std::map<Exponents, std::vector<std::tuple<int, int, Rational>>, GradedLexLess> coeff;
};

// Builds the coefficient map of L_psi^(N); throws when the truncation is
// empty (d < 0).
LocalizingBlock localizing_coefficients(const Polynomial& psi, int order,
                                        const std::string& label = "");

struct MomentRelaxation {
    int nvars = 0;
    int order = 0;

    // compacted moment-vector layout, y0 (constant monomial) first
    std::vector<Exponents> moment_keys;
    std::map<Exponents, int, GradedLexLess> key_index;

    std::vector<std::pair<int, Rational>> objective;  // L_objective over y

    struct Row {
        int source = 0;    // index into the augmented program's all_equalities
        Exponents delta;   // the shift x^delta
        std::vector<std::pair<int, Rational>> coeff;
    };
    std::vector<Row> equality_rows;  // each <e x^delta, y> = 0

    struct Block {
        std::string label;
        int nu_index = 0;  // position in the augmented program's nu_products
        int d = 0;
        int side = 0;
        MonomialBasis basis;
        std::map<int, std::vector<std::tuple<int, int, Rational>>> entries;  // y index -> A_alpha
    };
    std::vector<Block> blocks;  // one per nu-product with d >= 0; block 0 is M_N

    int y0_index = 0;  // normalization y[y0_index] = 1
};

// Least admissible relaxation order for the augmented program.
int minimum_order(const JacobianAugmentedProgram& jap);

MomentRelaxation assemble_relaxation(const JacobianAugmentedProgram& jap, int order);

}  // namespace ratopt
