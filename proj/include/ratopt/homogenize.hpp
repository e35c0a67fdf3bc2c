#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratopt/parser.hpp"

namespace ratopt {

// The homogenized program in n+1 variables (variable 0 is x0):
//   min p~  s.t.  h_i^hom = 0, q~ - 1 = 0, g_j^hom >= 0 [, x0 >= 0].
struct HomogenizedProgram {
    int nvars = 0;  // n + 1
    Polynomial objective;               // p~, homogeneous of degree d
    std::vector<Polynomial> equalities; // h_1^hom ... h_m1^hom, then q~ - 1
    std::vector<Polynomial> inequalities;  // g_1^hom ... g_m2^hom [, x0]
    bool x0_included = false;  // whether x0 >= 0 is carried as inequality m2+1
    int d = 0;                 // max{deg p, deg q}
    int m1 = 0, m2 = 0;        // counts from the source program

    HomogenizedProgram() : objective(0) {}

    // q~ - 1 is always the last equality.
    const Polynomial& dehomogenization_constraint() const { return equalities.back(); }
};

struct EquivalenceStatus {
    enum class Reason { Unconstrained, Degree, PositiveX0Minimizer, Uncertified };
    bool certified = false;
    Reason reason = Reason::Uncertified;
    std::string notes;
};

struct BackMapResult {
    enum class Attained { Attained, NotAttained, Unknown };
    std::vector<std::vector<double>> finite_minimizers;  // n-vectors x*/x0
    std::vector<std::vector<double>> asymptotic_atoms;   // (n+1)-vectors, x0 ~ 0
    Attained attained = Attained::Unknown;
};

// d = max{deg p, deg q}; constraints homogenized at their own degrees;
// x0 >= 0 is dropped when the source program is unconstrained.
HomogenizedProgram build_homogenized(const RationalProgram& rp);

// Certifies r* = s* syntactically (deg p > deg q) or through a verified
// minimizer with x0 > 0. Closedness at infinity is never decided; the
// uncertified note records that s* <= r* may be strict.
EquivalenceStatus certify_equivalence(const RationalProgram& rp, const HomogenizedProgram& hp,
                                      const std::vector<std::vector<double>>& best_atoms,
                                      double x0_threshold = 1e-4);

// Maps atoms with |x0| above the threshold (relative to the atom norm) to
// x*/x0; the rest are reported as asymptotic.
BackMapResult back_map(const std::vector<std::vector<double>>& atoms,
                       const HomogenizedProgram& hp, double x0_threshold = 1e-4);

}  // namespace ratopt
