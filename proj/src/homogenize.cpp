#include "ratopt/homogenize.hpp"

#include <cmath>

namespace ratopt {

HomogenizedProgram build_homogenized(const RationalProgram& rp) {
    if (rp.denominator.is_zero()) throw std::invalid_argument("zero denominator");
    HomogenizedProgram hp;
    const int n = rp.nvars();
    hp.nvars = n + 1;
    hp.m1 = static_cast<int>(rp.equalities.size());
    hp.m2 = static_cast<int>(rp.inequalities.size());
    hp.d = std::max(rp.numerator.degree(), rp.denominator.degree());
    hp.objective = rp.numerator.homogenize(hp.d);
    for (const auto& h : rp.equalities) hp.equalities.push_back(h.homogenize(h.degree()));
    hp.equalities.push_back(rp.denominator.homogenize(hp.d) -
                            Polynomial::constant(n + 1, 1));
    for (const auto& g : rp.inequalities) hp.inequalities.push_back(g.homogenize(g.degree()));
    hp.x0_included = (hp.m1 + hp.m2 > 0);
    if (hp.x0_included) hp.inequalities.push_back(Polynomial::variable(n + 1, 0));
    return hp;
}

namespace {

double atom_norm(const std::vector<double>& atom) {
    double s = 0;
    for (double v : atom) s += v * v;
    return std::sqrt(s);
}

bool has_positive_x0(const std::vector<std::vector<double>>& atoms, double threshold) {
    for (const auto& a : atoms)
        if (!a.empty() && a[0] > threshold * std::max(1.0, atom_norm(a))) return true;
    return false;
}

}  // namespace

EquivalenceStatus certify_equivalence(const RationalProgram& rp, const HomogenizedProgram& hp,
                                      const std::vector<std::vector<double>>& best_atoms,
                                      double x0_threshold) {
    (void)hp;
    EquivalenceStatus st;
    if (rp.equalities.empty() && rp.inequalities.empty()) {
        st.certified = true;
        st.reason = EquivalenceStatus::Reason::Unconstrained;
        st.notes = "no constraints: R^n is closed at infinity";
        return st;
    }
    if (rp.numerator.degree() > rp.denominator.degree()) {
        st.certified = true;
        st.reason = EquivalenceStatus::Reason::Degree;
        st.notes = "deg(p) > deg(q): every feasible point of the homogenized program has x0 > 0";
        return st;
    }
    if (has_positive_x0(best_atoms, x0_threshold)) {
        st.certified = true;
        st.reason = EquivalenceStatus::Reason::PositiveX0Minimizer;
        st.notes = "a verified minimizer of the homogenized program has x0 > 0";
        return st;
    }
    st.certified = false;
    st.reason = EquivalenceStatus::Reason::Uncertified;
    st.notes =
        "equivalence not certified: the feasible set may fail to be closed at infinity, "
        "in which case the reported value is a strict lower bound of the true minimum";
    return st;
}

BackMapResult back_map(const std::vector<std::vector<double>>& atoms,
                       const HomogenizedProgram& hp, double x0_threshold) {
    BackMapResult out;
    if (atoms.empty()) {
        out.attained = BackMapResult::Attained::Unknown;
        return out;
    }
    for (const auto& a : atoms) {
        double x0 = a[0];
        bool finite = std::abs(x0) > x0_threshold * std::max(1.0, atom_norm(a));
        // with x0 carried as a constraint only x0 >= 0 atoms occur; without
        // it the antipodal atom maps to the same point of R^n
        if (finite && hp.x0_included && x0 < 0) finite = false;
        if (finite) {
            std::vector<double> y(a.size() - 1);
            for (std::size_t i = 1; i < a.size(); ++i) y[i - 1] = a[i] / x0;
            out.finite_minimizers.push_back(std::move(y));
        } else {
            out.asymptotic_atoms.push_back(a);
        }
    }
    out.attained = out.finite_minimizers.empty() ? BackMapResult::Attained::NotAttained
                                                 : BackMapResult::Attained::Attained;
    return out;
}

}  // namespace ratopt
