#pragma once

#include <map>
#include <string>
#include <vector>

#include "ratopt/rational.hpp"

namespace ratopt {

// Exponent vector of a monomial; length equals the owning polynomial's
// variable count.
using Exponents = std::vector<int>;

inline int total_degree(const Exponents& e) {
    int d = 0;
    for (int k : e) d += k;
    return d;
}

// Graded lexicographic order: total degree first, then plain lex on the
// exponent vector. Used everywhere a monomial ordering is needed so basis
// indexing is deterministic across modules.
struct GradedLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const {
        int da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

// Sparse multivariate polynomial with exact rational coefficients.
// Immutable in spirit: all operations return new values. The zero
// polynomial has an empty term map and degree() == -1.
class Polynomial {
  public:
    using TermMap = std::map<Exponents, Rational, GradedLexLess>;

    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c);
    static Polynomial variable(int nvars, int index);

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // -1 for the zero polynomial; callers must branch on it.
    int degree() const;

    Rational coefficient(const Exponents& e) const;
    void set_coefficient(const Exponents& e, const Rational& c);
    void add_term(const Exponents& e, const Rational& c);

    Polynomial operator-() const;
    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator-(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    Polynomial operator*(const Rational& s) const;
    bool operator==(const Polynomial& other) const {
        return nvars_ == other.nvars_ && terms_ == other.terms_;
    }

    Polynomial pow(int k) const;

    // Exact partial derivative with respect to variable `var`.
    Polynomial differentiate(int var) const;

    // x^a -> x0^(d-|a|) x^a with x0 prepended as variable 0; requires
    // d >= degree(). Result is homogeneous of degree d (or zero).
    Polynomial homogenize(int target_degree) const;

    // Substitutes variable 0 = 1 and drops it.
    Polynomial dehomogenize() const;

    Rational eval(const std::vector<Rational>& point) const;
    double eval(const std::vector<double>& point) const;

    std::string to_string(const std::vector<std::string>& names) const;
    std::string to_string() const;  // default names x1..xn

  private:
    void check_vars(const Polynomial& other) const;

    int nvars_;
    TermMap terms_;
};

// Row-major matrix of polynomials sharing a variable count.
class PolyMatrix {
  public:
    PolyMatrix(int rows, int cols, int nvars);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int nvars() const { return nvars_; }

    Polynomial& at(int i, int j) { return entries_[i * cols_ + j]; }
    const Polynomial& at(int i, int j) const { return entries_[i * cols_ + j]; }

    PolyMatrix select_rows(const std::vector<int>& rows) const;

    // Exact determinant by cofactor expansion; requires a square matrix.
    Polynomial determinant() const;

  private:
    int rows_, cols_, nvars_;
    std::vector<Polynomial> entries_;
};

// All k-subsets of {0,...,n-1} in lexicographic order.
std::vector<std::vector<int>> subsets_of_size(int n, int k);

BigInt binomial(int n, int k);

}  // namespace ratopt
