#include "ratopt/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ratopt {

Polynomial Polynomial::constant(int nvars, const Rational& c) {
    Polynomial p(nvars);
    if (c != 0) p.terms_[Exponents(nvars, 0)] = c;
    return p;
}

Polynomial Polynomial::variable(int nvars, int index) {
    if (index < 0 || index >= nvars) throw std::out_of_range("variable index out of range");
    Polynomial p(nvars);
    Exponents e(nvars, 0);
    e[index] = 1;
    p.terms_[e] = 1;
    return p;
}

int Polynomial::degree() const {
    if (terms_.empty()) return -1;
    // graded order: the last term has maximal degree
    return total_degree(terms_.rbegin()->first);
}

Rational Polynomial::coefficient(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::set_coefficient(const Exponents& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent length mismatch");
    if (c == 0)
        terms_.erase(e);
    else
        terms_[e] = c;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent length mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_[e] = c;
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Polynomial::check_vars(const Polynomial& other) const {
    if (nvars_ != other.nvars_) throw std::invalid_argument("polynomial variable-count mismatch");
}

Polynomial Polynomial::operator-() const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    check_vars(other);
    Polynomial r = *this;
    for (const auto& [e, c] : other.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
    check_vars(other);
    Polynomial r = *this;
    for (const auto& [e, c] : other.terms_) r.add_term(e, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    check_vars(other);
    Polynomial r(nvars_);
    Exponents e(nvars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : other.terms_) {
            for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::operator*(const Rational& s) const {
    Polynomial r(nvars_);
    if (s == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_[e] = c * s;
    return r;
}

Polynomial Polynomial::pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative exponent");
    Polynomial r = constant(nvars_, 1);
    Polynomial base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        base = base * base;
        k >>= 1;
    }
    return r;
}

Polynomial Polynomial::differentiate(int var) const {
    if (var < 0 || var >= nvars_) throw std::out_of_range("derivative index out of range");
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        r.add_term(d, c * e[var]);
    }
    return r;
}

Polynomial Polynomial::homogenize(int target_degree) const {
    if (target_degree < degree()) throw std::invalid_argument("homogenization degree below polynomial degree");
    Polynomial r(nvars_ + 1);
    for (const auto& [e, c] : terms_) {
        Exponents h(nvars_ + 1);
        h[0] = target_degree - total_degree(e);
        std::copy(e.begin(), e.end(), h.begin() + 1);
        r.terms_[h] = c;
    }
    return r;
}

Polynomial Polynomial::dehomogenize() const {
    if (nvars_ < 1) throw std::invalid_argument("no variable to dehomogenize");
    Polynomial r(nvars_ - 1);
    for (const auto& [e, c] : terms_) r.add_term(Exponents(e.begin() + 1, e.end()), c);
    return r;
}

Rational Polynomial::eval(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != nvars_) throw std::invalid_argument("evaluation point length mismatch");
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < nvars_; ++i)
            for (int k = 0; k < e[i]; ++k) t *= point[i];
        sum += t;
    }
    return sum;
}

double Polynomial::eval(const std::vector<double>& point) const {
    if (static_cast<int>(point.size()) != nvars_) throw std::invalid_argument("evaluation point length mismatch");
    double sum = 0;
    for (const auto& [e, c] : terms_) {
        double t = to_double(c);
        for (int i = 0; i < nvars_; ++i)
            if (e[i] != 0) t *= std::pow(point[i], e[i]);
        sum += t;
    }
    return sum;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // highest degree first reads more naturally
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) {
                out << "-";
                a = -a;
            }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_vars = total_degree(e) > 0;
        bool coeff_shown = (a != 1) || !has_vars;
        if (coeff_shown) out << a.str();
        bool need_star = coeff_shown;
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            if (need_star) out << "*";
            out << names[i];
            if (e[i] > 1) out << "^" << e[i];
            need_star = true;
        }
    }
    return out.str();
}

std::string Polynomial::to_string() const {
    std::vector<std::string> names;
    for (int i = 1; i <= nvars_; ++i) names.push_back("x" + std::to_string(i));
    return to_string(names);
}

PolyMatrix::PolyMatrix(int rows, int cols, int nvars)
    : rows_(rows), cols_(cols), nvars_(nvars), entries_(rows * cols, Polynomial(nvars)) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("matrix dimensions must be positive");
}

PolyMatrix PolyMatrix::select_rows(const std::vector<int>& rows) const {
    PolyMatrix m(static_cast<int>(rows.size()), cols_, nvars_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols_; ++j) m.at(static_cast<int>(i), j) = at(rows[i], j);
    return m;
}

Polynomial PolyMatrix::determinant() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    const int n = rows_;
    if (n == 1) return at(0, 0);
    // Laplace expansion along the first column; matrices here are tiny.
    Polynomial det(nvars_);
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        if (at(i, 0).is_zero()) continue;
        rest.clear();
        for (int k = 0; k < n; ++k)
            if (k != i) rest.push_back(k);
        PolyMatrix sub(n - 1, n - 1, nvars_);
        for (int r = 0; r < n - 1; ++r)
            for (int c = 0; c < n - 1; ++c) sub.at(r, c) = at(rest[r], c + 1);
        Polynomial cof = at(i, 0) * sub.determinant();
        det = (i % 2 == 0) ? det + cof : det - cof;
    }
    return det;
}

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (k == 0) out.assign(1, {});
    return out;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

}  // namespace ratopt
