#include "ratopt/extract.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <random>

namespace ratopt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int basis_count_up_to(const MonomialBasis& basis, int degree) {
    int c = 0;
    while (c < basis.size() && total_degree(basis.monomials[c]) <= degree) ++c;
    return c;
}

}  // namespace

MatrixXd moment_matrix(const MomentRelaxation& rel, const VectorXd& y) {
    if (rel.blocks.empty() || !rel.blocks.front().label.starts_with("M"))
        throw std::invalid_argument("relaxation has no leading moment block");
    const auto& blk = rel.blocks.front();
    MatrixXd m(blk.side, blk.side);
    Exponents sum(rel.nvars);
    for (int i = 0; i < blk.side; ++i)
        for (int j = i; j < blk.side; ++j) {
            for (int v = 0; v < rel.nvars; ++v)
                sum[v] = blk.basis.monomials[i][v] + blk.basis.monomials[j][v];
            m(i, j) = m(j, i) = y(rel.key_index.at(sum));
        }
    return m;
}

int numeric_rank(const MatrixXd& m, double rel_tol) {
    if (m.rows() == 0) return 0;
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * std::max(s(0), 1e-300);
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++r;
    return r;
}

FlatnessReport flat_truncation(const MatrixXd& m, const MonomialBasis& basis, int dhat,
                               int t_min, double rank_tol) {
    FlatnessReport rep;
    rep.dhat = std::max(dhat, 1);
    const int order = basis.max_degree;
    for (int t = 0; t <= order; ++t) {
        const int side = basis_count_up_to(basis, t);
        rep.ranks.push_back(numeric_rank(m.topLeftCorner(side, side), rank_tol));
    }
    for (int t = std::max(t_min, rep.dhat); t <= order; ++t)
        if (rep.ranks[t - rep.dhat] == rep.ranks[t])
            rep.candidates.push_back({t, rep.ranks[t], true});
    // rank plateaus at any order, largest first; results from this path are
    // only kept when the extracted atoms verify
    for (int t = order; t >= 1; --t) {
        if (rep.ranks[t - 1] != rep.ranks[t]) continue;
        bool seen = false;
        for (const auto& c : rep.candidates)
            if (c.t == t && c.rank == rep.ranks[t]) seen = true;
        if (!seen) rep.candidates.push_back({t, rep.ranks[t], false});
    }
    if (!rep.candidates.empty()) {
        rep.t = rep.candidates.front().t;
        rep.rank = rep.candidates.front().rank;
        rep.strict = rep.candidates.front().strict;
        rep.heuristic = !rep.strict;
    }
    return rep;
}

std::optional<AtomicMeasure> extract_atoms(const MatrixXd& m, const MonomialBasis& basis,
                                           int t, int rank, double rank_tol) {
    const int side = basis_count_up_to(basis, t);
    const int nvars = basis.nvars;
    if (rank <= 0 || rank > side) return std::nullopt;
    MatrixXd mt = m.topLeftCorner(side, side);

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(mt);
    if (es.info() != Eigen::Success) return std::nullopt;
    // top `rank` eigenpairs, eigenvalues ascending in Eigen
    MatrixXd v(side, rank);
    for (int r = 0; r < rank; ++r) {
        const int idx = side - 1 - r;
        const double lam = es.eigenvalues()(idx);
        if (lam <= 0) return std::nullopt;
        v.col(r) = std::sqrt(lam) * es.eigenvectors().col(idx);
    }

    // first `rank` independent rows in graded order (modified Gram-Schmidt)
    std::vector<int> pivots;
    MatrixXd q(rank, 0);
    const double indep_tol = 1e-7 * std::max(1.0, v.norm());
    for (int i = 0; i < side && static_cast<int>(pivots.size()) < rank; ++i) {
        VectorXd r = v.row(i).transpose();
        for (int c = 0; c < q.cols(); ++c) r -= q.col(c).dot(r) * q.col(c);
        if (r.norm() > indep_tol) {
            q.conservativeResize(rank, q.cols() + 1);
            q.col(q.cols() - 1) = r / r.norm();
            pivots.push_back(i);
        }
    }
    if (static_cast<int>(pivots.size()) < rank) return std::nullopt;

    MatrixXd vp(rank, rank);
    for (int r = 0; r < rank; ++r) vp.row(r) = v.row(pivots[r]);
    MatrixXd w = v * vp.inverse();  // rows of w express each basis row over the pivots

    // multiplication matrices: row j of N_a is the w-row of x_a * b_{pivot j}
    std::vector<MatrixXd> mult(nvars, MatrixXd(rank, rank));
    Exponents shifted(nvars);
    for (int a = 0; a < nvars; ++a) {
        for (int j = 0; j < rank; ++j) {
            shifted = basis.monomials[pivots[j]];
            shifted[a] += 1;
            if (total_degree(shifted) > t) return std::nullopt;
            auto it = basis.index.find(shifted);
            if (it == basis.index.end() || it->second >= side) return std::nullopt;
            mult[a].row(j) = w.row(it->second);
        }
    }

    std::mt19937 rng(0);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    VectorXd lam(nvars);
    for (int a = 0; a < nvars; ++a) lam(a) = unif(rng);
    lam /= lam.sum();
    MatrixXd combined = MatrixXd::Zero(rank, rank);
    for (int a = 0; a < nvars; ++a) combined += lam(a) * mult[a];

    Eigen::RealSchur<MatrixXd> schur(combined);
    if (schur.info() != Eigen::Success) return std::nullopt;
    const MatrixXd& tt = schur.matrixT();
    for (int j = 0; j + 1 < rank; ++j)
        if (std::abs(tt(j + 1, j)) > 1e-7 * std::max(1.0, tt.norm()))
            return std::nullopt;  // complex conjugate cluster
    const MatrixXd& qq = schur.matrixU();

    AtomicMeasure out;
    out.atoms.assign(rank, std::vector<double>(nvars));
    for (int a = 0; a < nvars; ++a) {
        MatrixXd d = qq.transpose() * mult[a] * qq;
        for (int j = 0; j < rank; ++j) out.atoms[j][a] = d(j, j);
    }

    // weights from the moment vector y_b = sum_j w_j b(atom_j)
    MatrixXd vand(side, rank);
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < rank; ++j) {
            double mono = 1;
            for (int a = 0; a < nvars; ++a)
                for (int e = 0; e < basis.monomials[i][a]; ++e) mono *= out.atoms[j][a];
            vand(i, j) = mono;
        }
    VectorXd wts = vand.colPivHouseholderQr().solve(mt.col(0));
    double total = 0;
    for (int j = 0; j < rank; ++j) {
        if (wts(j) < 1e-6) return std::nullopt;
        total += wts(j);
    }
    if (std::abs(total - 1) > 1e-2) return std::nullopt;
    out.weights.assign(wts.data(), wts.data() + rank);
    (void)rank_tol;
    return out;
}

std::vector<double> polish_point(const std::vector<Polynomial>& equalities,
                                 const std::vector<double>& point, int max_iters) {
    const int m = static_cast<int>(equalities.size());
    if (m == 0 || point.empty()) return point;
    const int n = static_cast<int>(point.size());

    std::vector<std::vector<Polynomial>> grad(m);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < n; ++a) grad[i].push_back(equalities[i].differentiate(a));

    auto residual = [&](const std::vector<double>& x, VectorXd& r) {
        double nrm = 0;
        r.resize(m);
        for (int i = 0; i < m; ++i) {
            r(i) = equalities[i].eval(x);
            nrm += r(i) * r(i);
        }
        return std::sqrt(nrm);
    };

    std::vector<double> x = point;
    VectorXd r;
    double rn = residual(x, r);
    for (int it = 0; it < max_iters && rn > 1e-14; ++it) {
        MatrixXd j(m, n);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) j(i, a) = grad[i][a].eval(x);
        VectorXd dx = j.colPivHouseholderQr().solve(-r);
        double step = 1;
        bool improved = false;
        for (int h = 0; h < 12; ++h, step *= 0.5) {
            std::vector<double> trial = x;
            for (int a = 0; a < n; ++a) trial[a] += step * dx(a);
            VectorXd rt;
            const double rtn = residual(trial, rt);
            if (rtn < rn) {
                x = std::move(trial);
                r = rt;
                rn = rtn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return x;
}

bool verify_point(const std::vector<Polynomial>& equalities,
                  const std::vector<Polynomial>& inequalities, const std::vector<double>& point,
                  double tol) {
    double scale = 1;
    for (double x : point) scale = std::max(scale, std::abs(x));
    for (const auto& e : equalities) {
        double c = 1;
        for (const auto& [mono, coeff] : e.terms())
            c = std::max(c, std::abs(to_double(coeff)));
        if (std::abs(e.eval(point)) > tol * c * std::max(1.0, std::pow(scale, std::max(e.degree(), 0))))
            return false;
    }
    for (const auto& g : inequalities) {
        double c = 1;
        for (const auto& [mono, coeff] : g.terms())
            c = std::max(c, std::abs(to_double(coeff)));
        if (g.eval(point) < -tol * c * std::max(1.0, std::pow(scale, std::max(g.degree(), 0))))
            return false;
    }
    return true;
}

}  // namespace ratopt
