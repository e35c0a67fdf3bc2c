#include "ratopt/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace ratopt {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd dense_symmetric(int side, const std::vector<std::tuple<int, int, double>>& upper) {
    MatrixXd m = MatrixXd::Zero(side, side);
    for (const auto& [i, j, v] : upper) {
        m(i, j) = v;
        m(j, i) = v;
    }
    return m;
}

// <A, Y> with A given by its upper triangle
double sym_inner(const std::vector<std::tuple<int, int, double>>& upper, const MatrixXd& y) {
    double s = 0;
    for (const auto& [i, j, v] : upper) s += (i == j) ? v * y(i, i) : 2 * v * y(i, j);
    return s;
}

// block data after eliminating the equality rows: X(u) = Chat + sum_j u_j Ahat_j
struct BlockWork {
    int side = 0;
    MatrixXd Chat;
    std::vector<MatrixXd> Ahat;
};

// largest alpha in (0, 1] keeping X + alpha dX positive definite;
// L is the Cholesky factor of X
double max_step(const Eigen::LLT<MatrixXd>& llt, const MatrixXd& dx) {
    const auto& L = llt.matrixL();
    MatrixXd t = L.solve(dx);
    MatrixXd n = L.solve(t.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (n + n.transpose()),
                                               Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0) return 1.0;
    return std::min(1.0, -1.0 / lmin);
}

}  // namespace

const char* to_string(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::Unbounded: return "unbounded";
        case SdpStatus::MaxIterations: return "max_iterations";
        case SdpStatus::Numerical: return "numerical";
    }
    return "unknown";
}

SdpSolution solve_sdp(const SdpProblem& problem, const SdpParams& params) {
    const int n = problem.nvars;
    const int m = static_cast<int>(problem.eq_rows.size());
    const int nblocks = static_cast<int>(problem.blocks.size());
    SdpSolution sol;

    MatrixXd E = MatrixXd::Zero(m, n);
    VectorXd b(m);
    for (int r = 0; r < m; ++r) {
        b(r) = problem.eq_rhs[r];
        for (const auto& [idx, v] : problem.eq_rows[r]) E(r, idx) += v;
    }

    VectorXd yp = VectorXd::Zero(n);
    MatrixXd Z;
    if (m > 0) {
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E);
        yp = cod.solve(b);
        if ((E * yp - b).norm() > 1e-7 * (1 + b.norm())) {
            sol.status = SdpStatus::Infeasible;
            return sol;
        }
        Eigen::ColPivHouseholderQR<MatrixXd> qr(E.transpose());
        const int rank = static_cast<int>(qr.rank());
        MatrixXd q = qr.householderQ();
        Z = q.rightCols(n - rank);
    } else {
        Z = MatrixXd::Identity(n, n);
    }
    const int f = static_cast<int>(Z.cols());

    std::vector<BlockWork> work(nblocks);
    double cscale = 1;
    for (int k = 0; k < nblocks; ++k) {
        const auto& blk = problem.blocks[k];
        work[k].side = blk.side;
        work[k].Chat = dense_symmetric(blk.side, blk.constant);
        work[k].Ahat.assign(f, MatrixXd::Zero(blk.side, blk.side));
        for (const auto& [var, entries] : blk.coeff) {
            for (const auto& [i, j, v] : entries) {
                work[k].Chat(i, j) += yp(var) * v;
                if (i != j) work[k].Chat(j, i) += yp(var) * v;
                for (int col = 0; col < f; ++col) {
                    const double zv = Z(var, col);
                    if (zv == 0) continue;
                    work[k].Ahat[col](i, j) += zv * v;
                    if (i != j) work[k].Ahat[col](j, i) += zv * v;
                }
            }
        }
        cscale = std::max(cscale, work[k].Chat.norm());
    }

    VectorXd chat = Z.transpose() * problem.c;

    auto finish = [&](SdpStatus status, const VectorXd& u, const std::vector<MatrixXd>& Y,
                      double pobj, double dobj, double relgap, int iters) {
        sol.status = status;
        sol.x = yp + Z * u;
        sol.primal_value = pobj;
        sol.dual_value = dobj;
        sol.iterations = iters;
        sol.rel_gap = relgap;
        sol.eq_residual = m > 0 ? (E * sol.x - b).norm() : 0;
        sol.dual_blocks = Y;
        double mineig = std::numeric_limits<double>::infinity();
        VectorXd w = VectorXd::Zero(n);
        for (int k = 0; k < nblocks; ++k) {
            const auto& blk = problem.blocks[k];
            MatrixXd x = dense_symmetric(blk.side, blk.constant);
            for (const auto& [var, entries] : blk.coeff) {
                for (const auto& [i, j, v] : entries) {
                    x(i, j) += sol.x(var) * v;
                    if (i != j) x(j, i) += sol.x(var) * v;
                }
                if (k < static_cast<int>(Y.size())) w(var) += sym_inner(entries, Y[k]);
            }
            if (blk.side > 0) {
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(x, Eigen::EigenvaluesOnly);
                mineig = std::min(mineig, es.eigenvalues().minCoeff());
            }
        }
        sol.psd_min_eig = nblocks > 0 ? mineig : 0;
        if (m > 0) {
            Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(E.transpose());
            sol.eq_duals = cod.solve(problem.c - w);
        }
        return sol;
    };

    if (f == 0) {
        std::vector<MatrixXd> Y;
        for (auto& wk : work) Y.push_back(MatrixXd::Zero(wk.side, wk.side));
        double mineig = 0;
        for (auto& wk : work) {
            if (wk.side == 0) continue;
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(wk.Chat, Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        const double v = problem.c.dot(yp) + problem.objective_offset;
        if (mineig < -1e-7 * (1 + cscale))
            return finish(SdpStatus::Infeasible, VectorXd::Zero(0), Y, v, v, 0, 0);
        return finish(SdpStatus::Optimal, VectorXd::Zero(0), Y, v, v, 0, 0);
    }

    int total_dim = 0;
    for (auto& wk : work) total_dim += wk.side;
    if (total_dim == 0) {
        // linear program with no conic part does not occur here
        sol.status = SdpStatus::Numerical;
        return sol;
    }

    const double s0 = 10 * std::max({1.0, cscale, chat.lpNorm<Eigen::Infinity>()});
    VectorXd u = VectorXd::Zero(f);
    std::vector<MatrixXd> X, Y;
    for (auto& wk : work) {
        X.push_back(s0 * MatrixXd::Identity(wk.side, wk.side));
        Y.push_back(s0 * MatrixXd::Identity(wk.side, wk.side));
    }

    double pobj = 0, dobj = 0, relgap = 1;

    // best iterate seen so far, by worst-of residuals and gap; returned on
    // breakdown or stall instead of the last (possibly degraded) point
    struct Snapshot {
        VectorXd u;
        std::vector<MatrixXd> Y;
        double pobj = 0, dobj = 0, relgap = 1;
        double merit = std::numeric_limits<double>::infinity();
        int iter = 0;
    } best;
    int since_best = 0;
    double prev_pobj = std::numeric_limits<double>::quiet_NaN();
    int stagnant = 0;

    auto finish_best = [&](SdpStatus fallback, int iters) {
        if (best.merit == std::numeric_limits<double>::infinity())
            return finish(fallback, u, Y, pobj, dobj, relgap, iters);
        const bool near = best.merit < 1e2 * std::max(params.feas_tol, params.gap_tol);
        return finish(near ? SdpStatus::Optimal : fallback, best.u, best.Y, best.pobj,
                      best.dobj, best.relgap, iters);
    };

    for (int iter = 0; iter < params.max_iterations; ++iter) {
        std::vector<MatrixXd> P(nblocks);
        double pres = 0;
        for (int k = 0; k < nblocks; ++k) {
            P[k] = work[k].Chat - X[k];
            for (int j = 0; j < f; ++j) P[k] += u(j) * work[k].Ahat[j];
            pres = std::max(pres, P[k].norm() / (1 + work[k].Chat.norm()));
        }
        VectorXd d = chat;
        double ynorm = 0;
        for (int k = 0; k < nblocks; ++k) {
            ynorm = std::max(ynorm, Y[k].norm());
            for (int j = 0; j < f; ++j) d(j) -= work[k].Ahat[j].cwiseProduct(Y[k]).sum();
        }
        // scaled relative to the dual iterate: on degenerate problems the
        // dual optimum may be unattained and ||Y|| grows as the gap closes,
        // so the achievable absolute accuracy degrades proportionally
        const double dres = d.norm() / (1 + chat.norm() + ynorm);

        pobj = chat.dot(u) + problem.c.dot(yp) + problem.objective_offset;
        dobj = problem.c.dot(yp) + problem.objective_offset;
        for (int k = 0; k < nblocks; ++k) dobj -= work[k].Chat.cwiseProduct(Y[k]).sum();
        relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));

        double mu = 0;
        for (int k = 0; k < nblocks; ++k) mu += X[k].cwiseProduct(Y[k]).sum();
        mu /= total_dim;

        if (params.verbose)
            std::fprintf(stderr,
                         "it %3d  pobj %+.9e  dobj %+.9e  gap %.2e  pres %.2e  dres %.2e  mu %.2e  |Y| %.1e\n",
                         iter, pobj, dobj, relgap, pres, dres, mu, ynorm);

        sol.primal_residual = pres;
        sol.dual_residual = dres;

        if (pres < params.feas_tol && dres < params.feas_tol && relgap < params.gap_tol)
            return finish(SdpStatus::Optimal, u, Y, pobj, dobj, relgap, iter);

        // early exit while the dual iterate is still well inside the cone
        if (params.stop_at_dual_feas > 0 && iter >= 3 && d.norm() < params.stop_at_dual_feas)
            return finish(SdpStatus::MaxIterations, u, Y, pobj, dobj, relgap, iter);

        // on problems whose dual optimum is unattained the dual iterate
        // diverges and the gap never certifies; detect a feasible, stagnant
        // primal and stop with the (reliable) primal point
        if (pres < 1e-8 && std::abs(pobj - prev_pobj) < 1e-8 * (1 + std::abs(pobj)))
            ++stagnant;
        else
            stagnant = 0;
        prev_pobj = pobj;
        if (stagnant >= 5) {
            sol.primal_converged = true;
            return finish(SdpStatus::MaxIterations, u, Y, pobj, dobj, relgap, iter);
        }
        if (dobj > 1e10 && dres < 1e-6)
            return finish(SdpStatus::Infeasible, u, Y, pobj, dobj, relgap, iter);
        if (pobj < -1e10 && pres < 1e-6)
            return finish(SdpStatus::Unbounded, u, Y, pobj, dobj, relgap, iter);

        // In certificate mode optimality is irrelevant: the returned dual
        // blocks should satisfy their linear equations as tightly as
        // possible while staying clearly inside the cone, so that the
        // caller's projection onto the equations cannot push an eigenvalue
        // negative. Rank iterates by the absolute dual residual and
        // penalize those whose smallest dual eigenvalue is within an order
        // of magnitude of it.
        double merit;
        if (params.stop_at_dual_feas > 0) {
            double lminY = std::numeric_limits<double>::infinity();
            for (int k = 0; k < nblocks; ++k) {
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(Y[k], Eigen::EigenvaluesOnly);
                lminY = std::min(lminY, es.eigenvalues().minCoeff());
            }
            const double dn = d.norm();
            merit = lminY > 10 * dn ? dn : dn + 1.0;
            if (params.verbose)
                std::fprintf(stderr, "   cert-merit: dn %.2e lminY %.2e\n", dn, lminY);
        } else {
            merit = std::max({pres, dres, relgap});
        }
        if (merit < best.merit) {
            best = {u, Y, pobj, dobj, relgap, merit, iter};
            since_best = 0;
        } else if (++since_best > params.stall_limit) {
            // no progress for several iterations: the Newton system has hit
            // the floating-point floor, so return the best point seen
            return finish_best(SdpStatus::MaxIterations, iter);
        }

        // Nesterov-Todd scaling: V = R R^T with V X V = Y
        std::vector<Eigen::LLT<MatrixXd>> lltX(nblocks), lltY(nblocks);
        std::vector<MatrixXd> R(nblocks);
        bool broke = false;
        for (int k = 0; k < nblocks; ++k) {
            lltX[k].compute(X[k]);
            lltY[k].compute(Y[k]);
            if (lltX[k].info() != Eigen::Success || lltY[k].info() != Eigen::Success) {
                broke = true;
                break;
            }
            MatrixXd L = lltX[k].matrixL();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(L.transpose() * Y[k] * L);
            if (es.eigenvalues().minCoeff() <= 0) {
                broke = true;
                break;
            }
            MatrixXd qs = es.eigenvectors() *
                          es.eigenvalues().array().pow(0.25).matrix().asDiagonal();
            R[k] = L.transpose().triangularView<Eigen::Upper>().solve(qs);
        }
        if (broke)
            return finish_best(SdpStatus::Numerical, iter);

        // Schur matrix B_ij = sum_k tr(Ahat_i V Ahat_j V), via G_j = R^T Ahat_j R
        MatrixXd B = MatrixXd::Zero(f, f);
        std::vector<MatrixXd> Gmat(nblocks);
        for (int k = 0; k < nblocks; ++k) {
            const int s2 = work[k].side * work[k].side;
            Gmat[k].resize(s2, f);
            for (int j = 0; j < f; ++j) {
                MatrixXd g = R[k].transpose() * work[k].Ahat[j] * R[k];
                Gmat[k].col(j) = Eigen::Map<VectorXd>(g.data(), s2);
            }
            B.noalias() += Gmat[k].transpose() * Gmat[k];
        }
        Eigen::LDLT<MatrixXd> Bfact(B);
        if (Bfact.info() != Eigen::Success)
            return finish_best(SdpStatus::Numerical, iter);

        auto newton = [&](const std::vector<MatrixXd>& Tc, VectorXd& du,
                          std::vector<MatrixXd>& dX, std::vector<MatrixXd>& dY) {
            VectorXd rhs = -d;
            for (int k = 0; k < nblocks; ++k) {
                MatrixXd q = R[k] * (R[k].transpose() * (Tc[k] - P[k]) * R[k]) * R[k].transpose();
                for (int j = 0; j < f; ++j) rhs(j) += work[k].Ahat[j].cwiseProduct(q).sum();
            }
            du = Bfact.solve(rhs);
            // two rounds of iterative refinement; the Schur matrix turns very
            // ill-conditioned near a degenerate optimum
            for (int r = 0; r < 2; ++r) {
                VectorXd rr = rhs - B * du;
                du += Bfact.solve(rr);
            }
            dX.resize(nblocks);
            dY.resize(nblocks);
            for (int k = 0; k < nblocks; ++k) {
                dX[k] = P[k];
                for (int j = 0; j < f; ++j) dX[k] += du(j) * work[k].Ahat[j];
                MatrixXd t = R[k] * (R[k].transpose() * (Tc[k] - dX[k]) * R[k]) * R[k].transpose();
                dY[k] = 0.5 * (t + t.transpose());
            }
        };

        // predictor
        std::vector<MatrixXd> Tc(nblocks);
        for (int k = 0; k < nblocks; ++k) Tc[k] = -X[k];
        VectorXd du;
        std::vector<MatrixXd> dX, dY;
        newton(Tc, du, dX, dY);
        double ap = 1, ad = 1;
        for (int k = 0; k < nblocks; ++k) {
            ap = std::min(ap, max_step(lltX[k], dX[k]));
            ad = std::min(ad, max_step(lltY[k], dY[k]));
        }
        ap *= params.step_fraction;
        ad *= params.step_fraction;
        double mu_aff = 0;
        for (int k = 0; k < nblocks; ++k)
            mu_aff += (X[k] + ap * dX[k]).cwiseProduct(Y[k] + ad * dY[k]).sum();
        mu_aff = std::max(mu_aff / total_dim, 0.0);
        const double sigma = std::min(1.0, std::pow(mu_aff / mu, 3));

        // corrector
        for (int k = 0; k < nblocks; ++k) {
            MatrixXd yinv = lltY[k].solve(MatrixXd::Identity(work[k].side, work[k].side));
            Tc[k] = sigma * mu * yinv - X[k];
        }
        newton(Tc, du, dX, dY);
        ap = 1;
        ad = 1;
        for (int k = 0; k < nblocks; ++k) {
            ap = std::min(ap, max_step(lltX[k], dX[k]));
            ad = std::min(ad, max_step(lltY[k], dY[k]));
        }
        ap *= params.step_fraction;
        ad *= params.step_fraction;

        u += ap * du;
        for (int k = 0; k < nblocks; ++k) {
            X[k] += ap * dX[k];
            Y[k] += ad * dY[k];
        }
    }
    return finish_best(SdpStatus::MaxIterations, params.max_iterations);
}

SdpProblem relaxation_to_sdp(const MomentRelaxation& rel) {
    SdpProblem sdp;
    sdp.nvars = static_cast<int>(rel.moment_keys.size());
    sdp.c = VectorXd::Zero(sdp.nvars);
    for (const auto& [idx, coeff] : rel.objective) sdp.c(idx) += to_double(coeff);
    for (const auto& row : rel.equality_rows) {
        std::vector<std::pair<int, double>> r;
        for (const auto& [idx, coeff] : row.coeff) r.emplace_back(idx, to_double(coeff));
        sdp.eq_rows.push_back(std::move(r));
        sdp.eq_rhs.push_back(0);
    }
    sdp.eq_rows.push_back({{rel.y0_index, 1.0}});
    sdp.eq_rhs.push_back(1);
    for (const auto& blk : rel.blocks) {
        SdpProblem::Block b;
        b.side = blk.side;
        b.label = blk.label;
        for (const auto& [idx, entries] : blk.entries)
            for (const auto& [i, j, coeff] : entries)
                b.coeff[idx].emplace_back(i, j, to_double(coeff));
        sdp.blocks.push_back(std::move(b));
    }
    return sdp;
}

CertificateBundle dual_certificate(const SdpSolution& solution, const MomentRelaxation& rel,
                                   const JacobianAugmentedProgram& jap) {
    CertificateBundle cert;
    if (solution.eq_duals.size() !=
        static_cast<Eigen::Index>(rel.equality_rows.size()) + 1)
        throw std::invalid_argument("solution does not match the relaxation shape");
    cert.gamma = solution.eq_duals(solution.eq_duals.size() - 1);

    for (const auto& y : solution.dual_blocks) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(y);
        VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        cert.gram.push_back(es.eigenvectors() * ev.asDiagonal() *
                            es.eigenvectors().transpose());
    }

    cert.equality_multipliers.assign(jap.all_equalities.size(), Polynomial(jap.nvars));
    for (int r = 0; r < static_cast<int>(rel.equality_rows.size()); ++r) {
        const auto& row = rel.equality_rows[r];
        const double lam = solution.eq_duals(r);
        if (lam != 0)
            cert.equality_multipliers[row.source].add_term(row.delta, Rational(lam));
    }

    // residual of the coefficient identity c = E^T lambda + sum_k <A_k, Gram_k>
    VectorXd res = VectorXd::Zero(static_cast<int>(rel.moment_keys.size()));
    for (const auto& [idx, coeff] : rel.objective) res(idx) += to_double(coeff);
    for (int r = 0; r < static_cast<int>(rel.equality_rows.size()); ++r)
        for (const auto& [idx, coeff] : rel.equality_rows[r].coeff)
            res(idx) -= solution.eq_duals(r) * to_double(coeff);
    res(rel.y0_index) -= cert.gamma;
    for (int k = 0; k < static_cast<int>(rel.blocks.size()); ++k) {
        const auto& blk = rel.blocks[k];
        const auto& g = cert.gram[k];
        for (const auto& [idx, entries] : blk.entries)
            for (const auto& [i, j, coeff] : entries)
                res(idx) -= (i == j ? 1.0 : 2.0) * to_double(coeff) * g(i, j);
    }
    cert.coefficient_residual = res.norm();
    return cert;
}

std::optional<CertificateBundle> refine_certificate(const MomentRelaxation& rel,
                                                    const JacobianAugmentedProgram& jap,
                                                    double gamma) {
    const int K = static_cast<int>(rel.moment_keys.size());
    const int R = static_cast<int>(rel.equality_rows.size());
    const int nb = static_cast<int>(rel.blocks.size());

    // variable layout: multipliers first, then each Gram upper triangle
    std::vector<int> ofs(nb);
    int V = R;
    for (int k = 0; k < nb; ++k) {
        ofs[k] = V;
        V += rel.blocks[k].side * (rel.blocks[k].side + 1) / 2;
    }
    if (V > 30000 || K == 0) return std::nullopt;
    auto tri = [&](int k, int i, int j) {  // i <= j
        return ofs[k] + j * (j + 1) / 2 + i;
    };

    // coefficient-identity map M z = rhs over the moment keys
    MatrixXd M = MatrixXd::Zero(K, V);
    for (int r = 0; r < R; ++r)
        for (const auto& [idx, co] : rel.equality_rows[r].coeff) M(idx, r) += to_double(co);
    for (int k = 0; k < nb; ++k)
        for (const auto& [idx, entries] : rel.blocks[k].entries)
            for (const auto& [i, j, co] : entries)
                M(idx, tri(k, i, j)) += (i == j ? 1.0 : 2.0) * to_double(co);
    VectorXd rhs = VectorXd::Zero(K);
    for (const auto& [idx, co] : rel.objective) rhs(idx) += to_double(co);
    rhs(rel.y0_index) -= gamma;

    // minimizing total Gram trace subject to the identity is attained and
    // strictly feasible on the Lagrangian-dual side: the dual is
    //   min -rhs^T w  s.t.  M_lambda^T w = 0,  I - sum_a w_a A_{k,a} psd,
    // with Slater point w = 0, so the interior-point method converges and
    // its dual blocks are exactly the Gram matrices
    SdpProblem dualp;
    dualp.nvars = K;
    dualp.c = -rhs;
    for (int r = 0; r < R; ++r) {
        std::vector<std::pair<int, double>> row;
        for (const auto& [idx, co] : rel.equality_rows[r].coeff)
            row.emplace_back(idx, to_double(co));
        dualp.eq_rows.push_back(std::move(row));
        dualp.eq_rhs.push_back(0);
    }
    for (int k = 0; k < nb; ++k) {
        SdpProblem::Block b;
        b.side = rel.blocks[k].side;
        for (int i = 0; i < b.side; ++i) b.constant.emplace_back(i, i, 1.0);
        for (const auto& [idx, entries] : rel.blocks[k].entries)
            for (const auto& [i, j, co] : entries)
                b.coeff[idx].emplace_back(i, j, -to_double(co));
        dualp.blocks.push_back(std::move(b));
    }
    // optimality is not needed here, only a near-feasible dual point: the
    // Gram matrices just have to satisfy the coefficient identity
    SdpParams dp;
    dp.max_iterations = 200;
    dp.stall_limit = 40;
    // pursuing trace optimality would park the Grams on the cone boundary
    // (the zeros of the leading form force them to be singular) where the
    // later correction step would push eigenvalues negative; instead stop at
    // the first dual feasible iterate, which is still well inside the cone
    dp.stop_at_dual_feas = 1e-9;
    dp.verbose = std::getenv("RATOPT_CERT_DEBUG") != nullptr;
    SdpSolution sol = solve_sdp(dualp, dp);
    if (dp.verbose)
        std::fprintf(stderr, "cert sdp: %s gap %.2e\n", to_string(sol.status), sol.rel_gap);
    if (sol.dual_blocks.size() != static_cast<size_t>(nb)) return std::nullopt;

    VectorXd z = VectorXd::Zero(V);
    if (sol.eq_duals.size() == R)
        for (int r = 0; r < R; ++r) z(r) = -sol.eq_duals(r);
    for (int k = 0; k < nb; ++k) {
        const auto& g = sol.dual_blocks[k];
        for (int j = 0; j < rel.blocks[k].side; ++j)
            for (int i = 0; i <= j; ++i) z(tri(k, i, j)) = g(i, j);
    }
    // The dual iterate satisfies the identity only to solver accuracy, and
    // the exact certificate Grams are singular whenever the leading form has
    // zeros, so the affine identity set and the psd cone meet tangentially.
    // Dykstra's alternating projections converge onto that intersection
    // where a plain project-and-floor loop stalls; the iterate after each
    // cone projection is exactly psd, so the retained best certificate is
    // serializable without silently dropping negative eigenvalues.
    {
        // inner product matching the Frobenius norm on the Gram blocks
        // (off-diagonal triangle entries count twice)
        VectorXd wsqrt = VectorXd::Ones(V);
        for (int k = 0; k < nb; ++k)
            for (int j = 0; j < rel.blocks[k].side; ++j)
                for (int i = 0; i < j; ++i) wsqrt(tri(k, i, j)) = std::sqrt(2.0);
        VectorXd winv = wsqrt.cwiseInverse();
        MatrixXd mw = M * winv.asDiagonal();
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(mw);
        auto project_affine = [&](VectorXd& v) {
            VectorXd res = rhs - M * v;
            v += winv.asDiagonal() * cod.solve(res);
        };
        auto floor_psd = [&](VectorXd& v) {
            for (int k = 0; k < nb; ++k) {
                const int side = rel.blocks[k].side;
                MatrixXd g(side, side);
                for (int j = 0; j < side; ++j)
                    for (int i = 0; i <= j; ++i) g(i, j) = g(j, i) = v(tri(k, i, j));
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
                if (es.eigenvalues().minCoeff() >= 0) continue;
                g = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
                    es.eigenvectors().transpose();
                for (int j = 0; j < side; ++j)
                    for (int i = 0; i <= j; ++i) v(tri(k, i, j)) = g(i, j);
            }
        };
        VectorXd x = z;
        floor_psd(x);
        VectorXd q = VectorXd::Zero(V);
        VectorXd best = x;
        double best_res = (rhs - M * x).norm();
        for (int round = 0; round < 300; ++round) {
            project_affine(x);
            VectorXd yq = x + q;
            x = yq;
            floor_psd(x);
            q = yq - x;
            const double rn = (rhs - M * x).norm();
            if (rn < best_res) {
                best_res = rn;
                best = x;
            }
            if (dp.verbose && round % 50 == 0)
                std::fprintf(stderr, "cert dykstra round %d: resid %.2e\n", round, rn);
            if (rn < 1e-13) break;
        }
        z = best;
    }

    CertificateBundle cert;
    cert.gamma = gamma;
    cert.coefficient_residual = (rhs - M * z).norm();
    for (int k = 0; k < nb; ++k) {
        const int side = rel.blocks[k].side;
        MatrixXd g(side, side);
        for (int j = 0; j < side; ++j)
            for (int i = 0; i <= j; ++i) g(i, j) = g(j, i) = z(tri(k, i, j));
        cert.gram.push_back(std::move(g));
    }
    cert.equality_multipliers.assign(jap.all_equalities.size(), Polynomial(jap.nvars));
    for (int r = 0; r < R; ++r) {
        const auto& row = rel.equality_rows[r];
        if (z(r) != 0) cert.equality_multipliers[row.source].add_term(row.delta, Rational(z(r)));
    }
    return cert;
}

double certificate_residual_at(const CertificateBundle& cert, const MomentRelaxation& rel,
                               const JacobianAugmentedProgram& jap,
                               const std::vector<double>& point) {
    double val = jap.objective.eval(point) - cert.gamma;
    for (size_t s = 0; s < jap.all_equalities.size(); ++s)
        val -= cert.equality_multipliers[s].eval(point) * jap.all_equalities[s].eval(point);
    for (int k = 0; k < static_cast<int>(rel.blocks.size()); ++k) {
        const auto& blk = rel.blocks[k];
        VectorXd v(blk.side);
        for (int i = 0; i < blk.side; ++i) {
            double mono = 1;
            for (int a = 0; a < rel.nvars; ++a)
                for (int e = 0; e < blk.basis.monomials[i][a]; ++e) mono *= point[a];
            v(i) = mono;
        }
        const double sos = v.dot(cert.gram[k] * v);
        val -= jap.nu_products[blk.nu_index].product.eval(point) * sos;
    }
    return val;
}

}  // namespace ratopt
