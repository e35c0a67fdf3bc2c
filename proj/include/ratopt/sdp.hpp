#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ratopt/moment.hpp"

namespace ratopt {

// min c^T x  s.t.  eq_rows * x = eq_rhs,  and for each block
//   X_k(x) = const_k + sum_i x_i A_{k,i}  is positive semidefinite.
struct SdpProblem {
    int nvars = 0;
    Eigen::VectorXd c;
    double objective_offset = 0;

    std::vector<std::vector<std::pair<int, double>>> eq_rows;
    std::vector<double> eq_rhs;

    struct Block {
        int side = 0;
        std::string label;
        // per variable: sparse symmetric entries, upper triangle (i <= j)
        std::map<int, std::vector<std::tuple<int, int, double>>> coeff;
        std::vector<std::tuple<int, int, double>> constant;
    };
    std::vector<Block> blocks;
};

struct SdpParams {
    double gap_tol = 1e-8;
    double feas_tol = 1e-9;
    double step_fraction = 0.98;
    int max_iterations = 200;
    // stop after this many iterations without improving the worst of
    // (primal residual, dual residual, relative gap)
    int stall_limit = 8;
    // when positive, return the current iterate as soon as the absolute
    // dual equation residual drops below this value; used when the caller
    // only needs a dual feasible interior point, not an optimal one
    double stop_at_dual_feas = 0;
    bool verbose = false;
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIterations, Numerical };

struct SdpSolution {
    SdpStatus status = SdpStatus::Numerical;
    Eigen::VectorXd x;
    double primal_value = 0;
    double dual_value = 0;
    int iterations = 0;
    double eq_residual = 0;
    double psd_min_eig = 0;
    double rel_gap = 0;
    double primal_residual = 0;
    double dual_residual = 0;
    // set when the primal iterate is feasible and its objective has
    // stagnated while the dual diverges (unattained dual optimum); the
    // primal value and moment vector are reliable even though the duality
    // gap cannot be closed
    bool primal_converged = false;
    std::vector<Eigen::MatrixXd> dual_blocks;  // Y_k at termination
    Eigen::VectorXd eq_duals;                  // least-squares multipliers for eq_rows
};

const char* to_string(SdpStatus s);

// Infeasible-start primal-dual interior-point method (Nesterov-Todd
// scaling, predictor-corrector). Equality rows are eliminated through an
// orthogonal null-space basis before iterating.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpParams& params = {});

// Moment relaxation -> SDP over the compacted moment vector, with the
// y0 = 1 normalization appended as the last equality row.
SdpProblem relaxation_to_sdp(const MomentRelaxation& rel);

// Approximate Positivstellensatz certificate recovered from the dual.
struct CertificateBundle {
    double gamma = 0;
    // one Gram matrix per PSD block of the relaxation (eigenvalue-floored)
    std::vector<Eigen::MatrixXd> gram;
    // one multiplier polynomial per augmented-program equality
    std::vector<Polynomial> equality_multipliers;
    double coefficient_residual = 0;  // norm of the unexplained coefficients
};

CertificateBundle dual_certificate(const SdpSolution& solution, const MomentRelaxation& rel,
                                   const JacobianAugmentedProgram& jap);

// Re-derives a certificate by solving, for a fixed gamma slightly below the
// computed optimum, the feasibility SDP whose variables are the equality
// multiplier coefficients and the Gram blocks, with the coefficient identity
// imposed as hard equality constraints (minimizing total Gram trace). This
// gives identity residuals at solver feasibility level, far better than the
// Gram matrices read off a possibly diverging dual iterate. Returns nothing
// when the SDP does not solve.
std::optional<CertificateBundle> refine_certificate(const MomentRelaxation& rel,
                                                    const JacobianAugmentedProgram& jap,
                                                    double gamma);

// Residual of the certificate identity
//   objective - gamma - sum multiplier_e * e - sum [x]^T Gram [x] * g_nu
// evaluated at a point (floating).
double certificate_residual_at(const CertificateBundle& cert, const MomentRelaxation& rel,
                               const JacobianAugmentedProgram& jap,
                               const std::vector<double>& point);

}  // namespace ratopt
