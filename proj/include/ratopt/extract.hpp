#pragma once

#include <optional>

#include "ratopt/sdp.hpp"

namespace ratopt {

struct AtomicMeasure {
    std::vector<std::vector<double>> atoms;  // points in R^nvars
    std::vector<double> weights;             // positive, summing to ~1
};

// Rank profile of the principal truncations M_t of the moment matrix.
struct FlatnessReport {
    int dhat = 1;            // flatness gap required for the strict test
    std::vector<int> ranks;  // rank of M_t for t = 0..N
    int t = -1;              // chosen truncation order, -1 when none qualifies
    int rank = 0;            // rank of M_t at the chosen order
    bool strict = false;     // rank M_{t-dhat} == rank M_t
    bool heuristic = false;  // only rank M_{t-1} == rank M_t

    // all truncations worth attempting, strict ones first; extraction is
    // tried in order until the atoms verify
    struct Candidate {
        int t = -1;
        int rank = 0;
        bool strict = false;
    };
    std::vector<Candidate> candidates;
};

// Dense moment matrix of the leading PSD block, filled from the solved
// moment vector.
Eigen::MatrixXd moment_matrix(const MomentRelaxation& rel, const Eigen::VectorXd& y);

int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-3);

// Scans t in [t_min, N] for the smallest truncation with a stabilized
// rank. A strict result is certified; a heuristic one (single-step rank
// stabilization) must be confirmed by checking the extracted atoms.
FlatnessReport flat_truncation(const Eigen::MatrixXd& m, const MonomialBasis& basis, int dhat,
                               int t_min, double rank_tol = 1e-3);

// Atom extraction from a rank-r truncated moment matrix: pivot-row
// echelon form, multiplication matrices, joint diagonalization through a
// random convex combination (fixed seed) and a real Schur form. Returns
// nothing when the numerics refuse (complex eigenvalue clusters, missing
// basis products, non-positive weights).
std::optional<AtomicMeasure> extract_atoms(const Eigen::MatrixXd& m, const MonomialBasis& basis,
                                           int t, int rank, double rank_tol = 1e-3);

// Gauss-Newton refinement of an approximate atom onto the equality
// variety; returns the input unchanged when the iteration fails to reduce
// the residual.
std::vector<double> polish_point(const std::vector<Polynomial>& equalities,
                                 const std::vector<double>& point, int max_iters = 25);

// Approximate feasibility of a point: |e| <= tol * scale on equalities,
// g >= -tol * scale on inequalities.
bool verify_point(const std::vector<Polynomial>& equalities,
                  const std::vector<Polynomial>& inequalities, const std::vector<double>& point,
                  double tol = 1e-6);

}  // namespace ratopt
