#pragma once

#include <memory>

#include "ratopt/extract.hpp"
#include "ratopt/homogenize.hpp"

namespace ratopt {

struct SolveOptions {
    int max_order = 8;
    int min_order = 0;  // 0 selects the least admissible order
    double gap_tol = 1e-8;
    bool square_denominator = false;
    bool export_only = false;       // write SDPA files instead of solving
    std::string export_prefix;      // path prefix for exported .dat-s files
    double x0_threshold = 1e-4;
    double atom_tol = 1e-6;
    double rank_tol = 1e-3;
    bool verbose = false;
};

struct OrderReport {
    int order = 0;
    SdpStatus status = SdpStatus::Numerical;
    double primal = 0;
    double dual = 0;
    double rel_gap = 0;
    FlatnessReport flat;
    bool extracted = false;
    bool verified = false;
    bool accepted = false;
    double time_ms = 0;
    std::string exported_path;
};

struct SolveReport {
    enum class Outcome { Solved, BoundOnly, Infeasible, Error, Exported };
    Outcome outcome = Outcome::Error;
    bool homogenized = true;  // false on the constant-denominator bypass
    double optimum = std::numeric_limits<double>::quiet_NaN();
    std::vector<OrderReport> per_order;
    AtomicMeasure measure;  // atoms in solver coordinates (R^{n+1} when homogenized)
    BackMapResult back;
    EquivalenceStatus equivalence;
    std::vector<std::string> warnings;
    double total_ms = 0;

    bool has_certificate = false;
    CertificateBundle certificate;

    // retained context so certificates and atoms can be re-checked
    std::shared_ptr<HomogenizedProgram> hp;
    std::shared_ptr<JacobianAugmentedProgram> jap;
    std::shared_ptr<MomentRelaxation> accepted_relaxation;
    std::shared_ptr<MomentRelaxation> cert_relaxation;  // order the certificate came from
};

SolveReport run_solve(const RationalProgram& rp, const SolveOptions& options);

// JSON report per the CLI contract: optimum, per_order, equivalence,
// minimizers, asymptotic, attained, warnings, timings_ms, plus the numeric
// certificate when available.
std::string report_to_json(const SolveReport& report, const RationalProgram& rp, int indent = 2);

// Exact certificate checking. The file supplies gamma, one multiplier per
// augmented equality, and weighted sum-of-squares groups; the residual
//   objective - gamma - sum mult_i e_i - sum_k weight_k sum_j s_kj^2
// is computed in exact rational arithmetic.
struct CertificateCheck {
    Polynomial residual;
    bool exact_zero = false;
    double sampled_max = 0;  // max |residual| over fixed random sample points
};

struct ParsedCertificate {
    Rational gamma{0};
    std::vector<Polynomial> multipliers;                          // per augmented equality
    std::vector<std::pair<Polynomial, std::vector<Polynomial>>> sos;  // weight, squares
};

ParsedCertificate parse_certificate(const std::string& json_text,
                                    const std::vector<std::string>& variables);

CertificateCheck check_certificate(const Polynomial& objective, const Rational& gamma,
                                   const std::vector<Polynomial>& equalities,
                                   const std::vector<Polynomial>& multipliers,
                                   const std::vector<std::pair<Polynomial, std::vector<Polynomial>>>& sos);

// Serializes a numeric dual certificate into the same JSON schema so it can
// be fed back through check-cert.
std::string certificate_to_json(const CertificateBundle& cert, const MomentRelaxation& rel,
                                const JacobianAugmentedProgram& jap,
                                const std::vector<std::string>& variables);

}  // namespace ratopt
