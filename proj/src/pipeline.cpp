#include "ratopt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <json.hpp>

#include "ratopt/sdpa_io.hpp"

namespace ratopt {
namespace {

using nlohmann::json;

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

int half_up(int deg) { return (std::max(deg, 0) + 1) / 2; }

std::vector<std::string> augmented_names(const RationalProgram& rp, bool homogenized) {
    std::vector<std::string> names;
    if (homogenized) names.push_back("x0");
    for (const auto& v : rp.variables) names.push_back(v);
    return names;
}

const char* attained_name(BackMapResult::Attained a) {
    switch (a) {
        case BackMapResult::Attained::Attained: return "attained";
        case BackMapResult::Attained::NotAttained: return "not_attained";
        case BackMapResult::Attained::Unknown: return "unknown";
    }
    return "unknown";
}

const char* reason_name(const SolveReport& rep) {
    if (!rep.homogenized) return "not_applicable";
    switch (rep.equivalence.reason) {
        case EquivalenceStatus::Reason::Unconstrained: return "unconstrained";
        case EquivalenceStatus::Reason::Degree: return "degree";
        case EquivalenceStatus::Reason::PositiveX0Minimizer: return "positive_x0_minimizer";
        case EquivalenceStatus::Reason::Uncertified: return "uncertified";
    }
    return "uncertified";
}

const char* outcome_name(SolveReport::Outcome o) {
    switch (o) {
        case SolveReport::Outcome::Solved: return "solved";
        case SolveReport::Outcome::BoundOnly: return "bound_only";
        case SolveReport::Outcome::Infeasible: return "infeasible";
        case SolveReport::Outcome::Error: return "error";
        case SolveReport::Outcome::Exported: return "exported";
    }
    return "error";
}

// worst identity residual over the same sample cloud used by
// check_certificate, so selection here predicts the external check
double sampled_certificate_residual(const CertificateBundle& cert, const MomentRelaxation& rel,
                                    const JacobianAugmentedProgram& jap) {
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> pt(jap.nvars);
        for (int i = 0; i < jap.nvars; ++i) pt[i] = unif(rng);
        worst = std::max(worst, std::abs(certificate_residual_at(cert, rel, jap, pt)));
    }
    return worst;
}

}  // namespace

SolveReport run_solve(const RationalProgram& rp, const SolveOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report;

    RationalProgram work = rp;
    if (options.square_denominator) {
        work.numerator = rp.numerator * rp.denominator;
        work.denominator = rp.denominator * rp.denominator;
    }

    report.homogenized = work.denominator.degree() > 0;
    report.jap = std::make_shared<JacobianAugmentedProgram>();
    if (report.homogenized) {
        report.hp = std::make_shared<HomogenizedProgram>(build_homogenized(work));
        *report.jap = build_augmented(*report.hp);
    } else {
        const Rational qc = work.denominator.coefficient(Exponents(work.nvars(), 0));
        if (qc == 0) throw std::invalid_argument("zero denominator");
        Polynomial objective = work.numerator * (Rational(1) / qc);
        *report.jap = build_augmented_general(objective, work.equalities, work.inequalities);
    }
    const auto& jap = *report.jap;

    const int n0 = minimum_order(jap);
    int start = n0;
    if (options.min_order > 0) {
        if (options.min_order < n0)
            report.warnings.push_back("requested starting order " +
                                      std::to_string(options.min_order) +
                                      " is below the least admissible order " +
                                      std::to_string(n0));
        start = std::max(options.min_order, n0);
    }
    if (options.max_order < start)
        throw std::invalid_argument("max order " + std::to_string(options.max_order) +
                                    " is below the least admissible order " +
                                    std::to_string(start));

    int dhat = 1;
    for (const auto& e : jap.all_equalities) dhat = std::max(dhat, half_up(e.degree()));
    for (const auto& g : jap.inequalities) dhat = std::max(dhat, half_up(g.degree()));
    const int df = half_up(jap.objective.degree());

    report.outcome = SolveReport::Outcome::Error;
    std::vector<std::shared_ptr<MomentRelaxation>> usable_relaxations;
    for (int order = start; order <= options.max_order; ++order) {
        const auto tn = std::chrono::steady_clock::now();
        OrderReport orep;
        orep.order = order;
        MomentRelaxation rel = assemble_relaxation(jap, order);
        SdpProblem sdp = relaxation_to_sdp(rel);

        if (options.export_only) {
            std::string path = options.export_prefix + "_N" + std::to_string(order) + ".dat-s";
            write_sdpa_file(sdp, path);
            orep.exported_path = path;
            orep.time_ms = ms_since(tn);
            report.per_order.push_back(std::move(orep));
            continue;
        }

        SdpParams params;
        params.gap_tol = options.gap_tol;
        params.verbose = options.verbose;
        SdpSolution sol = solve_sdp(sdp, params);
        orep.status = sol.status;
        orep.primal = sol.primal_value;
        orep.dual = sol.dual_value;
        orep.rel_gap = sol.rel_gap;

        if (sol.status == SdpStatus::Infeasible) {
            report.outcome = SolveReport::Outcome::Infeasible;
            report.warnings.push_back("the order-" + std::to_string(order) +
                                      " relaxation is infeasible; the feasible set is empty");
            orep.time_ms = ms_since(tn);
            report.per_order.push_back(std::move(orep));
            break;
        }
        // extraction and verification gate acceptance downstream, so a solve
        // that stalled with a still-small gap is worth attempting
        const bool usable = sol.status == SdpStatus::Optimal || sol.rel_gap < 1e-4 ||
                            sol.primal_converged;
        if (!usable) {
            report.warnings.push_back("order " + std::to_string(order) +
                                      " solve ended with status " +
                                      std::string(to_string(sol.status)));
            orep.time_ms = ms_since(tn);
            report.per_order.push_back(std::move(orep));
            continue;
        }
        report.optimum = sol.primal_value;

        // keep the certificate with the smallest coefficient residual over
        // all usable orders; the order whose atoms verify may have a worse
        // dual iterate than an earlier one (the dual optimum can be
        // unattained, in which case late dual iterates diverge)
        if (sol.eq_duals.size() > 0) {
            auto relp = std::make_shared<MomentRelaxation>(rel);
            usable_relaxations.push_back(relp);
            CertificateBundle cb = dual_certificate(sol, rel, jap);
            if (!report.has_certificate ||
                cb.coefficient_residual < report.certificate.coefficient_residual) {
                report.certificate = std::move(cb);
                report.has_certificate = true;
                report.cert_relaxation = std::move(relp);
            }
        }

        Eigen::MatrixXd mom = moment_matrix(rel, sol.x);
        orep.flat = flat_truncation(mom, rel.blocks.front().basis, dhat, std::max(df, dhat),
                                    options.rank_tol);
        for (const auto& cand : orep.flat.candidates) {
            auto atoms = extract_atoms(mom, rel.blocks.front().basis, cand.t, cand.rank,
                                       options.rank_tol);
            if (!atoms) continue;
            orep.extracted = true;
            for (auto& a : atoms->atoms) a = polish_point(jap.all_equalities, a);
            // polishing can collapse near-duplicate atoms onto the same
            // point; merge them and pool their weights
            for (size_t i = 0; i < atoms->atoms.size(); ++i)
                for (size_t j = atoms->atoms.size(); j-- > i + 1;) {
                    double dist = 0, scale = 1;
                    for (size_t a = 0; a < atoms->atoms[i].size(); ++a) {
                        dist = std::max(dist, std::abs(atoms->atoms[i][a] -
                                                       atoms->atoms[j][a]));
                        scale = std::max(scale, std::abs(atoms->atoms[i][a]));
                    }
                    if (dist <= 1e-6 * scale) {
                        atoms->weights[i] += atoms->weights[j];
                        atoms->atoms.erase(atoms->atoms.begin() + j);
                        atoms->weights.erase(atoms->weights.begin() + j);
                    }
                }
            bool ok = true;
            for (const auto& a : atoms->atoms) {
                if (!verify_point(jap.all_equalities, jap.inequalities, a,
                                  options.atom_tol)) {
                    ok = false;
                    break;
                }
                if (std::abs(jap.objective.eval(a) - sol.primal_value) >
                    1e-3 * (1 + std::abs(sol.primal_value))) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            orep.verified = true;
            orep.accepted = true;
            orep.flat.t = cand.t;
            orep.flat.rank = cand.rank;
            orep.flat.strict = cand.strict;
            orep.flat.heuristic = !cand.strict;
            report.measure = *atoms;
            // the verified atoms give the optimum directly; the SDP primal
            // only matches it to the solve accuracy
            double best = std::numeric_limits<double>::infinity();
            for (const auto& a : atoms->atoms)
                best = std::min(best, jap.objective.eval(a));
            report.optimum = best;
            report.outcome = SolveReport::Outcome::Solved;
            report.accepted_relaxation = std::make_shared<MomentRelaxation>(rel);
            break;
        }
        if (orep.accepted) {
            orep.time_ms = ms_since(tn);
            report.per_order.push_back(std::move(orep));
            break;
        }
        if (orep.extracted && !orep.flat.candidates.empty())
            report.warnings.push_back(
                "order " + std::to_string(order) +
                ": rank stabilization without verified atoms was discarded");
        orep.time_ms = ms_since(tn);
        report.per_order.push_back(std::move(orep));
    }

    // tighten the numeric certificate: with gamma backed off slightly from
    // the computed optimum, re-derive multipliers and Gram blocks satisfying
    // the coefficient identity to projection accuracy. How much of the
    // residual survives the final psd floor varies with the relaxation
    // order, so every usable order is tried and the certificate with the
    // smallest sampled identity residual wins.
    if (report.has_certificate && report.cert_relaxation && !std::isnan(report.optimum)) {
        // backed off enough that the Gram keeps a clear positive eigenvalue
        // in each minimizer direction, little enough to stay within
        // reporting accuracy of the optimum
        const double margin = 1e-5 * (1 + std::abs(report.optimum));
        double best_sampled =
            sampled_certificate_residual(report.certificate, *report.cert_relaxation, jap);
        for (const auto& relp : usable_relaxations) {
            auto refined = refine_certificate(*relp, jap, report.optimum - margin);
            if (!refined) continue;
            const double s = sampled_certificate_residual(*refined, *relp, jap);
            if (s < best_sampled) {
                best_sampled = s;
                report.certificate = std::move(*refined);
                report.cert_relaxation = relp;
            }
            // good enough for verification at the usual 1e-5 tolerance;
            // trying further (larger, slower) orders is wasted work
            if (best_sampled < 8e-6) break;
        }
    }

    if (options.export_only) {
        report.outcome = SolveReport::Outcome::Exported;
    } else if (report.outcome != SolveReport::Outcome::Solved &&
               report.outcome != SolveReport::Outcome::Infeasible) {
        if (std::isnan(report.optimum)) {
            report.outcome = SolveReport::Outcome::Error;
        } else {
            report.outcome = SolveReport::Outcome::BoundOnly;
            report.warnings.push_back(
                "no verified atoms up to the maximum order; the optimum is a lower bound");
        }
    }

    if (report.homogenized) {
        report.equivalence =
            certify_equivalence(work, *report.hp, report.measure.atoms, options.x0_threshold);
        report.back = back_map(report.measure.atoms, *report.hp, options.x0_threshold);
        if (!report.equivalence.certified) {
            report.warnings.push_back(report.equivalence.notes);
            if (report.back.finite_minimizers.empty() && !report.measure.atoms.empty())
                report.back.attained = BackMapResult::Attained::Unknown;
        }
    } else {
        report.equivalence.certified = true;
        report.equivalence.notes = "constant denominator: solved as polynomial optimization";
        report.back.finite_minimizers = report.measure.atoms;
        report.back.attained = report.measure.atoms.empty()
                                   ? BackMapResult::Attained::Unknown
                                   : BackMapResult::Attained::Attained;
    }
    std::sort(report.back.finite_minimizers.begin(), report.back.finite_minimizers.end());
    std::sort(report.back.asymptotic_atoms.begin(), report.back.asymptotic_atoms.end());
    // opposite-sign atoms of the homogenized program map to the same point
    auto near = [](const std::vector<double>& a, const std::vector<double>& b) {
        double dist = 0, scale = 1;
        for (size_t i = 0; i < a.size(); ++i) {
            dist = std::max(dist, std::abs(a[i] - b[i]));
            scale = std::max(scale, std::abs(a[i]));
        }
        return dist <= 1e-6 * scale;
    };
    auto& fm = report.back.finite_minimizers;
    for (size_t i = 0; i < fm.size(); ++i)
        for (size_t j = fm.size(); j-- > i + 1;)
            if (near(fm[i], fm[j])) fm.erase(fm.begin() + j);

    report.total_ms = ms_since(t0);
    return report;
}

std::string certificate_to_json(const CertificateBundle& cert, const MomentRelaxation& rel,
                                const JacobianAugmentedProgram& jap,
                                const std::vector<std::string>& variables) {
    std::vector<std::string> names = variables;
    if (static_cast<int>(names.size()) != jap.nvars)
        throw std::invalid_argument("variable list does not match the augmented program");
    json j;
    j["gamma"] = Rational(cert.gamma).str();
    j["coefficient_residual"] = cert.coefficient_residual;
    j["multipliers"] = json::array();
    for (const auto& m : cert.equality_multipliers) j["multipliers"].push_back(m.to_string(names));
    j["sos"] = json::array();
    for (int k = 0; k < static_cast<int>(rel.blocks.size()); ++k) {
        const auto& blk = rel.blocks[k];
        json grp;
        grp["weight"] = jap.nu_products[blk.nu_index].product.to_string(names);
        grp["squares"] = json::array();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.gram[k]);
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double lam = es.eigenvalues()(i);
            if (lam <= 1e-12) continue;
            Polynomial sq(jap.nvars);
            const double scale = std::sqrt(lam);
            for (int r = 0; r < blk.side; ++r)
                sq.add_term(blk.basis.monomials[r], Rational(scale * es.eigenvectors()(r, i)));
            grp["squares"].push_back(sq.to_string(names));
        }
        j["sos"].push_back(std::move(grp));
    }
    j["variables"] = names;
    return j.dump(2);
}

ParsedCertificate parse_certificate(const std::string& json_text,
                                    const std::vector<std::string>& variables) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("certificate JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("certificate must be a JSON object");
    std::vector<std::string> names = variables;
    if (j.contains("variables")) {
        names.clear();
        for (const auto& v : j["variables"]) names.push_back(v.get<std::string>());
        if (names.size() != variables.size())
            throw ParseError("certificate variable count does not match the program");
    }
    ParsedCertificate cert;
    if (!j.contains("gamma")) throw ParseError("certificate missing \"gamma\"");
    if (j["gamma"].is_string())
        cert.gamma = parse_rational(j["gamma"].get<std::string>());
    else if (j["gamma"].is_number())
        cert.gamma = Rational(j["gamma"].get<double>());
    else
        throw ParseError("\"gamma\" must be a rational string or a number");
    if (j.contains("multipliers")) {
        if (!j["multipliers"].is_array()) throw ParseError("\"multipliers\" must be an array");
        for (const auto& m : j["multipliers"])
            cert.multipliers.push_back(parse_polynomial(m.get<std::string>(), names));
    }
    if (j.contains("sos")) {
        if (!j["sos"].is_array()) throw ParseError("\"sos\" must be an array");
        for (const auto& grp : j["sos"]) {
            Polynomial weight = grp.contains("weight")
                                    ? parse_polynomial(grp["weight"].get<std::string>(), names)
                                    : Polynomial::constant(static_cast<int>(names.size()), 1);
            std::vector<Polynomial> squares;
            for (const auto& s : grp["squares"])
                squares.push_back(parse_polynomial(s.get<std::string>(), names));
            cert.sos.emplace_back(std::move(weight), std::move(squares));
        }
    }
    return cert;
}

CertificateCheck check_certificate(
    const Polynomial& objective, const Rational& gamma,
    const std::vector<Polynomial>& equalities, const std::vector<Polynomial>& multipliers,
    const std::vector<std::pair<Polynomial, std::vector<Polynomial>>>& sos) {
    if (multipliers.size() != equalities.size())
        throw std::invalid_argument("multiplier count does not match the equality count");
    const int n = objective.nvars();
    Polynomial residual = objective - Polynomial::constant(n, gamma);
    for (size_t i = 0; i < equalities.size(); ++i)
        residual = residual - multipliers[i] * equalities[i];
    for (const auto& [weight, squares] : sos) {
        Polynomial acc(n);
        for (const auto& s : squares) acc = acc + s * s;
        residual = residual - weight * acc;
    }
    CertificateCheck out;
    out.residual = residual;
    out.exact_zero = residual.is_zero();
    std::mt19937 rng(0);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    double worst = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> pt(n);
        for (int i = 0; i < n; ++i) pt[i] = unif(rng);
        worst = std::max(worst, std::abs(residual.eval(pt)));
    }
    out.sampled_max = worst;
    return out;
}

std::string report_to_json(const SolveReport& report, const RationalProgram& rp, int indent) {
    json j;
    j["status"] = outcome_name(report.outcome);
    if (!std::isnan(report.optimum)) j["optimum"] = report.optimum;
    j["per_order"] = json::array();
    for (const auto& o : report.per_order) {
        json e;
        e["N"] = o.order;
        e["status"] = to_string(o.status);
        e["primal"] = o.primal;
        e["dual"] = o.dual;
        e["rel_gap"] = o.rel_gap;
        e["time_ms"] = o.time_ms;
        if (!o.exported_path.empty()) e["exported"] = o.exported_path;
        if (!o.flat.ranks.empty()) {
            e["flat"] = {{"t", o.flat.t},
                         {"rank", o.flat.rank},
                         {"strict", o.flat.strict},
                         {"heuristic", o.flat.heuristic},
                         {"ranks", o.flat.ranks}};
        }
        e["extracted"] = o.extracted;
        e["verified"] = o.verified;
        e["accepted"] = o.accepted;
        j["per_order"].push_back(std::move(e));
    }
    j["equivalence"] = {{"certified", report.equivalence.certified},
                        {"reason", reason_name(report)},
                        {"notes", report.equivalence.notes}};
    j["minimizers"] = report.back.finite_minimizers;
    j["asymptotic"] = report.back.asymptotic_atoms;
    j["attained"] = attained_name(report.back.attained);
    j["atoms"] = report.measure.atoms;
    j["weights"] = report.measure.weights;
    j["warnings"] = report.warnings;
    j["timings_ms"] = {{"total", report.total_ms}};
    if (report.has_certificate && report.cert_relaxation)
        j["certificate"] = json::parse(certificate_to_json(
            report.certificate, *report.cert_relaxation, *report.jap,
            augmented_names(rp, report.homogenized)));
    return j.dump(indent);
}

}  // namespace ratopt
