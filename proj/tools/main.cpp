#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ratopt/pipeline.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct BuiltProgram {
    ratopt::RationalProgram rp;
    ratopt::JacobianAugmentedProgram jap;
    std::vector<std::string> names;
    bool homogenized = false;
};

BuiltProgram build_program(const std::string& path, bool square_denominator) {
    BuiltProgram out;
    out.rp = ratopt::parse_problem(slurp(path));
    ratopt::RationalProgram work = out.rp;
    if (square_denominator) {
        work.numerator = out.rp.numerator * out.rp.denominator;
        work.denominator = out.rp.denominator * out.rp.denominator;
    }
    out.homogenized = work.denominator.degree() > 0;
    if (out.homogenized) {
        out.jap = ratopt::build_augmented(ratopt::build_homogenized(work));
        out.names.push_back("x0");
    } else {
        const ratopt::Rational qc =
            work.denominator.coefficient(ratopt::Exponents(work.nvars(), 0));
        out.jap = ratopt::build_augmented_general(
            work.numerator * (ratopt::Rational(1) / qc), work.equalities, work.inequalities);
    }
    for (const auto& v : out.rp.variables) out.names.push_back(v);
    return out;
}

int run_solve_command(const std::string& problem_path, const ratopt::SolveOptions& options,
                      const std::string& out_path) {
    ratopt::RationalProgram rp = ratopt::parse_problem(slurp(problem_path));
    ratopt::SolveReport report = ratopt::run_solve(rp, options);
    std::string j = ratopt::report_to_json(report, rp);
    if (out_path.empty()) {
        std::cout << j << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open " + out_path);
        out << j << "\n";
    }
    switch (report.outcome) {
        case ratopt::SolveReport::Outcome::Solved:
        case ratopt::SolveReport::Outcome::Exported:
        case ratopt::SolveReport::Outcome::Infeasible:
            return 0;
        case ratopt::SolveReport::Outcome::BoundOnly:
            return 2;
        case ratopt::SolveReport::Outcome::Error:
            return 1;
    }
    return 1;
}

int run_check_command(const std::string& problem_path, const std::string& cert_path,
                      bool square_denominator, double tol, bool has_tol) {
    BuiltProgram prog = build_program(problem_path, square_denominator);
    ratopt::ParsedCertificate cert =
        ratopt::parse_certificate(slurp(cert_path), prog.names);
    if (cert.multipliers.size() != prog.jap.all_equalities.size())
        throw std::runtime_error(
            "certificate has " + std::to_string(cert.multipliers.size()) +
            " multipliers but the augmented program has " +
            std::to_string(prog.jap.all_equalities.size()) + " equalities");
    ratopt::CertificateCheck check = ratopt::check_certificate(
        prog.jap.objective, cert.gamma, prog.jap.all_equalities, cert.multipliers, cert.sos);
    const bool pass = check.exact_zero || (has_tol && check.sampled_max <= tol);
    std::cout << "{\n  \"exact_zero\": " << (check.exact_zero ? "true" : "false")
              << ",\n  \"sampled_max\": " << check.sampled_max << ",\n  \"pass\": "
              << (pass ? "true" : "false") << "\n}\n";
    if (!pass && !check.exact_zero) {
        std::string r = check.residual.to_string(prog.names);
        if (r.size() > 400) r = r.substr(0, 400) + " ...";
        std::cerr << "residual: " << r << "\n";
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"global minimization of rational functions by homogenized moment relaxations"};
    app.require_subcommand(1);

    std::string problem_path, out_path, solver = "internal";
    ratopt::SolveOptions options;

    auto* solve = app.add_subcommand("solve", "solve a problem file");
    solve->add_option("--problem", problem_path, "problem JSON file")->required();
    solve->add_option("--max-order", options.max_order, "largest relaxation order");
    solve->add_option("--min-order", options.min_order, "starting relaxation order");
    solve->add_option("--tol", options.gap_tol, "SDP relative gap tolerance");
    solve->add_option("--solver", solver, "internal | export")
        ->check(CLI::IsMember({"internal", "export"}));
    solve->add_flag("--square-denominator", options.square_denominator,
                    "replace p/q by p*q/q^2 before solving");
    solve->add_option("--out", out_path, "write the JSON report to this file");
    solve->add_flag("--verbose", options.verbose, "print solver iterations");

    std::string cert_path;
    double check_tol = 0;
    bool square_cert = false;
    auto* check = app.add_subcommand("check-cert", "verify a certificate file");
    check->add_option("--problem", problem_path, "problem JSON file")->required();
    check->add_option("--certificate", cert_path, "certificate JSON file")->required();
    auto* tol_opt = check->add_option("--tol", check_tol, "accept if sampled residual <= tol");
    check->add_flag("--square-denominator", square_cert,
                    "apply the same rewrite used when solving");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            if (solver == "export") {
                options.export_only = true;
                options.export_prefix = out_path.empty() ? "relaxation" : out_path;
            }
            return run_solve_command(problem_path, options, solver == "export" ? "" : out_path);
        }
        return run_check_command(problem_path, cert_path, square_cert, check_tol,
                                 tol_opt->count() > 0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
