#include <poscon/cli.hpp>

#include <poscon/dilation.hpp>
#include <poscon/factor.hpp>
#include <poscon/matrix_io.hpp>
#include <poscon/reference_cases.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

namespace poscon {

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitError = 1;
constexpr int kExitRejected = 2;

struct CommonFlags {
    DecomposeConfig config;
    bool json = false;
    std::string trace_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--tol-feas", flags.config.solver.feas_tol,
                    "feasibility error tolerance (default 1e-12)");
    cmd->add_option("--tol-eig", flags.config.tol.eig_tol,
                    "eigendecomposition tolerance (default 1e-10)");
    cmd->add_option("--max-iter", flags.config.solver.max_iter,
                    "iteration limit (default 100000)");
    cmd->add_option("--stall-window", flags.config.solver.stall_window,
                    "stall detection window (default 500)");
    cmd->add_option("--stall-rel-change", flags.config.solver.stall_rel_change,
                    "relative improvement threshold per window (default 1e-6)");
    cmd->add_flag("--json", flags.json, "machine-readable output only");
    cmd->add_option("--trace", flags.trace_path, "dump the error history as CSV");
}

Json tolerances_to_json(const DecomposeConfig& config) {
    return Json{{"feas_tol", config.solver.feas_tol},
                {"max_iter", config.solver.max_iter},
                {"stall_window", config.solver.stall_window},
                {"stall_rel_change", config.solver.stall_rel_change},
                {"eig_tol", config.tol.eig_tol},
                {"psd_tol", config.tol.psd_tol},
                {"norm_tol", config.tol.norm_tol},
                {"decomp_tol", config.tol.decomp_tol}};
}

Json spectrum_to_json(const SpectrumReport& spectrum) {
    Json eigenvalues = Json::array();
    for (Index i = 0; i < spectrum.eigenvalues.size(); ++i) {
        eigenvalues.push_back({spectrum.eigenvalues(i).real(), spectrum.eigenvalues(i).imag()});
    }
    Json groups = Json::array();
    for (const auto& g : spectrum.interior_groups) {
        groups.push_back({{"alpha", g.alpha}, {"multiplicity", g.multiplicity}});
    }
    return Json{{"eigenvalues", std::move(eigenvalues)},
                {"p", spectrum.ones_count},
                {"q", spectrum.zeros_count},
                {"interior_groups", std::move(groups)},
                {"diagonalizable", spectrum.diagonalizable},
                {"contraction", spectrum.contraction}};
}

Json run_report(const DecomposeOutcome& outcome, const DecomposeConfig& config) {
    Json report;
    if (outcome.success()) {
        report["status"] = "decomposed";
        report["stage"] = "complete";
        const Decomposition& dec = *outcome.decomposition;
        report["p"] = matrix_to_json(dec.p.matrix());
        report["q"] = matrix_to_json(dec.q.matrix());
        report["residual"] = dec.product_residual;
        report["p_norm"] = dec.p_norm;
        report["q_norm"] = dec.q_norm;
    } else if (outcome.rejection) {
        report["status"] = outcome.rejection->stage == RejectionStage::Feasibility
                               ? "stalled"
                               : "rejected";
        report["stage"] = to_string(outcome.rejection->stage);
        report["message"] = outcome.rejection->message;
    }
    if (outcome.solve_outcome) {
        const SolveOutcome& solved = *outcome.solve_outcome;
        report["iterations"] = solved.iterations;
        if (!report.contains("residual")) report["residual"] = solved.residual;
        Json tail = Json::array();
        const std::size_t start =
            solved.error_history.size() > 20 ? solved.error_history.size() - 20 : 0;
        for (std::size_t i = start; i < solved.error_history.size(); ++i) {
            tail.push_back(solved.error_history[i].error);
        }
        report["error_history_tail"] = std::move(tail);
    } else {
        report["iterations"] = 0;
        report["error_history_tail"] = Json::array();
        if (!report.contains("residual")) report["residual"] = nullptr;
    }
    if (outcome.spectrum) {
        report["spectrum"] = spectrum_to_json(*outcome.spectrum);
    }
    report["tolerances"] = tolerances_to_json(config);
    return report;
}

void write_trace(const std::string& path, const DecomposeOutcome& outcome) {
    if (path.empty() || !outcome.solve_outcome) return;
    std::ofstream trace(path);
    if (!trace) throw ParseError("cannot write trace file '" + path + "'");
    trace << "iteration,error\n";
    for (const auto& point : outcome.solve_outcome->error_history) {
        trace << point.iteration << "," << std::setprecision(17) << point.error << "\n";
    }
}

int cmd_decompose(const std::string& input, const CommonFlags& flags, std::ostream& out,
                  std::ostream& err) {
    const ComplexMatrix a = load_matrix(input);
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("decompose needs a square matrix, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    const DecomposeOutcome outcome = decompose(a, flags.config);
    write_trace(flags.trace_path, outcome);
    const Json report = run_report(outcome, flags.config);
    out << report.dump(flags.json ? -1 : 2) << "\n";
    if (!flags.json) {
        err << "status: " << report["status"].get<std::string>();
        if (outcome.rejection) err << " (" << outcome.rejection->message << ")";
        err << "\n";
    }
    return outcome.success() ? kExitSuccess : kExitRejected;
}

int cmd_bound2x2(double a, double b, double p, const CommonFlags& flags, std::ostream& out) {
    const TwoByTwoVerdict verdict = decide_2x2(a, b, Complex(p), flags.config.tol.boundary_tol);
    if (flags.json) {
        out << Json{{"a", verdict.a},
                    {"b", verdict.b},
                    {"p_abs", verdict.p_abs},
                    {"bound", verdict.bound},
                    {"feasible", verdict.feasible}}
                   .dump()
            << "\n";
    } else {
        out << std::setprecision(12) << "bound = " << verdict.bound
            << ", |p| = " << verdict.p_abs << ": "
            << (verdict.feasible ? "feasible" : "infeasible") << "\n";
    }
    return verdict.feasible ? kExitSuccess : kExitRejected;
}

int cmd_verify(const std::string& a_path, const std::string& p_path, const std::string& q_path,
               bool with_dilation, const CommonFlags& flags, std::ostream& out) {
    const ComplexMatrix a = load_matrix(a_path);
    const ComplexMatrix p = load_matrix(p_path);
    const ComplexMatrix q = load_matrix(q_path);
    if (a.rows() != a.cols() || p.rows() != a.rows() || p.cols() != a.cols() ||
        q.rows() != a.rows() || q.cols() != a.cols()) {
        throw DimensionMismatch("verify needs three square matrices of equal size");
    }
    const ToleranceConfig& tol = flags.config.tol;

    Json checks = Json::array();
    bool all_ok = true;
    auto record = [&](const std::string& label, bool ok, double value) {
        checks.push_back({{"check", label}, {"passed", ok}, {"value", value}});
        all_ok = all_ok && ok;
    };

    std::optional<Decomposition> dec;
    try {
        Decomposition candidate{HermitianMatrix(p, tol.hermitian_tol),
                                HermitianMatrix(q, tol.hermitian_tol)};
        candidate.p_norm = spectral_norm(p);
        candidate.q_norm = spectral_norm(q);
        candidate.p_min_eig = lambda_min(candidate.p);
        candidate.q_min_eig = lambda_min(candidate.q);
        candidate.product_residual = (p * q - a).norm();
        dec = std::move(candidate);
    } catch (const Error& e) {
        checks.push_back({{"check", "factors are Hermitian"}, {"passed", false},
                          {"value", std::string(e.what())}});
        all_ok = false;
    }
    if (dec) {
        const double psd_floor =
            -tol.psd_tol * std::max(1.0, std::max(dec->p_norm, dec->q_norm));
        record("P is PSD", dec->p_min_eig >= psd_floor, dec->p_min_eig);
        record("Q is PSD", dec->q_min_eig >= psd_floor, dec->q_min_eig);
        record("P is a contraction", dec->p_norm <= 1.0 + tol.norm_tol, dec->p_norm);
        record("Q is a contraction", dec->q_norm <= 1.0 + tol.norm_tol, dec->q_norm);
        record("P Q reproduces A", dec->product_residual <= tol.decomp_tol,
               dec->product_residual);
        if (with_dilation && all_ok) {
            const ValidationReport validation = cross_validate(a, *dec, tol.dil_tol);
            record("dilation cross-validation", validation.passed(),
                   validation.max_residual);
        }
    }
    out << Json{{"status", all_ok ? "verified" : "failed"}, {"checks", checks}}
               .dump(flags.json ? -1 : 2)
        << "\n";
    return all_ok ? kExitSuccess : kExitRejected;
}

int cmd_paper_examples(const CommonFlags& flags, std::ostream& out) {
    const auto results = run_all_reference_cases(flags.config);
    bool all_ok = true;
    if (flags.json) {
        Json rows = Json::array();
        for (const auto& result : results) {
            Json checks = Json::array();
            for (const auto& check : result.checks) {
                checks.push_back({{"label", check.label},
                                  {"passed", check.passed},
                                  {"detail", check.detail}});
            }
            rows.push_back({{"name", result.name},
                            {"note", result.note},
                            {"passed", result.passed()},
                            {"checks", std::move(checks)}});
            all_ok = all_ok && result.passed();
        }
        out << Json{{"cases", std::move(rows)}, {"passed", all_ok}}.dump() << "\n";
    } else {
        for (const auto& result : results) {
            all_ok = all_ok && result.passed();
            out << (result.passed() ? "[PASS] " : "[FAIL] ") << result.name << " — "
                << result.note << "\n";
            for (const auto& check : result.checks) {
                out << "    " << (check.passed ? "ok   " : "FAIL ") << check.label << " ("
                    << check.detail << ")\n";
            }
        }
        out << (all_ok ? "all reference cases passed" : "some reference cases failed")
            << "\n";
    }
    return all_ok ? kExitSuccess : kExitRejected;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"decides whether a square complex matrix is the product of two "
                 "positive semidefinite contractions, and constructs certified "
                 "factors when it is"};
    app.require_subcommand(1);

    CommonFlags flags;

    std::string input_path;
    auto* decompose_cmd = app.add_subcommand(
        "decompose", "factor a matrix into two positive contractions");
    decompose_cmd->add_option("input", input_path, "matrix file (JSON or CSV)")->required();
    add_common_flags(decompose_cmd, flags);

    double a_arg = 0, b_arg = 0, p_arg = 0;
    auto* bound_cmd = app.add_subcommand(
        "bound2x2", "closed-form criterion for [[a, p], [0, b]]");
    bound_cmd->add_option("a", a_arg, "top-left entry in [0, 1]")->required();
    bound_cmd->add_option("b", b_arg, "bottom-right entry in [0, 1]")->required();
    bound_cmd->add_option("p", p_arg, "coupling entry")->required();
    add_common_flags(bound_cmd, flags);

    std::string verify_a, verify_p, verify_q;
    bool with_dilation = false;
    auto* verify_cmd = app.add_subcommand(
        "verify", "check that P, Q are positive contractions with P Q = A");
    verify_cmd->add_option("A", verify_a, "matrix file")->required();
    verify_cmd->add_option("P", verify_p, "left factor file")->required();
    verify_cmd->add_option("Q", verify_q, "right factor file")->required();
    verify_cmd->add_flag("--cross-validate", with_dilation,
                         "also embed the factors into orthogonal projections");
    add_common_flags(verify_cmd, flags);

    auto* examples_cmd = app.add_subcommand(
        "paper-examples", "run the built-in reference instances and compare against "
                          "their published values");
    add_common_flags(examples_cmd, flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitError;
    }

    try {
        if (decompose_cmd->parsed()) return cmd_decompose(input_path, flags, out, err);
        if (bound_cmd->parsed()) return cmd_bound2x2(a_arg, b_arg, p_arg, flags, out);
        if (verify_cmd->parsed()) {
            return cmd_verify(verify_a, verify_p, verify_q, with_dilation, flags, out);
        }
        if (examples_cmd->parsed()) return cmd_paper_examples(flags, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace poscon
