#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modpolar/centered.hpp"
#include "modpolar/errors.hpp"
#include "modpolar/generators.hpp"
#include "modpolar/module.hpp"
#include "modpolar/operator_io.hpp"
#include "modpolar/polar.hpp"
#include "modpolar/tolerances.hpp"
#include "modpolar/verify.hpp"

namespace {

using nlohmann::json;

// Shared exit codes. The centered command adds 3 (not centered),
// 4 (equivalence violation) and 5 (non-square input); the polar and verify
// commands use 1 for residual/invariant failures.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotCentered = 3;
constexpr int kExitEquivalence = 4;
constexpr int kExitNotSquare = 5;

double resolve_tolerance() {
    const char* raw = std::getenv("MODPOLAR_TOL");
    if (raw == nullptr || *raw == '\0') return modpolar::kResidualTol;
    char* end = nullptr;
    const double value = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !(value > 0.0)) {
        throw modpolar::InvalidSpec(
            "MODPOLAR_TOL must be a positive number, got \"" + std::string(raw) +
            "\"");
    }
    return value;
}

json operator_to_json(const modpolar::AdjointableOp& op) {
    return json::parse(modpolar::serialize_operator(op));
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6e", value);
    return buffer;
}

int cmd_polar(const std::string& path, const std::string& format, double tol) {
    const modpolar::AdjointableOp t = modpolar::load_operator(path);
    const modpolar::PolarFactors factors = modpolar::polar_decompose(t);
    const modpolar::PolarIdentityReport report =
        modpolar::verify_polar_identities(t, factors, tol);

    if (format == "json") {
        json doc;
        doc["tolerance"] = tol;
        doc["ok"] = report.ok;
        doc["scale"] = report.scale;
        doc["residuals"] = {
            {"factorization", report.factorization},
            {"abs_star_conjugation", report.abs_star_conjugation},
            {"intertwine", report.intertwine},
            {"adjoint_factorization", report.adjoint_factorization},
            {"initial_projection", report.initial_projection},
            {"final_projection", report.final_projection},
        };
        doc["factors"] = {
            {"u", operator_to_json(factors.u)},
            {"abs", operator_to_json(factors.abs)},
            {"abs_star", operator_to_json(factors.abs_star)},
            {"p_rstar", operator_to_json(factors.p_rstar)},
            {"p_r", operator_to_json(factors.p_r)},
        };
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "residual                 value\n";
        std::cout << "factorization            " << format_number(report.factorization) << "\n";
        std::cout << "abs_star_conjugation     " << format_number(report.abs_star_conjugation) << "\n";
        std::cout << "intertwine               " << format_number(report.intertwine) << "\n";
        std::cout << "adjoint_factorization    " << format_number(report.adjoint_factorization) << "\n";
        std::cout << "initial_projection       " << format_number(report.initial_projection) << "\n";
        std::cout << "final_projection         " << format_number(report.final_projection) << "\n";
        std::cout << "scale                    " << format_number(report.scale) << "\n";
        std::cout << "tolerance                " << format_number(tol) << "\n";
        std::cout << "result: " << (report.ok ? "ok" : "residuals exceed tolerance")
                  << "\n";
    }
    return report.ok ? kExitOk : kExitFailure;
}

int cmd_centered(const std::string& path, int order, const std::string& format,
                 double tol) {
    const modpolar::AdjointableOp t = modpolar::load_operator(path);
    if (!t.square()) {
        std::cerr << "error: centered analysis requires a square operator\n";
        return kExitNotSquare;
    }
    modpolar::CenteredReport report;
    try {
        report = modpolar::centered_report(t, order, tol);
    } catch (const modpolar::EquivalenceViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEquivalence;
    }

    static const std::vector<std::string> sequence_names = {
        "constant_one", "staircase", "midpoint"};
    if (format == "json") {
        json doc;
        doc["order_bound"] = report.order_bound;
        doc["centered"] = report.centered;
        doc["exactness"] = report.exactness == modpolar::Exactness::Exact
                               ? "exact"
                               : "bounded_only";
        doc["max_residual"] = report.max_residual;
        doc["tolerance"] = tol;
        json conditions = json::array();
        for (const auto& [tag, result] : report.conditions) {
            conditions.push_back({{"tag", modpolar::condition_tag_name(tag)},
                                  {"holds", result.holds},
                                  {"max_scaled_residual", result.max_scaled_residual}});
        }
        doc["conditions"] = std::move(conditions);
        json sequences = json::array();
        for (std::size_t i = 0; i < report.sequence_samples.size(); ++i) {
            sequences.push_back(
                {{"name", sequence_names[i]},
                 {"holds", report.sequence_samples[i].holds},
                 {"max_scaled_residual",
                  report.sequence_samples[i].max_scaled_residual}});
        }
        doc["sequences"] = std::move(sequences);
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "condition        holds  max scaled residual\n";
        for (const auto& [tag, result] : report.conditions) {
            std::printf("%-16s %-6s %s\n", modpolar::condition_tag_name(tag).c_str(),
                        result.holds ? "yes" : "no",
                        format_number(result.max_scaled_residual).c_str());
        }
        for (std::size_t i = 0; i < report.sequence_samples.size(); ++i) {
            std::printf("%-16s %-6s %s\n", sequence_names[i].c_str(),
                        report.sequence_samples[i].holds ? "yes" : "no",
                        format_number(report.sequence_samples[i].max_scaled_residual)
                            .c_str());
        }
        std::cout << "order bound: " << report.order_bound << "\n";
        std::cout << "exactness: "
                  << (report.exactness == modpolar::Exactness::Exact
                          ? "exact"
                          : "bounded_only")
                  << "\n";
        std::cout << "result: " << (report.centered ? "centered" : "not centered")
                  << "\n";
    }
    return report.centered ? kExitOk : kExitNotCentered;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int trials,
               const std::string& format, double tol) {
    const modpolar::SuiteResult result =
        modpolar::run_suite(suite, seed, trials, tol);
    std::cout << (format == "json" ? modpolar::render_json(result)
                                   : modpolar::render_table(result));
    return result.ok() ? kExitOk : kExitFailure;
}

int cmd_casebook(const std::string& example, const std::vector<int>& dims,
                 double eps) {
    if (example != "e312") {
        std::cerr << "error: unknown casebook example \"" << example << "\"\n";
        return kExitUsage;
    }
    if (dims.empty()) {
        std::cerr << "error: --dims requires at least one dimension\n";
        return kExitUsage;
    }
    std::cout << "d,min_singular,n_required\n";
    for (int d : dims) {
        const modpolar::GapDiagnostic diag = modpolar::gap_diagnostic(d, eps);
        std::printf("%d,%.12g,%ld\n", d, diag.min_singular, diag.n_required);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Polar decompositions and centered-operator analysis for "
                 "adjointable operators on finite-dimensional Hilbert modules"};
    app.require_subcommand(1);

    std::string polar_input;
    std::string polar_format = "json";
    CLI::App* polar = app.add_subcommand(
        "polar", "Compute the polar decomposition of an operator file and "
                 "verify the defining identities");
    polar->add_option("input", polar_input, "operator JSON file")->required();
    polar->add_option("--format", polar_format, "output format")
        ->check(CLI::IsMember({"json", "table"}));

    std::string centered_input;
    std::string centered_format = "json";
    int centered_order = 8;
    CLI::App* centered = app.add_subcommand(
        "centered", "Run the commutation battery on a square operator file");
    centered->add_option("input", centered_input, "operator JSON file")
        ->required();
    centered->add_option("--order", centered_order,
                         "largest power probed by the battery")
        ->check(CLI::Range(1, 64));
    centered->add_option("--format", centered_format, "output format")
        ->check(CLI::IsMember({"json", "table"}));

    std::string verify_suite = "all";
    std::string verify_format = "json";
    std::uint64_t verify_seed = 0;
    int verify_trials = 100;
    CLI::App* verify = app.add_subcommand(
        "verify", "Run seeded invariant suites over generated operators");
    verify->add_option("--suite", verify_suite,
                       "core, module, polar, centered or all");
    verify->add_option("--seed", verify_seed, "base seed");
    verify->add_option("--trials", verify_trials, "trials per invariant");
    verify->add_option("--format", verify_format, "output format")
        ->check(CLI::IsMember({"json", "table"}));

    std::string casebook_example = "e312";
    std::vector<int> casebook_dims;
    double casebook_eps = 1e-2;
    CLI::App* casebook = app.add_subcommand(
        "casebook", "Tabulate the range-projection convergence diagnostic");
    casebook->add_option("--example", casebook_example, "named example");
    casebook->add_option("--dims", casebook_dims, "truncation dimensions")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    casebook->add_option("--eps", casebook_eps, "convergence tolerance")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        const double tol = resolve_tolerance();
        if (polar->parsed()) return cmd_polar(polar_input, polar_format, tol);
        if (centered->parsed()) {
            return cmd_centered(centered_input, centered_order, centered_format,
                                tol);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_suite, verify_seed, verify_trials,
                              verify_format, tol);
        }
        return cmd_casebook(casebook_example, casebook_dims, casebook_eps);
    } catch (const modpolar::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const modpolar::UnknownSuite& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const modpolar::InvalidSpec& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const modpolar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
