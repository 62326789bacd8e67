// Acceptance gate: ten end-to-end checks, one line of output each. Exit code
// zero only when every check passes. Tolerances are pinned here on purpose;
// loosening them is never the fix.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "modpolar/centered.hpp"
#include "modpolar/errors.hpp"
#include "modpolar/generators.hpp"
#include "modpolar/module.hpp"
#include "modpolar/polar.hpp"

using namespace modpolar;

namespace {

constexpr std::uint64_t kSeed = 20260814ull;
constexpr double kIdentityTol = 1e-8;
constexpr double kPathAgreementTol = 1e-6;
constexpr double kClosedFormTol = 1e-12;

int g_failures = 0;

void report(int index, const char* name, bool ok, double detail,
            const char* detail_name) {
    std::printf("%s %2d %-38s %s=%.3e\n", ok ? "PASS" : "FAIL", index, name,
                detail_name, detail);
    if (!ok) ++g_failures;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// 1. Defining equations of the factorization on a 500-operator corpus.
void criterion_factorization(const std::vector<LabeledOperator>& ops) {
    double worst = 0.0;
    for (const LabeledOperator& entry : ops) {
        const PolarFactors f = polar_decompose(entry.op);
        const PolarIdentityReport r = verify_polar_identities(entry.op, f);
        const double scale = std::max(r.scale, 1e-300);
        worst = std::max({worst, r.factorization / scale, r.initial_projection,
                          r.final_projection});
    }
    report(1, "factorization defining equations", worst <= kIdentityTol, worst,
           "max_rel_residual");
}

// 2. Modulus conjugation bundle plus the fractional power identities.
void criterion_identity_bundle(const std::vector<LabeledOperator>& ops) {
    double worst = 0.0;
    for (const LabeledOperator& entry : ops) {
        const PolarFactors f = polar_decompose(entry.op);
        const PolarIdentityReport r = verify_polar_identities(entry.op, f);
        const double scale = std::max(r.scale, 1e-300);
        worst = std::max({worst, r.abs_star_conjugation / scale,
                          r.intertwine / scale, r.adjoint_factorization / scale});
        for (double alpha : {0.5, 1.0, 2.0, 3.7}) {
            const AlphaIdentityReport a = alpha_intertwine_check(f, alpha);
            const double ascale = std::max(a.scale, 1e-300);
            worst = std::max({worst, a.conjugation / ascale, a.intertwine / ascale,
                              a.reverse_conjugation / ascale});
        }
    }
    report(2, "modulus and power identity bundle", worst <= kIdentityTol, worst,
           "max_rel_residual");
}

// 3. The three existence conditions must agree everywhere.
void criterion_existence(const std::vector<LabeledOperator>& ops) {
    int disagreements = 0;
    for (const LabeledOperator& entry : ops) {
        try {
            const ExistenceReport r = check_existence_conditions(entry.op);
            if (!(r.ranges_complemented && r.defining_equalities &&
                  r.range_equalities)) {
                ++disagreements;
            }
        } catch (const EquivalenceViolation&) {
            ++disagreements;
        }
    }
    report(3, "existence conditions unanimous", disagreements == 0,
           static_cast<double>(disagreements), "disagreements");
}

// 4. The factorization and resolvent-limit constructions agree on every
//    well-conditioned corpus element, and the gate passes at least 90%.
void criterion_path_agreement(const std::vector<LabeledOperator>& ops) {
    double worst = 0.0;
    int passed_gate = 0;
    for (const LabeledOperator& entry : ops) {
        try {
            const PolarFactors limit = polar_decompose_via_limit(entry.op);
            ++passed_gate;
            worst = std::max(
                worst, op_norm(op_sub(polar_decompose(entry.op).u, limit.u)));
        } catch (const IllConditioned&) {
        }
    }
    const double fraction =
        static_cast<double>(passed_gate) / static_cast<double>(ops.size());
    const bool ok = worst <= kPathAgreementTol && fraction >= 0.9;
    report(4, "independent construction agreement", ok, worst, "max_gap");
}

// 5. Resolvent iterate error matches the closed form on diagonal positives.
void criterion_iterate_closed_form() {
    SplitMix64 rng(kSeed ^ 0x5u);
    double worst = 0.0;
    bool bound_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int rank = 1 + static_cast<int>(rng.below(6));
        std::vector<double> eigs;
        Matrix block = Matrix::Zero(rank, rank);
        for (int i = 0; i < rank; ++i) {
            const double value =
                rng.below(4) == 0 ? 0.0 : 0.1 + 2.9 * rng.uniform01();
            eigs.push_back(value);
            block(i, i) = value;
        }
        const ModuleSpace space(AlgebraShape({1}), rank);
        const AdjointableOp t(space, space, {block});
        const Projection p = range_projection(t);
        for (long n : {1L, 2L, 5L, 17L, 100L, 1234L}) {
            const AdjointableOp tn = iterate_T_n(t, n);
            double closed = 0.0;
            for (double value : eigs) {
                if (value > 0.0) {
                    closed = std::max(closed,
                                      1.0 / (1.0 + static_cast<double>(n) * value));
                }
            }
            worst = std::max(worst,
                             std::abs(op_norm(op_sub(tn, p)) - closed));
            if (op_norm(op_sub(compose(tn, t), t)) >
                1.0 / static_cast<double>(n)) {
                bound_ok = false;
            }
        }
    }
    report(5, "resolvent iterate closed form", worst <= kClosedFormTol && bound_ok,
           worst, "max_deviation");
}

// 6. The commutation battery is unanimous on 1000 labeled operators.
void criterion_battery() {
    const std::vector<LabeledOperator> ops = corpus(kSeed ^ 0x6u, 1000);
    int violations = 0;
    int label_mismatches = 0;
    for (const LabeledOperator& entry : ops) {
        try {
            const CenteredReport r = centered_report(entry.op, 8);
            for (const auto& [tag, result] : r.conditions) {
                if (result.holds != r.centered) ++violations;
            }
            if (entry.label == CorpusLabel::Centered && !r.centered) {
                ++label_mismatches;
            }
            if (entry.label == CorpusLabel::NotCentered && r.centered) {
                ++label_mismatches;
            }
        } catch (const EquivalenceViolation&) {
            ++violations;
        }
    }
    report(6, "commutation battery unanimous", violations == 0 && label_mismatches == 0,
           static_cast<double>(violations + label_mismatches), "defects");
}

// 7. Modulus product formula on weighted shifts, powers up to five.
void criterion_product_formula() {
    SplitMix64 rng(kSeed ^ 0x7u);
    double worst = 0.0;
    bool all_hold = true;
    for (int trial = 0; trial < 50; ++trial) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::WeightedShift;
        spec.shape = AlgebraShape({1});
        spec.domain_rank = 6;
        spec.codomain_rank = 6;
        for (int i = 0; i < 5; ++i) spec.weights.push_back(0.5 + 1.5 * rng.uniform01());
        const PolarFactors f = polar_decompose(generate(spec));
        for (int k = 1; k <= 5; ++k) {
            const ProductFormulaReport r = product_formula_check(f, k);
            if (!r.applicable || !r.holds) all_hold = false;
            worst = std::max(worst, r.residual / std::max(r.scale, 1e-300));
        }
    }
    report(7, "shift modulus product formula", all_hold && worst <= kIdentityTol,
           worst, "max_rel_residual");
}

// 8. The moduli product chain is all-or-nothing on every applicable diagonal.
void criterion_propagation() {
    const std::vector<LabeledOperator> ops = corpus(kSeed ^ 0x8u, 200);
    int non_uniform = 0;
    int applicable = 0;
    for (const LabeledOperator& entry : ops) {
        const PolarFactors f = polar_decompose(entry.op);
        for (int n = 1; n <= 6; ++n) {
            const PropagationReport r = propagation_check(f, n);
            if (!r.applicable) continue;
            ++applicable;
            if (!r.uniform) ++non_uniform;
        }
    }
    const bool ok = non_uniform == 0 && applicable > 0;
    report(8, "moduli chain uniform across diagonals", ok,
           static_cast<double>(non_uniform), "non_uniform");
}

// 9. The convergence diagnostic grows linearly in the truncation dimension.
void criterion_diagnostic_growth() {
    const long n1 = gap_diagnostic(1, 1e-2).n_required;
    const long n10 = gap_diagnostic(10, 1e-2).n_required;
    const long n100 = gap_diagnostic(100, 1e-2).n_required;
    const double r10 = static_cast<double>(n10) / static_cast<double>(n1);
    const double r100 = static_cast<double>(n100) / static_cast<double>(n10);
    const bool ok = n10 > n1 && n100 > n10 && r10 >= 5.0 && r10 <= 20.0 &&
                    r100 >= 5.0 && r100 <= 20.0;
    report(9, "diagnostic count grows linearly", ok, r100, "decade_ratio");
}

// 10. Two consecutive verify runs emit byte-identical machine output.
void criterion_determinism() {
    namespace fs = std::filesystem;
    const fs::path a = fs::temp_directory_path() / "modpolar_accept_a.json";
    const fs::path b = fs::temp_directory_path() / "modpolar_accept_b.json";
    const std::string base = std::string(MODPOLAR_CLI_PATH) +
                             " verify --suite all --seed 42 --trials 100 > ";
    const int rc_a = std::system((base + a.string()).c_str());
    const int rc_b = std::system((base + b.string()).c_str());
    const bool exited_ok = WIFEXITED(rc_a) && WEXITSTATUS(rc_a) == 0 &&
                           WIFEXITED(rc_b) && WEXITSTATUS(rc_b) == 0;
    const std::string out_a = read_text(a);
    const bool identical = !out_a.empty() && out_a == read_text(b);
    report(10, "verify output byte-identical", exited_ok && identical,
           static_cast<double>(out_a.size()), "bytes");
}

} // namespace

int main() {
    const std::vector<LabeledOperator> ops = polar_corpus(kSeed, 500);
    criterion_factorization(ops);
    criterion_identity_bundle(ops);
    criterion_existence(ops);
    criterion_path_agreement(ops);
    criterion_iterate_closed_form();
    criterion_battery();
    criterion_product_formula();
    criterion_propagation();
    criterion_diagnostic_growth();
    criterion_determinism();
    if (g_failures != 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
