#include "modpolar/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <utility>

#include <json.hpp>

#include "modpolar/algebra.hpp"
#include "modpolar/centered.hpp"
#include "modpolar/generators.hpp"
#include "modpolar/module.hpp"
#include "modpolar/polar.hpp"
#include "detail/dense.hpp"

namespace modpolar {

namespace {

constexpr double kGuard = 1e-300;
constexpr double kExactTol = 1e-10;
const double kAlphas[] = {0.5, 1.0, 2.0, 3.7};

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

AlgebraShape cycle_shape(int index) {
    static const std::vector<std::vector<int>> shapes = {{1}, {2}, {1, 2}, {3}};
    return AlgebraShape(shapes[static_cast<std::size_t>(index) % shapes.size()]);
}

AlgebraElement random_element(const AlgebraShape& shape, SplitMix64& rng) {
    std::vector<Matrix> blocks;
    for (int i = 0; i < shape.summands(); ++i) {
        const int n = shape.block_size(i);
        Matrix b(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                b(r, c) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
            }
        }
        blocks.push_back(std::move(b));
    }
    return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement random_positive_element(const AlgebraShape& shape, SplitMix64& rng) {
    const AlgebraElement c = random_element(shape, rng);
    return alg_mul(alg_adjoint(c), c);
}

ModuleVector random_vector(const ModuleSpace& space, SplitMix64& rng) {
    ModuleVector x = ModuleVector::zero(space);
    for (Matrix& b : x.blocks) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            for (Eigen::Index c = 0; c < b.cols(); ++c) {
                b(r, c) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
            }
        }
    }
    return x;
}

AdjointableOp random_op(const ModuleSpace& domain, const ModuleSpace& codomain,
                        SplitMix64& rng) {
    AdjointableOp t = AdjointableOp::zero(domain, codomain);
    for (Matrix& b : t.blocks) {
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            for (Eigen::Index c = 0; c < b.cols(); ++c) {
                b(r, c) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
            }
        }
    }
    return t;
}

// Clamp singular values under one percent of the operator maximum to exact
// zero, so Gram spectra keep a clean gap around the rank cutoff even after
// squaring or taking roots.
AdjointableOp snap_spectrum(const AdjointableOp& t) {
    double smax = 0.0;
    for (const Matrix& b : t.blocks) {
        if (b.size() == 0) continue;
        const detail::Svd svd = detail::decompose_svd(b);
        if (svd.sigma.size() > 0) smax = std::max(smax, svd.sigma(0));
    }
    AdjointableOp out = t;
    for (Matrix& b : out.blocks) {
        if (b.size() == 0) continue;
        const detail::Svd svd = detail::decompose_svd(b);
        Eigen::VectorXd sigma = svd.sigma;
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            if (sigma(i) < 0.01 * smax) sigma(i) = 0.0;
        }
        b = svd.u * sigma.asDiagonal() * svd.v.adjoint();
    }
    return out;
}

// Positive operator with genuine kernel directions (small spectrum snapped
// to zero by the generator).
AdjointableOp random_positive_op(const AlgebraShape& shape, int rank,
                                 SplitMix64& rng) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::Positive;
    spec.shape = shape;
    spec.domain_rank = rank;
    spec.codomain_rank = rank;
    spec.seed = rng.next();
    return generate(spec);
}

AdjointableOp polynomial_in(const AdjointableOp& t, SplitMix64& rng, int degree) {
    AdjointableOp acc = op_scale(Complex(rng.uniform_pm1(), rng.uniform_pm1()),
                                 AdjointableOp::identity(t.domain));
    AdjointableOp power = AdjointableOp::identity(t.domain);
    for (int j = 1; j <= degree; ++j) {
        power = compose(power, t);
        acc = op_add(acc, op_scale(Complex(rng.uniform_pm1(), rng.uniform_pm1()),
                                   power));
    }
    return acc;
}

AlgebraElement polynomial_in(const AlgebraElement& a, SplitMix64& rng, int degree) {
    AlgebraElement acc = alg_scale(Complex(rng.uniform_pm1(), rng.uniform_pm1()),
                                   AlgebraElement::identity(a.shape));
    AlgebraElement power = AlgebraElement::identity(a.shape);
    for (int j = 1; j <= degree; ++j) {
        power = alg_mul(power, a);
        acc = alg_add(acc, alg_scale(Complex(rng.uniform_pm1(), rng.uniform_pm1()),
                                     power));
    }
    return acc;
}

double scaled_alg_commutator(const AlgebraElement& a, const AlgebraElement& b) {
    const double na = alg_norm(a);
    const double nb = alg_norm(b);
    if (na <= kGuard || nb <= kGuard) return 0.0;
    return alg_norm(commutator(a, b)) / (na * nb);
}

struct Trial {
    double residual = 0.0;
    bool skipped = false;
};

using TrialFn = std::function<Trial(int, SplitMix64&)>;

InvariantResult run_invariant(const std::string& suite, const std::string& name,
                              double tolerance, std::uint64_t seed, int trials,
                              const TrialFn& fn) {
    InvariantResult result;
    result.suite = suite;
    result.name = name;
    result.trials = trials;
    result.tolerance = tolerance;
    SplitMix64 master(seed ^ fnv1a(suite + "/" + name));
    for (int i = 0; i < trials; ++i) {
        SplitMix64 rng(master.next());
        try {
            const Trial trial = fn(i, rng);
            if (trial.skipped) {
                ++result.skipped;
                continue;
            }
            result.max_residual = std::max(result.max_residual, trial.residual);
            if (!(trial.residual <= tolerance)) ++result.violations;
        } catch (const Error&) {
            ++result.violations;
        }
    }
    return result;
}

// --- core suite --------------------------------------------------------------

void core_suite(std::vector<InvariantResult>& out, std::uint64_t seed,
                int trials, double) {
    out.push_back(run_invariant(
        "core", "commutant_exact", kExactTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const AlgebraElement a = random_positive_element(shape, rng);
            const AlgebraElement b = polynomial_in(a, rng, 3);
            const AlgebraElement root = alg_power(a, 0.5);
            const AlgebraElement square = alg_mul(a, a);
            const AlgebraElement expish = functional_calculus(a, [](double t) {
                return 1.0 + t + t * t / 2.0 + t * t * t / 6.0;
            });
            Trial trial;
            trial.residual = std::max({scaled_alg_commutator(root, b),
                                       scaled_alg_commutator(square, b),
                                       scaled_alg_commutator(expish, b)});
            return trial;
        }));

    out.push_back(run_invariant(
        "core", "commutant_perturbed", 1.0, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            AlgebraElement a = random_positive_element(shape, rng);
            const double floor = 0.5 * std::max(alg_norm(a), 1.0);
            a = alg_add(a, alg_scale(floor, AlgebraElement::identity(shape)));
            const double norm_a = alg_norm(a);

            const AlgebraElement r = random_element(shape, rng);
            const double base_comm = alg_norm(commutator(a, r));
            if (base_comm <= 1e-14 * std::max(alg_norm(a) * alg_norm(r), 1.0)) {
                // Commutative summands: every functional commutator vanishes
                // identically, so there is nothing to scale against.
                return Trial{};
            }
            const double delta = 1e-6 / base_comm;
            const AlgebraElement b =
                alg_add(polynomial_in(a, rng, 2), alg_scale(delta, r));
            const double comm = alg_norm(commutator(a, b));

            // Lipschitz-style constants on [floor, norm(a)], with a factor
            // twenty of headroom over the power-series estimates.
            const double c_root = 20.0 / (2.0 * std::sqrt(floor));
            const double c_square = 20.0 * 2.0 * norm_a;
            const double c_poly =
                20.0 * (1.0 + norm_a + norm_a * norm_a / 2.0);

            const AlgebraElement root = alg_power(a, 0.5);
            const AlgebraElement square = alg_mul(a, a);
            const AlgebraElement expish = functional_calculus(a, [](double t) {
                return 1.0 + t + t * t / 2.0 + t * t * t / 6.0;
            });
            Trial trial;
            trial.residual = std::max(
                {alg_norm(commutator(root, b)) / (c_root * comm),
                 alg_norm(commutator(square, b)) / (c_square * comm),
                 alg_norm(commutator(expish, b)) / (c_poly * comm)});
            return trial;
        }));

    out.push_back(run_invariant(
        "core", "power_commutation", kExactTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const AlgebraElement t = random_positive_element(shape, rng);
            const AlgebraElement s = polynomial_in(t, rng, 3);
            Trial trial;
            for (double alpha : kAlphas) {
                trial.residual = std::max(
                    trial.residual, scaled_alg_commutator(s, alg_power(t, alpha)));
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "core", "cstar_identity", kExactTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraElement a = random_element(cycle_shape(i), rng);
            const double norm = alg_norm(a);
            Trial trial;
            trial.residual = std::abs(alg_norm(alg_mul(alg_adjoint(a), a)) -
                                      norm * norm) /
                             std::max(norm * norm, kGuard);
            return trial;
        }));

    out.push_back(run_invariant(
        "core", "spectral_mapping", kNilpotencyTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraElement a = random_positive_element(cycle_shape(i), rng);
            const std::vector<double> lambda = spectrum(a).eigenvalues;
            Trial trial;
            for (double alpha : {0.5, 2.0, 3.7}) {
                const std::vector<double> mu =
                    spectrum(alg_power(a, alpha)).eigenvalues;
                double scale = kGuard;
                for (double l : lambda) {
                    scale = std::max(scale, std::pow(std::max(l, 0.0), alpha));
                }
                for (std::size_t j = 0; j < lambda.size(); ++j) {
                    const double expected = std::pow(std::max(lambda[j], 0.0), alpha);
                    trial.residual = std::max(
                        trial.residual, std::abs(mu[j] - expected) / scale);
                }
            }
            return trial;
        }));
}

// --- module suite ------------------------------------------------------------

void module_suite(std::vector<InvariantResult>& out, std::uint64_t seed,
                  int trials, double tol) {
    out.push_back(run_invariant(
        "module", "inner_axioms", kExactTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const ModuleSpace space(cycle_shape(i), 1 + i % 3);
            const ModuleVector x = random_vector(space, rng);
            const ModuleVector y = random_vector(space, rng);
            const ModuleVector z = random_vector(space, rng);
            const AlgebraElement a = random_element(space.shape, rng);
            const Complex c(rng.uniform_pm1(), rng.uniform_pm1());
            const double nx = vec_norm(x);
            const double ny = vec_norm(y);
            const double nz = vec_norm(z);

            Trial trial;
            trial.residual = std::max(
                trial.residual,
                alg_norm(alg_sub(inner(x, vec_add(y, z)),
                                 alg_add(inner(x, y), inner(x, z)))) /
                    std::max(nx * (ny + nz), kGuard));
            trial.residual = std::max(
                trial.residual,
                alg_norm(alg_sub(inner(x, module_scale(y, a)),
                                 alg_mul(inner(x, y), a))) /
                    std::max(nx * ny * alg_norm(a), kGuard));
            trial.residual = std::max(
                trial.residual,
                alg_norm(alg_sub(inner(x, vec_scale(c, y)),
                                 alg_scale(c, inner(x, y)))) /
                    std::max(std::abs(c) * nx * ny, kGuard));
            trial.residual = std::max(
                trial.residual,
                alg_norm(alg_sub(alg_adjoint(inner(x, y)), inner(y, x))) /
                    std::max(nx * ny, kGuard));
            if (!positivity_check(inner(x, x)).positive) trial.residual = 1.0;
            return trial;
        }));

    out.push_back(run_invariant(
        "module", "adjoint_pairing", kExactTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const ModuleSpace domain(shape, 1 + i % 3);
            const ModuleSpace codomain(shape, 1 + (i / 3) % 3);
            const AdjointableOp t = random_op(domain, codomain, rng);
            const ModuleVector x = random_vector(domain, rng);
            const ModuleVector y = random_vector(codomain, rng);
            Trial trial;
            trial.residual =
                alg_norm(alg_sub(inner(apply(t, x), y),
                                 inner(x, apply(op_adjoint(t), y)))) /
                std::max(op_norm(t) * vec_norm(x) * vec_norm(y), kGuard);
            return trial;
        }));

    out.push_back(run_invariant(
        "module", "projection_commutant", tol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const AdjointableOp t = random_positive_op(shape, 1 + i % 3, rng);
            const AdjointableOp s = polynomial_in(t, rng, 2);
            const Projection p = range_projection(t);
            Trial trial;
            trial.residual =
                op_norm(op_commutator(s, p)) / std::max(op_norm(s), kGuard);
            return trial;
        }));

    out.push_back(run_invariant(
        "module", "range_matching", tol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const ModuleSpace dk(shape, 1 + i % 3);
            const ModuleSpace dm(shape, 1 + (i / 3) % 3);
            const ModuleSpace dl(shape, 1 + (i / 9) % 3);
            const AdjointableOp b = random_op(dk, dm, rng);
            AdjointableOp g = random_op(dk, dk, rng);
            g = op_add(g, op_scale(op_norm(g) + 0.5,
                                   AdjointableOp::identity(dk)));
            const AdjointableOp c = compose(b, g);
            const AdjointableOp a = random_op(dm, dl, rng);
            Trial trial;
            trial.residual = op_norm(op_sub(range_projection(compose(a, b)),
                                            range_projection(compose(a, c))));
            return trial;
        }));

    out.push_back(run_invariant(
        "module", "range_power", tol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AlgebraShape shape = cycle_shape(i);
            const ModuleSpace dk(shape, 1 + i % 3);
            const ModuleSpace dm(shape, 1 + (i / 3) % 3);
            const AdjointableOp t = snap_spectrum(random_op(dk, dm, rng));
            const AdjointableOp t_star = op_adjoint(t);
            const AdjointableOp gram = compose(t_star, t);
            Trial trial;
            trial.residual = std::max(
                op_norm(op_sub(range_projection(gram), range_projection(t_star))),
                op_norm(op_sub(range_projection(compose(t, t_star)),
                               range_projection(t))));
            for (double alpha : {0.5, 2.0}) {
                trial.residual = std::max(
                    trial.residual,
                    op_norm(op_sub(range_projection(op_power(gram, alpha)),
                                   range_projection(gram))));
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "module", "iterate_bounds", kNilpotencyTol, seed, trials,
        [](int i, SplitMix64& rng) {
            const AdjointableOp t = random_positive_op(cycle_shape(i), 1 + i % 3, rng);
            Trial trial;
            for (long n : {1L, 2L, 7L, 50L, 631L, 4096L}) {
                const AdjointableOp tn = iterate_T_n(t, n);
                trial.residual = std::max(trial.residual, op_norm(tn) - 1.0);
                trial.residual = std::max(
                    trial.residual, op_norm(op_sub(compose(tn, t), t)) -
                                        1.0 / static_cast<double>(n));
            }
            trial.residual = std::max(trial.residual, 0.0);
            return trial;
        }));
}

// --- polar suite -------------------------------------------------------------

void polar_suite(std::vector<InvariantResult>& out, std::uint64_t seed,
                 int trials, double tol) {
    SplitMix64 corpus_rng(seed ^ fnv1a("polar/corpus"));
    const auto ops = std::make_shared<std::vector<LabeledOperator>>(
        polar_corpus(corpus_rng.next(), trials));

    out.push_back(run_invariant(
        "polar", "identity_bundle", tol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            Trial trial;
            trial.residual =
                verify_polar_identities(t, polar_decompose(t)).max_residual();
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "adjoint_duality", tol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            Trial trial;
            trial.residual = op_norm(op_sub(
                op_adjoint(polar_decompose(t).u), polar_decompose(op_adjoint(t)).u));
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "abs_range", tol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            const PolarFactors f = polar_decompose(t);
            Trial trial;
            trial.residual = op_norm(op_sub(range_projection(f.abs), f.p_rstar));
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "idempotent_stability", tol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            const PolarFactors f = polar_decompose(t);
            const PolarFactors g = polar_decompose(f.u);
            Trial trial;
            trial.residual = std::max(
                op_norm(op_sub(g.u, f.u)),
                op_norm(op_sub(g.abs, compose(op_adjoint(f.u), f.u))));
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "limit_agreement", kLimitAgreementTol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            Trial trial;
            try {
                const PolarFactors lim = polar_decompose_via_limit(t);
                trial.residual = op_norm(op_sub(polar_decompose(t).u, lim.u));
            } catch (const IllConditioned&) {
                trial.skipped = true;
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "existence_unanimity", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            const ExistenceReport report = check_existence_conditions(t, tol);
            Trial trial;
            trial.residual = (report.ranges_complemented &&
                              report.defining_equalities &&
                              report.range_equalities)
                                 ? 0.0
                                 : 1.0;
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "alpha_identities", tol, seed, trials,
        [ops](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            const PolarFactors f = polar_decompose(t);
            Trial trial;
            for (double alpha : kAlphas) {
                const AlphaIdentityReport report = alpha_intertwine_check(f, alpha);
                const double guard = std::max(report.scale, kGuard);
                trial.residual = std::max(
                    {trial.residual, report.conjugation / guard,
                     report.intertwine / guard, report.reverse_conjugation / guard});
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "polar", "factor_criterion", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const AdjointableOp& t = (*ops)[static_cast<std::size_t>(i)].op;
            Trial trial;
            trial.residual =
                criterion_check(t, polar_decompose(t).u, tol) ? 0.0 : 1.0;
            return trial;
        }));
}

// --- centered suite ----------------------------------------------------------

void centered_suite(std::vector<InvariantResult>& out, std::uint64_t seed,
                    int trials, double tol) {
    SplitMix64 corpus_rng(seed ^ fnv1a("centered/corpus"));
    const auto ops = std::make_shared<std::vector<LabeledOperator>>(
        corpus(corpus_rng.next(), trials));

    out.push_back(run_invariant(
        "centered", "battery_labels", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            const CenteredReport report = centered_report(entry.op, 8, tol);
            Trial trial;
            if (entry.label == CorpusLabel::Centered && !report.centered) {
                trial.residual = 1.0;
            }
            if (entry.label == CorpusLabel::NotCentered && report.centered) {
                trial.residual = 1.0;
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "restricted_agreement", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64& rng) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            const PolarFactors f = polar_decompose(entry.op);
            std::vector<int> random_terms;
            for (int n = 1; n <= 8; ++n) {
                random_terms.push_back(
                    1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
            }
            const bool a =
                restricted_commutativity(f, RestrictedSequence::constant_one(8), tol)
                    .holds;
            const bool b =
                restricted_commutativity(f, RestrictedSequence::staircase(8), tol)
                    .holds;
            const bool c =
                restricted_commutativity(f, RestrictedSequence(random_terms), tol)
                    .holds;
            Trial trial;
            trial.residual = (a == b && b == c) ? 0.0 : 1.0;
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "adjoint_stability", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            const bool direct = centered_report(entry.op, 8, tol).centered;
            const bool starred =
                centered_report(op_adjoint(entry.op), 8, tol).centered;
            Trial trial;
            trial.residual = (direct == starred) ? 0.0 : 1.0;
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "unitary_conjugation", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64& rng) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            GeneratorSpec vspec;
            vspec.kind = GeneratorKind::Unitary;
            vspec.shape = entry.op.domain.shape;
            vspec.domain_rank = entry.op.domain.rank;
            vspec.codomain_rank = entry.op.domain.rank;
            vspec.seed = rng.next();
            const AdjointableOp v = generate(vspec);
            const AdjointableOp conjugated =
                compose(compose(op_adjoint(v), entry.op), v);
            const bool direct = centered_report(entry.op, 8, tol).centered;
            const bool rotated = centered_report(conjugated, 8, tol).centered;
            Trial trial;
            trial.residual = (direct == rotated) ? 0.0 : 1.0;
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "conjugate_absorption", tol, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            const PolarFactors f = polar_decompose(entry.op);
            const AbsorptionReport report = conjugate_absorption_check(f, 6, tol);
            Trial trial;
            if (!report.applicable) {
                trial.skipped = true;
            } else {
                trial.residual = report.max_residual;
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "product_formula", tol, seed, trials,
        [tol](int i, SplitMix64& rng) {
            GeneratorSpec spec;
            spec.kind = GeneratorKind::WeightedShift;
            spec.shape = cycle_shape(i);
            spec.domain_rank = 6;
            spec.codomain_rank = 6;
            for (int j = 0; j < 5; ++j) {
                spec.weights.push_back(0.5 + 1.5 * rng.uniform01());
            }
            spec.seed = rng.next();
            const PolarFactors f = polar_decompose(generate(spec));
            Trial trial;
            for (int k = 1; k <= 5; ++k) {
                const ProductFormulaReport report = product_formula_check(f, k, tol);
                if (!report.applicable) {
                    trial.residual = 1.0;
                    return trial;
                }
                trial.residual = std::max(
                    trial.residual, report.residual / std::max(report.scale, kGuard));
            }
            return trial;
        }));

    out.push_back(run_invariant(
        "centered", "propagation_uniform", 0.5, seed, trials,
        [ops, tol](int i, SplitMix64&) {
            const LabeledOperator& entry = (*ops)[static_cast<std::size_t>(i)];
            const PolarFactors f = polar_decompose(entry.op);
            Trial trial;
            bool any_applicable = false;
            for (int n = 1; n <= 6; ++n) {
                const PropagationReport report = propagation_check(f, n, tol);
                if (!report.applicable) continue;
                any_applicable = true;
                if (!report.uniform) trial.residual = 1.0;
            }
            if (!any_applicable) trial.skipped = true;
            return trial;
        }));
}

} // namespace

bool SuiteResult::ok() const {
    return std::all_of(invariants.begin(), invariants.end(),
                       [](const InvariantResult& r) { return r.violations == 0; });
}

SuiteResult run_suite(const std::string& suite, std::uint64_t seed, int trials,
                      double tol) {
    if (trials < 1) throw InvalidSpec("trial count must be at least one");
    SuiteResult result;
    result.suite = suite;
    result.seed = seed;
    result.trials = trials;
    if (suite == "core") {
        core_suite(result.invariants, seed, trials, tol);
    } else if (suite == "module") {
        module_suite(result.invariants, seed, trials, tol);
    } else if (suite == "polar") {
        polar_suite(result.invariants, seed, trials, tol);
    } else if (suite == "centered") {
        centered_suite(result.invariants, seed, trials, tol);
    } else if (suite == "all") {
        core_suite(result.invariants, seed, trials, tol);
        module_suite(result.invariants, seed, trials, tol);
        polar_suite(result.invariants, seed, trials, tol);
        centered_suite(result.invariants, seed, trials, tol);
    } else {
        throw UnknownSuite("unknown suite: " + suite);
    }
    return result;
}

std::string render_json(const SuiteResult& result) {
    nlohmann::json doc;
    doc["suite"] = result.suite;
    doc["seed"] = result.seed;
    doc["trials"] = result.trials;
    doc["ok"] = result.ok();
    nlohmann::json invariants = nlohmann::json::array();
    for (const InvariantResult& r : result.invariants) {
        nlohmann::json item;
        item["suite"] = r.suite;
        item["name"] = r.name;
        item["trials"] = r.trials;
        item["violations"] = r.violations;
        item["skipped"] = r.skipped;
        item["max_residual"] = r.max_residual;
        item["tolerance"] = r.tolerance;
        invariants.push_back(std::move(item));
    }
    doc["invariants"] = std::move(invariants);
    return doc.dump(2) + "\n";
}

std::string render_table(const SuiteResult& result) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-9s %-24s %7s %5s %5s %13s %10s\n",
                  "suite", "invariant", "trials", "viol", "skip",
                  "max residual", "tolerance");
    out += line;
    for (const InvariantResult& r : result.invariants) {
        std::snprintf(line, sizeof(line), "%-9s %-24s %7d %5d %5d %13.3e %10.1e\n",
                      r.suite.c_str(), r.name.c_str(), r.trials, r.violations,
                      r.skipped, r.max_residual, r.tolerance);
        out += line;
    }
    out += result.ok() ? "result: ok\n" : "result: violations found\n";
    return out;
}

} // namespace modpolar
