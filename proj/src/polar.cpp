#include "modpolar/polar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "detail/dense.hpp"

namespace modpolar {

namespace {

struct SummandFactors {
    Matrix u;
    Matrix abs;
    Matrix abs_star;
    Matrix p_rstar;
    Matrix p_r;
};

SummandFactors factor_block(const Matrix& b) {
    const detail::Svd svd = detail::decompose_svd(b);
    const double cutoff = detail::rank_cutoff(b, svd);

    SummandFactors out;
    out.abs = Matrix::Zero(b.cols(), b.cols());
    out.abs_star = Matrix::Zero(b.rows(), b.rows());
    out.p_rstar = Matrix::Zero(b.cols(), b.cols());
    out.p_r = Matrix::Zero(b.rows(), b.rows());
    Matrix abs_pinv = Matrix::Zero(b.cols(), b.cols());
    for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
        const double s = svd.sigma(j);
        const Matrix vv = svd.v.col(j) * svd.v.col(j).adjoint();
        const Matrix uu = svd.u.col(j) * svd.u.col(j).adjoint();
        out.abs += s * vv;
        out.abs_star += s * uu;
        if (s > cutoff) {
            abs_pinv += (1.0 / s) * vv;
            out.p_rstar += vv;
            out.p_r += uu;
        }
    }
    out.u = b * abs_pinv;
    return out;
}

Matrix identity_like(const Matrix& m) { return Matrix::Identity(m.rows(), m.rows()); }

// Inverse square root of a Hermitian positive definite block by the coupled
// Denman-Beavers iteration (Y_k -> A^(1/2), Z_k -> A^(-1/2)), run on A/c with
// c = the Frobenius norm so the spectrum starts inside (0, 1].
Matrix inverse_sqrt_db(const Matrix& a) {
    const double c = a.norm();
    if (!(c > 0.0)) throw IllConditioned("inverse square root of the zero block");
    Matrix y = a / c;
    Matrix z = identity_like(a);
    const double tol = 1e-15;
    const double stall_ceiling = 1e-8;
    double prev_step = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 120; ++iter) {
        const Matrix y_next = 0.5 * (y + z.inverse());
        const Matrix z_next = 0.5 * (z + y.inverse());
        const double step = (y_next - y).norm();
        y = y_next;
        z = z_next;
        const double floor = std::max(y.norm(), 1e-300);
        if (step <= tol * floor) {
            return z / std::sqrt(c);
        }
        // Once the quadratic phase ends the step stops shrinking; if that
        // happens down at rounding level the factor is as accurate as the
        // conditioning of the shifted block allows, so accept it. A stall
        // above the ceiling is a genuine failure.
        if (step >= 0.5 * prev_step && step <= stall_ceiling * floor) {
            return z / std::sqrt(c);
        }
        prev_step = step;
    }
    throw NoConvergence("inverse square root iteration did not settle");
}

// Neville's scheme at eps = 0 over the tabulated (eps_k, value_k) pairs.
Matrix extrapolate_to_zero(const std::vector<double>& eps,
                           std::vector<Matrix> table) {
    const std::size_t n = table.size();
    for (std::size_t level = 1; level < n; ++level) {
        for (std::size_t i = 0; i + level < n; ++i) {
            const double xi = eps[i];
            const double xj = eps[i + level];
            table[i] = (xi * table[i + 1] - xj * table[i]) / (xi - xj);
        }
    }
    return table[0];
}

double retained_sigma_min(const Matrix& b, bool& any_retained) {
    const detail::Svd svd = detail::decompose_svd(b);
    const double cutoff = detail::rank_cutoff(b, svd);
    double smin = 0.0;
    any_retained = false;
    for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
        if (svd.sigma(j) > cutoff) {
            any_retained = true;
            smin = svd.sigma(j);
        }
    }
    if (any_retained && smin < 10.0 * cutoff) {
        throw IllConditioned("a retained singular value sits at the rank cutoff");
    }
    return smin;
}

double relative(double residual, double scale) {
    return residual / std::max(scale, 1e-300);
}

} // namespace

double PolarIdentityReport::max_residual() const {
    const double guard = std::max(scale, 1e-300);
    return std::max({factorization / guard, abs_star_conjugation / guard,
                     intertwine / guard, adjoint_factorization / guard,
                     initial_projection, final_projection});
}

AdjointableOp abs_op(const AdjointableOp& t) {
    return op_power(compose(op_adjoint(t), t), 0.5);
}

PolarFactors polar_decompose(const AdjointableOp& t) {
    std::vector<Matrix> u, abs, abs_star, p_rstar, p_r;
    for (const Matrix& b : t.blocks) {
        SummandFactors f = factor_block(b);
        u.push_back(std::move(f.u));
        abs.push_back(std::move(f.abs));
        abs_star.push_back(std::move(f.abs_star));
        p_rstar.push_back(std::move(f.p_rstar));
        p_r.push_back(std::move(f.p_r));
    }
    return PolarFactors{
        AdjointableOp(t.domain, t.codomain, std::move(u)),
        AdjointableOp(t.domain, t.domain, std::move(abs)),
        AdjointableOp(t.codomain, t.codomain, std::move(abs_star)),
        Projection(t.domain, t.domain, std::move(p_rstar)),
        Projection(t.codomain, t.codomain, std::move(p_r)),
    };
}

PolarFactors polar_decompose_via_limit(const AdjointableOp& t,
                                       const std::vector<double>& schedule) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(schedule[i] > 0.0)) throw InvalidSpec("schedule entries must be positive");
        if (i > 0 && !(schedule[i] < schedule[i - 1])) {
            throw InvalidSpec("schedule must decrease strictly");
        }
    }
    if (!schedule.empty() && schedule.size() < 2) {
        throw InvalidSpec("schedule needs at least two points to extrapolate");
    }

    std::vector<Matrix> u_blocks;
    u_blocks.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) {
        bool any_retained = false;
        const double smin = retained_sigma_min(b, any_retained);
        if (!any_retained) {
            u_blocks.push_back(Matrix::Zero(b.rows(), b.cols()));
            continue;
        }
        std::vector<double> eps = schedule;
        if (eps.empty()) {
            double e = smin * smin / 4.0;
            for (int k = 0; k < 6; ++k) {
                eps.push_back(e);
                e /= 4.0;
            }
        }
        const Matrix gram = detail::hermitize(b.adjoint() * b);
        std::vector<Matrix> table;
        table.reserve(eps.size());
        for (double e : eps) {
            const Matrix shifted =
                gram + e * Matrix::Identity(gram.rows(), gram.cols());
            table.push_back(b * inverse_sqrt_db(shifted));
        }
        u_blocks.push_back(extrapolate_to_zero(eps, std::move(table)));
    }

    const AdjointableOp t_star = op_adjoint(t);
    return PolarFactors{
        AdjointableOp(t.domain, t.codomain, std::move(u_blocks)),
        abs_op(t),
        abs_op(t_star),
        range_projection(t_star),
        range_projection(t),
    };
}

PartialIsometryReport verify_partial_isometry(const AdjointableOp& u, double tol) {
    const AdjointableOp gram = compose(op_adjoint(u), u);
    PartialIsometryReport report;
    report.idempotent_residual = op_norm(op_sub(compose(gram, gram), gram));
    report.self_adjoint_residual = op_norm(op_sub(gram, op_adjoint(gram)));
    report.triple_product_residual = op_norm(op_sub(compose(u, gram), u));
    report.is_partial_isometry = report.idempotent_residual <= tol &&
                                 report.self_adjoint_residual <= tol;
    return report;
}

PolarIdentityReport verify_polar_identities(const AdjointableOp& t,
                                            const PolarFactors& f, double tol) {
    PolarIdentityReport report;
    report.scale = op_norm(t);
    report.factorization = op_norm(op_sub(compose(f.u, f.abs), t));
    report.abs_star_conjugation =
        op_norm(op_sub(f.abs_star, compose(compose(f.u, f.abs), op_adjoint(f.u))));
    report.intertwine =
        op_norm(op_sub(compose(f.u, f.abs), compose(f.abs_star, f.u)));
    report.adjoint_factorization =
        op_norm(op_sub(op_adjoint(t), compose(op_adjoint(f.u), f.abs_star)));
    report.initial_projection =
        op_norm(op_sub(compose(op_adjoint(f.u), f.u), f.p_rstar));
    report.final_projection =
        op_norm(op_sub(compose(f.u, op_adjoint(f.u)), f.p_r));
    report.ok = report.max_residual() <= tol;
    return report;
}

ExistenceReport check_existence_conditions(const AdjointableOp& t, double tol) {
    const PolarFactors f = polar_decompose(t);
    const double scale = op_norm(t);

    ExistenceReport report;
    const Projection pr = range_projection(t);
    const Projection prs = range_projection(op_adjoint(t));
    const double proj_defect =
        std::max({op_norm(op_sub(compose(pr, pr), pr)),
                  op_norm(op_sub(pr, op_adjoint(pr))),
                  op_norm(op_sub(compose(prs, prs), prs)),
                  op_norm(op_sub(prs, op_adjoint(prs)))});
    report.ranges_complemented = proj_defect <= tol;

    const double factorization =
        relative(op_norm(op_sub(compose(f.u, f.abs), t)), scale);
    const double initial =
        op_norm(op_sub(compose(op_adjoint(f.u), f.u), f.p_rstar));
    report.defining_equalities = factorization <= tol && initial <= tol;

    const double range_abs = op_norm(op_sub(range_projection(f.abs), prs));
    const double range_abs_star = op_norm(op_sub(range_projection(f.abs_star), pr));
    report.range_equalities = range_abs <= tol && range_abs_star <= tol;

    report.max_residual = std::max({proj_defect, factorization, initial,
                                    range_abs, range_abs_star});
    if (report.ranges_complemented != report.defining_equalities ||
        report.defining_equalities != report.range_equalities) {
        throw EquivalenceViolation(
            "existence conditions disagree; the construction is defective");
    }
    return report;
}

AlphaIdentityReport alpha_intertwine_check(const PolarFactors& f, double alpha,
                                           double tol) {
    if (alpha <= 0.0) throw NonPositiveAlpha("power exponent must be positive");
    const AdjointableOp abs_a = op_power(f.abs, alpha);
    const AdjointableOp abs_star_a = op_power(f.abs_star, alpha);

    AlphaIdentityReport report;
    report.scale = std::max(op_norm(abs_a), op_norm(abs_star_a));
    report.conjugation = op_norm(
        op_sub(compose(compose(f.u, abs_a), op_adjoint(f.u)), abs_star_a));
    report.intertwine =
        op_norm(op_sub(compose(f.u, abs_a), compose(abs_star_a, f.u)));
    report.reverse_conjugation = op_norm(
        op_sub(compose(compose(op_adjoint(f.u), abs_star_a), f.u), abs_a));
    const double guard = std::max(report.scale, 1e-300);
    report.ok = report.conjugation / guard <= tol &&
                report.intertwine / guard <= tol &&
                report.reverse_conjugation / guard <= tol;
    return report;
}

bool criterion_check(const AdjointableOp& t, const AdjointableOp& w, double tol) {
    if (!verify_partial_isometry(w, tol).is_partial_isometry) {
        throw NotPartialIsometry("candidate is not a partial isometry");
    }
    const PolarFactors f = polar_decompose(t);
    const double scale = op_norm(t);
    const double factorization = op_norm(op_sub(compose(w, f.abs), t));
    const AdjointableOp kernel_leak =
        compose(w, op_sub(AdjointableOp::identity(t.domain), f.p_rstar));
    const bool ok = relative(factorization, scale) <= tol &&
                    op_norm(kernel_leak) <= tol;
    if (ok && op_norm(op_sub(w, f.u)) > tol) {
        throw EquivalenceViolation(
            "criterion passed for a candidate different from the canonical "
            "partial isometry");
    }
    return ok;
}

} // namespace modpolar
