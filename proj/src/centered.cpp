#include "modpolar/centered.hpp"

#include <algorithm>
#include <cmath>

#include "detail/dense.hpp"

namespace modpolar {

namespace {

// A word assembled from products of factors carries rounding noise on the
// order of machine epsilon times the product of the factor norms. A word
// whose own norm sits below this floor relative to that product is
// numerically indistinguishable from zero (think powers of a nilpotent
// partial isometry after a change of basis), so commutators against it are
// vacuous rather than evidence of non-commutation.
constexpr double kWordNoiseFloor = 1e-11;

double scaled_commutator(const AdjointableOp& a, double scale_a,
                         const AdjointableOp& b, double scale_b) {
    const double na = op_norm(a);
    const double nb = op_norm(b);
    if (na <= kWordNoiseFloor * scale_a || nb <= kWordNoiseFloor * scale_b) {
        return 0.0;
    }
    if (na <= 1e-300 || nb <= 1e-300) return 0.0;
    return op_norm(op_commutator(a, b)) / (na * nb);
}

// Shared powers and moduli of one decomposed operator, precomputed up to the
// requested horizon.
class Family {
public:
    Family(const PolarFactors& f, int horizon)
        : u_(f.u), abs_(f.abs), abs_star_(f.abs_star) {
        const AdjointableOp t = compose(f.u, f.abs);
        norm_u_ = op_norm(f.u);
        norm_t_ = op_norm(t);
        u_pows_.push_back(AdjointableOp::identity(t.domain));
        t_pows_.push_back(AdjointableOp::identity(t.domain));
        for (int j = 1; j <= horizon; ++j) {
            u_pows_.push_back(compose(u_pows_.back(), f.u));
            t_pows_.push_back(compose(t_pows_.back(), t));
        }
        abs_t_.push_back(AdjointableOp::identity(t.domain));
        abs_t_star_.push_back(AdjointableOp::identity(t.domain));
        for (int j = 1; j <= horizon; ++j) {
            abs_t_.push_back(abs_op(t_pows_[static_cast<std::size_t>(j)]));
            abs_t_star_.push_back(
                abs_op(op_adjoint(t_pows_[static_cast<std::size_t>(j)])));
        }
    }

    const AdjointableOp& u_pow(int j) const { return u_pows_[static_cast<std::size_t>(j)]; }
    const AdjointableOp& t_pow(int j) const { return t_pows_[static_cast<std::size_t>(j)]; }
    const AdjointableOp& abs_t(int j) const { return abs_t_[static_cast<std::size_t>(j)]; }
    const AdjointableOp& abs_t_star(int j) const { return abs_t_star_[static_cast<std::size_t>(j)]; }
    const AdjointableOp& abs() const { return abs_; }
    const AdjointableOp& abs_star() const { return abs_star_; }

    // U^j |T| (U^j)*
    AdjointableOp conj(int j) const {
        return compose(compose(u_pow(j), abs_), op_adjoint(u_pow(j)));
    }
    // (U^j)* |T| U^j
    AdjointableOp conj_rev(int j) const {
        return compose(compose(op_adjoint(u_pow(j)), abs_), u_pow(j));
    }
    // (U^j)* |T*| U^j
    AdjointableOp conj_star(int j) const {
        return compose(compose(op_adjoint(u_pow(j)), abs_star_), u_pow(j));
    }

    // Factor-norm products feeding the noise floor in scaled_commutator.
    double t_scale(int j) const { return std::pow(norm_t_, j); }
    double u_scale(int j) const { return std::pow(norm_u_, j); }
    double conj_scale(int j) const {
        return u_scale(j) * u_scale(j) * norm_t_;
    }

private:
    AdjointableOp u_;
    AdjointableOp abs_;
    AdjointableOp abs_star_;
    double norm_u_ = 0.0;
    double norm_t_ = 0.0;
    std::vector<AdjointableOp> u_pows_;
    std::vector<AdjointableOp> t_pows_;
    std::vector<AdjointableOp> abs_t_;
    std::vector<AdjointableOp> abs_t_star_;
};

ConditionResult pairwise_commutation(const std::vector<AdjointableOp>& members,
                                     const std::vector<double>& scales,
                                     double tol) {
    ConditionResult result{true, 0.0};
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            result.max_scaled_residual = std::max(
                result.max_scaled_residual,
                scaled_commutator(members[a], scales[a], members[b], scales[b]));
        }
    }
    result.holds = result.max_scaled_residual <= tol;
    return result;
}

void require_order(int n_max) {
    if (n_max < 1) throw InvalidSpec("order bound must be at least one");
}

ConditionResult evaluate_tag(const Family& fam, ConditionTag tag, int n_max,
                             double tol) {
    ConditionResult result{true, 0.0};
    auto feed = [&result](double r) {
        result.max_scaled_residual = std::max(result.max_scaled_residual, r);
    };
    switch (tag) {
        case ConditionTag::I: {
            std::vector<AdjointableOp> members;
            std::vector<double> scales;
            for (int n = 1; n <= n_max; ++n) {
                members.push_back(compose(fam.t_pow(n), op_adjoint(fam.t_pow(n))));
                members.push_back(compose(op_adjoint(fam.t_pow(n)), fam.t_pow(n)));
                scales.push_back(fam.t_scale(2 * n));
                scales.push_back(fam.t_scale(2 * n));
            }
            return pairwise_commutation(members, scales, tol);
        }
        case ConditionTag::II:
            for (int m = 1; m <= n_max; ++m) {
                for (int n = 1; m + n <= n_max + 1; ++n) {
                    feed(scaled_commutator(fam.abs_t(n), fam.t_scale(n),
                                           fam.abs_t_star(m), fam.t_scale(m)));
                }
            }
            break;
        case ConditionTag::III:
            for (int n = 1; n <= n_max; ++n) {
                feed(scaled_commutator(fam.abs_t(n), fam.t_scale(n),
                                       fam.abs_star(), fam.t_scale(1)));
            }
            break;
        case ConditionTag::VI:
            for (int m = 1; m <= n_max; ++m) {
                for (int n = 1; m + n <= n_max + 1; ++n) {
                    feed(scaled_commutator(fam.conj(m), fam.conj_scale(m),
                                           fam.abs_t(n), fam.t_scale(n)));
                }
            }
            break;
        case ConditionTag::VII:
            for (int n = 1; n <= n_max; ++n) {
                feed(scaled_commutator(fam.conj(n), fam.conj_scale(n),
                                       fam.abs(), fam.t_scale(1)));
            }
            break;
        case ConditionTag::VIII:
            for (int n = 1; n <= n_max; ++n) {
                feed(scaled_commutator(fam.abs_t_star(n), fam.t_scale(n),
                                       fam.abs(), fam.t_scale(1)));
            }
            break;
        case ConditionTag::IX:
            for (int n = 1; n <= n_max; ++n) {
                feed(scaled_commutator(fam.conj_star(n), fam.conj_scale(n),
                                       fam.abs_star(), fam.t_scale(1)));
            }
            break;
        case ConditionTag::X:
            for (int m = 1; m <= n_max; ++m) {
                for (int n = 1; m + n <= n_max + 1; ++n) {
                    feed(scaled_commutator(fam.conj_star(m), fam.conj_scale(m),
                                           fam.abs_t_star(n), fam.t_scale(n)));
                }
            }
            break;
        case ConditionTag::XI: {
            std::vector<AdjointableOp> members;
            std::vector<double> scales;
            members.push_back(fam.abs());
            scales.push_back(fam.t_scale(1));
            for (int j = 1; j <= n_max; ++j) {
                members.push_back(fam.conj(j));
                members.push_back(fam.conj_rev(j));
                scales.push_back(fam.conj_scale(j));
                scales.push_back(fam.conj_scale(j));
            }
            return pairwise_commutation(members, scales, tol);
        }
    }
    result.holds = result.max_scaled_residual <= tol;
    return result;
}

} // namespace

RestrictedSequence::RestrictedSequence(std::vector<int> t) : terms(std::move(t)) {
    for (std::size_t n = 0; n < terms.size(); ++n) {
        if (terms[n] < 1 || terms[n] > static_cast<int>(n) + 1) {
            throw InvalidSequence("term " + std::to_string(n + 1) +
                                  " leaves the admissible range");
        }
    }
}

RestrictedSequence RestrictedSequence::constant_one(int length) {
    return RestrictedSequence(std::vector<int>(static_cast<std::size_t>(length), 1));
}

RestrictedSequence RestrictedSequence::staircase(int length) {
    std::vector<int> t(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) t[static_cast<std::size_t>(n)] = n + 1;
    return RestrictedSequence(std::move(t));
}

RestrictedSequence RestrictedSequence::midpoint(int length) {
    std::vector<int> t(static_cast<std::size_t>(length));
    for (int n = 0; n < length; ++n) t[static_cast<std::size_t>(n)] = (n + 2) / 2;
    return RestrictedSequence(std::move(t));
}

ConditionTag parse_condition_tag(const std::string& name) {
    if (name == "i") return ConditionTag::I;
    if (name == "ii") return ConditionTag::II;
    if (name == "iii") return ConditionTag::III;
    if (name == "vi") return ConditionTag::VI;
    if (name == "vii") return ConditionTag::VII;
    if (name == "viii") return ConditionTag::VIII;
    if (name == "ix") return ConditionTag::IX;
    if (name == "x") return ConditionTag::X;
    if (name == "xi") return ConditionTag::XI;
    throw UnknownTag("unknown condition tag: " + name);
}

std::string condition_tag_name(ConditionTag tag) {
    switch (tag) {
        case ConditionTag::I: return "i";
        case ConditionTag::II: return "ii";
        case ConditionTag::III: return "iii";
        case ConditionTag::VI: return "vi";
        case ConditionTag::VII: return "vii";
        case ConditionTag::VIII: return "viii";
        case ConditionTag::IX: return "ix";
        case ConditionTag::X: return "x";
        case ConditionTag::XI: return "xi";
    }
    throw UnknownTag("unhandled condition tag");
}

const std::vector<ConditionTag>& report_tags() {
    static const std::vector<ConditionTag> tags = {
        ConditionTag::I,   ConditionTag::II, ConditionTag::III,
        ConditionTag::VI,  ConditionTag::VII, ConditionTag::VIII,
        ConditionTag::IX,  ConditionTag::X,  ConditionTag::XI,
    };
    return tags;
}

ConditionResult centered_direct(const AdjointableOp& t, int n_max, double tol) {
    if (!t.square()) throw NotSquare("centered conditions need a square operator");
    require_order(n_max);
    const double norm_t = op_norm(t);
    std::vector<AdjointableOp> members;
    std::vector<double> scales;
    AdjointableOp power = AdjointableOp::identity(t.domain);
    for (int n = 1; n <= n_max; ++n) {
        power = compose(power, t);
        members.push_back(compose(power, op_adjoint(power)));
        members.push_back(compose(op_adjoint(power), power));
        scales.push_back(std::pow(norm_t, 2 * n));
        scales.push_back(std::pow(norm_t, 2 * n));
    }
    return pairwise_commutation(members, scales, tol);
}

ConditionResult condition_family(const PolarFactors& f, ConditionTag tag,
                                 int n_max, double tol) {
    if (!f.u.square()) throw NotSquare("centered conditions need a square operator");
    require_order(n_max);
    const Family fam(f, n_max);
    return evaluate_tag(fam, tag, n_max, tol);
}

ConditionResult restricted_commutativity(const PolarFactors& f,
                                         const RestrictedSequence& s,
                                         double tol) {
    if (!f.u.square()) throw NotSquare("centered conditions need a square operator");
    for (std::size_t n = 0; n < s.terms.size(); ++n) {
        if (s.terms[n] < 1 || s.terms[n] > static_cast<int>(n) + 1) {
            throw InvalidSequence("term " + std::to_string(n + 1) +
                                  " leaves the admissible range");
        }
    }
    const Family fam(f, std::max(s.length(), 1));
    ConditionResult result{true, 0.0};
    for (int n = 1; n <= s.length(); ++n) {
        const int tn = s.terms[static_cast<std::size_t>(n - 1)];
        result.max_scaled_residual = std::max(
            result.max_scaled_residual,
            scaled_commutator(fam.conj(tn), fam.conj_scale(tn),
                              fam.abs_t(n + 1 - tn), fam.t_scale(n + 1 - tn)));
    }
    result.holds = result.max_scaled_residual <= tol;
    return result;
}

PropagationReport propagation_check(const PolarFactors& f, int n, double tol) {
    if (!f.u.square()) throw NotSquare("centered conditions need a square operator");
    require_order(n);
    const Family fam(f, n + 1);

    PropagationReport report;
    report.applicable = true;
    for (int k = 1; k <= n && report.applicable; ++k) {
        for (int l = 1; k + l <= n + 1; ++l) {
            if (scaled_commutator(fam.conj(k), fam.conj_scale(k),
                                  fam.abs_t(l), fam.t_scale(l)) > tol) {
                report.applicable = false;
                break;
            }
        }
    }
    if (!report.applicable) return report;

    std::vector<bool> verdicts;
    for (int t = 1; t <= n + 1; ++t) {
        const int s = n + 2 - t;
        const AdjointableOp sq = compose(fam.abs_t(t), fam.abs_t(t));
        const double residual = scaled_commutator(sq, fam.t_scale(2 * t),
                                                  fam.conj(s), fam.conj_scale(s));
        report.scaled_residuals.push_back(residual);
        verdicts.push_back(residual <= tol);
    }
    report.uniform = std::all_of(verdicts.begin(), verdicts.end(),
                                 [&](bool v) { return v == verdicts.front(); });
    report.chain_holds = verdicts.front() && report.uniform;
    return report;
}

ProductFormulaReport product_formula_check(const PolarFactors& f, int k,
                                           double tol) {
    if (!f.u.square()) throw NotSquare("centered conditions need a square operator");
    require_order(k);
    const Family fam(f, k);

    ProductFormulaReport report;
    report.applicable = true;
    for (int j = 1; j < k; ++j) {
        if (scaled_commutator(fam.conj(j), fam.conj_scale(j),
                              fam.abs(), fam.t_scale(1)) > kCommutatorTol) {
            report.applicable = false;
            return report;
        }
    }

    AdjointableOp product = AdjointableOp::identity(f.u.domain);
    for (int j = 1; j <= k; ++j) {
        product = compose(product, fam.conj(j));
    }
    report.residual = op_norm(op_sub(fam.abs_t_star(k), product));
    report.scale = std::pow(op_norm(compose(f.u, f.abs)), k);
    report.holds = report.residual <= tol * std::max(report.scale, 1e-300);
    return report;
}

AbsorptionReport conjugate_absorption_check(const PolarFactors& f, int n,
                                            double tol) {
    if (!f.u.square()) throw NotSquare("centered conditions need a square operator");
    require_order(n);
    const Family fam(f, n + 1);

    AbsorptionReport report;
    report.applicable = true;
    for (int k = 1; k <= n; ++k) {
        if (scaled_commutator(fam.conj(k), fam.conj_scale(k),
                              fam.abs(), fam.t_scale(1)) > kCommutatorTol) {
            report.applicable = false;
            return report;
        }
    }

    const double scale = std::max(op_norm(f.abs), 1e-300);
    for (int s = 1; s <= n + 1; ++s) {
        for (int t = 1; t <= s; ++t) {
            const AdjointableOp lhs = compose(fam.conj(s), fam.u_pow(t));
            const AdjointableOp rhs = compose(
                compose(fam.u_pow(s), fam.abs()), op_adjoint(fam.u_pow(s - t)));
            report.max_residual = std::max(
                report.max_residual, op_norm(op_sub(lhs, rhs)) / scale);
            const AdjointableOp lhs_star = compose(op_adjoint(fam.u_pow(t)), fam.conj(s));
            const AdjointableOp rhs_star = compose(
                compose(fam.u_pow(s - t), fam.abs()), op_adjoint(fam.u_pow(s)));
            report.max_residual = std::max(
                report.max_residual, op_norm(op_sub(lhs_star, rhs_star)) / scale);
        }
    }
    report.holds = report.max_residual <= tol;
    return report;
}

CenteredReport centered_report(const AdjointableOp& t, int n_max, double tol) {
    if (!t.square()) throw NotSquare("centered conditions need a square operator");
    require_order(n_max);
    const PolarFactors f = polar_decompose(t);
    const Family fam(f, n_max);

    CenteredReport report;
    report.order_bound = n_max;
    for (ConditionTag tag : report_tags()) {
        if (tag == ConditionTag::I) {
            report.conditions.emplace_back(tag, centered_direct(t, n_max, tol));
        } else {
            report.conditions.emplace_back(tag, evaluate_tag(fam, tag, n_max, tol));
        }
    }
    report.sequence_samples.push_back(restricted_commutativity(
        f, RestrictedSequence::constant_one(n_max), tol));
    report.sequence_samples.push_back(restricted_commutativity(
        f, RestrictedSequence::staircase(n_max), tol));
    report.sequence_samples.push_back(restricted_commutativity(
        f, RestrictedSequence::midpoint(n_max), tol));

    std::vector<bool> verdicts;
    for (const auto& [tag, result] : report.conditions) {
        verdicts.push_back(result.holds);
        report.max_residual = std::max(report.max_residual, result.max_scaled_residual);
    }
    for (const ConditionResult& result : report.sequence_samples) {
        verdicts.push_back(result.holds);
        report.max_residual = std::max(report.max_residual, result.max_scaled_residual);
    }
    const bool unanimous = std::all_of(verdicts.begin(), verdicts.end(),
                                       [&](bool v) { return v == verdicts.front(); });
    if (!unanimous) {
        throw EquivalenceViolation(
            "equivalent commutation conditions disagree; this indicates a "
            "numerical or implementation defect");
    }
    report.centered = verdicts.front();

    report.exactness = Exactness::BoundedOnly;
    for (int k = 1; k <= n_max; ++k) {
        if (op_norm(fam.u_pow(k)) <= kNilpotencyTol) {
            report.exactness = Exactness::Exact;
            break;
        }
    }
    return report;
}

} // namespace modpolar
