#include <doctest.h>

#include <cmath>

#include "modpolar/centered.hpp"
#include "modpolar/errors.hpp"
#include "modpolar/polar.hpp"
#include "oracles.hpp"

using namespace modpolar;
using oracles::diag_op;
using oracles::make_matrix;
using oracles::max_entry_diff;
using oracles::naive_adjoint;
using oracles::naive_mul;
using oracles::scalar_op;
using oracles::scalar_space;
using oracles::shift_op;

namespace {

AdjointableOp jordan2() {
    return scalar_op({{1.0, 1.0}, {0.0, 1.0}});
}

AdjointableOp circulant3() {
    return scalar_op({{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
}

} // namespace

TEST_CASE("the moduli products of the 2x2 Jordan block do not commute") {
    const Matrix t = jordan2().blocks[0];
    const Matrix tt_star = naive_mul(t, naive_adjoint(t));
    const Matrix t_star_t = naive_mul(naive_adjoint(t), t);
    CHECK(max_entry_diff(naive_mul(tt_star, t_star_t),
                         make_matrix({{3.0, 4.0}, {2.0, 3.0}})) == 0.0);
    CHECK(max_entry_diff(naive_mul(t_star_t, tt_star),
                         make_matrix({{3.0, 2.0}, {4.0, 3.0}})) == 0.0);

    const ConditionResult r = centered_direct(jordan2(), 2);
    CHECK_FALSE(r.holds);
    CHECK(r.max_scaled_residual > 1e-8);
}

TEST_CASE("direct family check on centered inputs") {
    CHECK(centered_direct(circulant3(), 4).holds);
    CHECK(centered_direct(shift_op({1.0, 2.0}), 4).holds);
    CHECK(centered_direct(diag_op({2.0, 0.5}), 4).holds);

    const ModuleSpace s2 = scalar_space(2);
    const ModuleSpace s3 = scalar_space(3);
    const AdjointableOp rect(s2, s3, {Matrix::Random(3, 2)});
    CHECK_THROWS_AS(centered_direct(rect, 2), NotSquare);
}

TEST_CASE("condition tag names round-trip") {
    for (ConditionTag tag : report_tags()) {
        CHECK(parse_condition_tag(condition_tag_name(tag)) == tag);
    }
    CHECK(report_tags().size() == 9);
    CHECK_THROWS_AS(parse_condition_tag("iv"), UnknownTag);
    CHECK_THROWS_AS(parse_condition_tag(""), UnknownTag);
}

TEST_CASE("single conditions on the weighted shift and the Jordan block") {
    const PolarFactors shift = polar_decompose(shift_op({1.0, 2.0}));

    // U|T|U* = diag(0,1,2), U^2|T|(U^2)* = diag(0,0,1), U^3 = 0: everything
    // stays diagonal, so the conjugation condition holds.
    const ConditionResult vii = condition_family(shift, ConditionTag::VII, 3);
    CHECK(vii.holds);
    CHECK(vii.max_scaled_residual <= 1e-12);

    const Matrix u = shift.u.blocks[0];
    const Matrix conj1 = naive_mul(naive_mul(u, shift.abs.blocks[0]), naive_adjoint(u));
    CHECK(max_entry_diff(conj1, diag_op({0.0, 1.0, 2.0}).blocks[0]) < 1e-14);
    const Matrix conj2 = naive_mul(naive_mul(u, conj1), naive_adjoint(u));
    CHECK(max_entry_diff(conj2, diag_op({0.0, 0.0, 1.0}).blocks[0]) < 1e-14);

    const PolarFactors jordan = polar_decompose(jordan2());
    CHECK_FALSE(condition_family(jordan, ConditionTag::III, 2).holds);
    CHECK(condition_family(jordan, ConditionTag::III, 2).holds ==
          centered_direct(jordan2(), 2).holds);

    // A positive operator has U = p_rstar, a projection commuting with |T|.
    const PolarFactors pos = polar_decompose(scalar_op({{2.0, 1.0}, {1.0, 2.0}}));
    for (ConditionTag tag : report_tags()) {
        CHECK(condition_family(pos, tag, 3).holds);
    }
}

TEST_CASE("restricted sequences validate their terms") {
    CHECK(RestrictedSequence({1, 2, 1}).length() == 3);
    CHECK(RestrictedSequence::constant_one(4).terms == std::vector<int>{1, 1, 1, 1});
    CHECK(RestrictedSequence::staircase(4).terms == std::vector<int>{1, 2, 3, 4});
    CHECK(RestrictedSequence::midpoint(4).terms == std::vector<int>{1, 1, 2, 2});
    CHECK_THROWS_AS(RestrictedSequence({2}), InvalidSequence);
    CHECK_THROWS_AS(RestrictedSequence({1, 3}), InvalidSequence);
    CHECK_THROWS_AS(RestrictedSequence({1, 0}), InvalidSequence);
}

TEST_CASE("restricted commutativity along sampled sequences") {
    const PolarFactors shift = polar_decompose(shift_op({1.0, 2.0}));
    CHECK(restricted_commutativity(shift, RestrictedSequence({1, 2, 1})).holds);
    CHECK(restricted_commutativity(shift, RestrictedSequence::constant_one(4)).holds);

    const PolarFactors jordan = polar_decompose(jordan2());
    const bool ones = restricted_commutativity(jordan, RestrictedSequence::constant_one(4)).holds;
    const bool stairs = restricted_commutativity(jordan, RestrictedSequence::staircase(4)).holds;
    CHECK_FALSE(ones);
    CHECK(ones == stairs);
}

TEST_CASE("diagonal propagation of the moduli products") {
    const PolarFactors shift = polar_decompose(shift_op({1.0, 2.0, 3.0}));
    const PropagationReport r1 = propagation_check(shift, 1);
    CHECK(r1.applicable);
    CHECK(r1.uniform);
    CHECK(r1.chain_holds);
    CHECK(r1.scaled_residuals.size() == 2);

    const PropagationReport r4 = propagation_check(shift, 4);
    CHECK(r4.applicable);
    CHECK(r4.uniform);
    CHECK(r4.chain_holds);

    const PolarFactors jordan = polar_decompose(jordan2());
    CHECK_FALSE(propagation_check(jordan, 1).applicable);

    const PolarFactors normal = polar_decompose(circulant3());
    for (int n = 1; n <= 4; ++n) {
        const PropagationReport r = propagation_check(normal, n);
        CHECK(r.applicable);
        CHECK(r.chain_holds);
    }
}

TEST_CASE("product formula for powers of the shift") {
    const PolarFactors shift = polar_decompose(shift_op({1.0, 2.0, 3.0}));

    const ProductFormulaReport r1 = product_formula_check(shift, 1);
    CHECK(r1.applicable);
    CHECK(r1.holds);

    const ProductFormulaReport r2 = product_formula_check(shift, 2);
    CHECK(r2.applicable);
    CHECK(r2.holds);
    CHECK(r2.residual <= 1e-12 * r2.scale);

    // |(T^2)*| = diag(0,0,2,6) is the product diag(0,1,2,3) . diag(0,0,1,2).
    const AdjointableOp t2 = op_pow_int(shift_op({1.0, 2.0, 3.0}), 2);
    CHECK(max_entry_diff(abs_op(op_adjoint(t2)), diag_op({0.0, 0.0, 2.0, 6.0})) < 1e-13);
    CHECK(max_entry_diff(
              naive_mul(diag_op({0.0, 1.0, 2.0, 3.0}).blocks[0],
                        diag_op({0.0, 0.0, 1.0, 2.0}).blocks[0]),
              diag_op({0.0, 0.0, 2.0, 6.0}).blocks[0]) == 0.0);

    const PolarFactors normal = polar_decompose(circulant3());
    const ProductFormulaReport r3 = product_formula_check(normal, 3);
    CHECK(r3.applicable);
    CHECK(r3.holds);

    const ProductFormulaReport rj = product_formula_check(polar_decompose(jordan2()), 2);
    CHECK_FALSE(rj.applicable);
}

TEST_CASE("conjugated moduli absorb trailing powers of the isometry") {
    const PolarFactors shift = polar_decompose(shift_op({1.0, 2.0, 3.0}));
    const AbsorptionReport r = conjugate_absorption_check(shift, 3);
    CHECK(r.applicable);
    CHECK(r.holds);
    CHECK(r.max_residual <= 1e-10);

    CHECK_FALSE(conjugate_absorption_check(polar_decompose(jordan2()), 2).applicable);
}

TEST_CASE("full battery on a nilpotent shift is exact and unanimous") {
    const CenteredReport report = centered_report(shift_op({1.0, 2.0}), 6);
    CHECK(report.centered);
    CHECK(report.exactness == Exactness::Exact);
    CHECK(report.order_bound == 6);
    CHECK(report.conditions.size() == 9);
    CHECK(report.sequence_samples.size() == 3);
    for (const auto& [tag, result] : report.conditions) CHECK(result.holds);
    for (const ConditionResult& r : report.sequence_samples) CHECK(r.holds);
}

TEST_CASE("full battery on the Jordan block is unanimously negative") {
    const CenteredReport report = centered_report(jordan2(), 4);
    CHECK_FALSE(report.centered);
    for (const auto& [tag, result] : report.conditions) CHECK_FALSE(result.holds);
    for (const ConditionResult& r : report.sequence_samples) CHECK_FALSE(r.holds);
    CHECK(report.max_residual > 1e-8);
}

TEST_CASE("full battery on a unitary has no finite certificate") {
    const CenteredReport report = centered_report(circulant3(), 5);
    CHECK(report.centered);
    CHECK(report.exactness == Exactness::BoundedOnly);
}

TEST_CASE("battery rejects rectangular input") {
    const ModuleSpace s2 = scalar_space(2);
    const ModuleSpace s3 = scalar_space(3);
    const AdjointableOp rect(s2, s3, {Matrix::Random(3, 2)});
    CHECK_THROWS_AS(centered_report(rect, 4), NotSquare);
}

TEST_CASE("battery handles a multi-summand operator") {
    const AlgebraShape shape({1, 2});
    const ModuleSpace space(shape, 2);
    // Summand 0: 2x2 shift; summand 1: 4x4 diagonal. Both centered.
    Matrix b0 = Matrix::Zero(2, 2);
    b0(1, 0) = 1.0;
    Matrix b1 = Matrix::Zero(4, 4);
    b1.diagonal() << 1.0, 2.0, 0.5, 0.0;
    const CenteredReport report = centered_report(AdjointableOp(space, space, {b0, b1}), 5);
    CHECK(report.centered);
}
