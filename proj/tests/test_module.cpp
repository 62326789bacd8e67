#include <doctest.h>

#include <cmath>
#include <vector>

#include "modpolar/errors.hpp"
#include "modpolar/module.hpp"
#include "oracles.hpp"

using namespace modpolar;
using oracles::diag_op;
using oracles::make_matrix;
using oracles::max_entry_diff;
using oracles::naive_adjoint;
using oracles::naive_mul;
using oracles::scalar_op;
using oracles::scalar_space;
using oracles::scalar_vec;
using oracles::shift_op;

TEST_CASE("inner product on scalar modules") {
    const ModuleSpace space = scalar_space(2);
    const ModuleVector x = scalar_vec({1.0, 2.0});
    const ModuleVector y = scalar_vec({3.0, 4.0});

    CHECK(alg_norm(inner(x, ModuleVector::zero(space))) == 0.0);
    CHECK(alg_norm(inner(scalar_vec({1.0, 0.0}), scalar_vec({0.0, 1.0}))) == 0.0);
    CHECK(inner(x, y).blocks[0](0, 0).real() == doctest::Approx(11.0).epsilon(1e-15));

    CHECK_THROWS_AS(inner(x, scalar_vec({1.0, 2.0, 3.0})), ShapeMismatch);
}

TEST_CASE("inner product respects conjugation and module scaling") {
    const AlgebraShape shape({2});
    const ModuleSpace space(shape, 2);
    const Matrix x0 = make_matrix({{Complex(1.0, 1.0), Complex(0.0, 2.0)},
                                   {Complex(2.0, 0.0), Complex(1.0, -1.0)},
                                   {Complex(0.5, 0.0), Complex(0.0, 0.0)},
                                   {Complex(0.0, 1.0), Complex(3.0, 0.0)}});
    const Matrix y0 = make_matrix({{Complex(0.0, -1.0), Complex(1.0, 0.0)},
                                   {Complex(1.0, 1.0), Complex(0.0, 0.5)},
                                   {Complex(2.0, 0.0), Complex(0.0, -2.0)},
                                   {Complex(0.0, 0.0), Complex(1.0, 1.0)}});
    const ModuleVector x(space, {x0});
    const ModuleVector y(space, {y0});

    // <x,y> = sum_j x_j* y_j, evaluated here from the stacked blocks.
    const Matrix expected = naive_mul(naive_adjoint(x0.topRows(2)), y0.topRows(2)) +
                            naive_mul(naive_adjoint(x0.bottomRows(2)), y0.bottomRows(2));
    CHECK(max_entry_diff(inner(x, y).blocks[0], expected) < 1e-14);

    CHECK(alg_norm(alg_sub(alg_adjoint(inner(x, y)), inner(y, x))) < 1e-14);

    const AlgebraElement a(shape, {make_matrix({{Complex(1.0, 0.5), 2.0},
                                                {0.0, Complex(0.0, -1.0)}})});
    CHECK(alg_norm(alg_sub(inner(x, module_scale(y, a)), alg_mul(inner(x, y), a))) < 1e-13);

    CHECK(positivity_check(inner(x, x)).positive);
}

TEST_CASE("apply moves basis vectors the way the entry grid says") {
    const AdjointableOp t = scalar_op({{0.0, 0.0}, {1.0, 0.0}});
    const ModuleVector image = apply(t, scalar_vec({1.0, 0.0}));
    CHECK(image.blocks[0](0, 0) == Complex(0.0, 0.0));
    CHECK(image.blocks[0](1, 0) == Complex(1.0, 0.0));

    const ModuleVector x = scalar_vec({Complex(1.0, 2.0), Complex(-0.5, 0.0)});
    CHECK(vec_norm(vec_sub(apply(AdjointableOp::identity(x.space), x), x)) == 0.0);
    CHECK(vec_norm(apply(AdjointableOp::zero(x.space, x.space), x)) == 0.0);
}

TEST_CASE("composition and adjoint agree with the naive oracle") {
    const AlgebraShape shape({1, 2});
    const ModuleSpace d2(shape, 2);
    const ModuleSpace d3(shape, 3);

    std::vector<Matrix> a_blocks = {Matrix::Random(3, 2), Matrix::Random(6, 4)};
    std::vector<Matrix> b_blocks = {Matrix::Random(2, 3), Matrix::Random(4, 6)};
    const AdjointableOp a(d2, d3, a_blocks);
    const AdjointableOp b(d3, d2, b_blocks);

    const AdjointableOp ab = compose(a, b);
    CHECK(max_entry_diff(ab.blocks[0], naive_mul(a_blocks[0], b_blocks[0])) < 1e-14);
    CHECK(max_entry_diff(ab.blocks[1], naive_mul(a_blocks[1], b_blocks[1])) < 1e-14);

    const AdjointableOp a_star = op_adjoint(a);
    CHECK(max_entry_diff(a_star.blocks[1], naive_adjoint(a_blocks[1])) == 0.0);
    CHECK(max_entry_diff(op_adjoint(a_star), a) == 0.0);

    CHECK_THROWS_AS(compose(a, a), ShapeMismatch);
}

TEST_CASE("adjoint pairing on a rectangular operator") {
    const AlgebraShape shape({2});
    const ModuleSpace d2(shape, 2);
    const ModuleSpace d3(shape, 3);
    const AdjointableOp t(d2, d3, {Matrix::Random(6, 4)});
    const ModuleVector x(d2, {Matrix::Random(4, 2)});
    const ModuleVector y(d3, {Matrix::Random(6, 2)});
    const double scale = op_norm(t) * vec_norm(x) * vec_norm(y);
    CHECK(alg_norm(alg_sub(inner(apply(t, x), y), inner(x, apply(op_adjoint(t), y)))) <=
          1e-10 * scale);
}

TEST_CASE("operator norm golden values") {
    CHECK(op_norm(AdjointableOp::identity(ModuleSpace(AlgebraShape({1, 2}), 2))) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(op_norm(shift_op({1.0, 2.0})) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("flatten produces one matrix per summand and round-trips") {
    const ModuleSpace mixed(AlgebraShape({1, 2}), 2);
    AdjointableOp t = AdjointableOp::identity(mixed);
    t.blocks[1](2, 1) = Complex(0.5, -1.0);

    const std::vector<Matrix> flat = flatten(t);
    REQUIRE(flat.size() == 2);
    CHECK(flat[0].rows() == 2);
    CHECK(flat[0].cols() == 2);
    CHECK(flat[1].rows() == 4);
    CHECK(flat[1].cols() == 4);

    const AdjointableOp back = unflatten(t.domain, t.codomain, flat);
    CHECK(max_entry_diff(back, t) == 0.0);

    const std::vector<Matrix> id = flatten(AdjointableOp::identity(mixed));
    CHECK(max_entry_diff(id[1], Matrix(Matrix::Identity(4, 4))) == 0.0);
}

TEST_CASE("entry accessor reads the algebra-valued grid") {
    const ModuleSpace mixed(AlgebraShape({1, 2}), 2);
    AdjointableOp t = AdjointableOp::zero(mixed, mixed);
    t.blocks[1](2, 0) = Complex(7.0, 0.0);
    const AlgebraElement e = t.entry(1, 0);
    CHECK(e.blocks[1](0, 0) == Complex(7.0, 0.0));
    CHECK(e.blocks[0](0, 0) == Complex(0.0, 0.0));
}

TEST_CASE("range projection of simple operators") {
    const ModuleSpace s2 = scalar_space(2);
    CHECK(op_norm(range_projection(AdjointableOp::zero(s2, s2))) == 0.0);

    const Projection p = range_projection(diag_op({2.0, 0.0}));
    CHECK(max_entry_diff(p.blocks[0], make_matrix({{1.0, 0.0}, {0.0, 0.0}})) < 1e-14);

    const Projection q = range_projection(shift_op({1.0, 2.0}));
    CHECK(max_entry_diff(q.blocks[0], make_matrix({{0.0, 0.0, 0.0},
                                                   {0.0, 1.0, 0.0},
                                                   {0.0, 0.0, 1.0}})) < 1e-14);
    CHECK(is_projection(q));

    const AdjointableOp t = shift_op({1.0, 2.0});
    CHECK(op_norm(op_sub(compose(q, t), t)) <= 1e-8 * op_norm(t));
}

TEST_CASE("projection predicate rejects non-projections") {
    CHECK(is_projection(AdjointableOp::identity(scalar_space(2))));
    CHECK_FALSE(is_projection(diag_op({0.5, 0.0})));
    CHECK_FALSE(is_projection(scalar_op({{0.0, 1.0}, {0.0, 0.0}})));
}

TEST_CASE("resolvent iterate matches the closed form") {
    const AdjointableOp id = AdjointableOp::identity(scalar_space(1));
    CHECK(max_entry_diff(iterate_T_n(id, 1), op_scale(0.5, id)) < 1e-15);

    const ModuleSpace s2 = scalar_space(2);
    CHECK(op_norm(iterate_T_n(AdjointableOp::zero(s2, s2), 5)) == 0.0);

    const AdjointableOp t = diag_op({1.0, 0.5, 0.0});
    const AdjointableOp t10 = iterate_T_n(t, 10);
    CHECK(max_entry_diff(t10, diag_op({10.0 / 11.0, 10.0 / 12.0, 0.0})) < 1e-14);
    CHECK(op_norm(op_sub(t10, range_projection(t))) == doctest::Approx(2.0 / 12.0).epsilon(1e-12));

    const ModuleVector x = scalar_vec({1.0, 1.0, 1.0});
    const ModuleVector via_vec = iterate_range_projection(t, x, 10);
    CHECK(vec_norm(vec_sub(via_vec, apply(t10, x))) < 1e-14);

    CHECK_THROWS_AS(iterate_T_n(diag_op({1.0, -1.0}), 3), NotPositive);
}

TEST_CASE("iterate bounds hold for a non-diagonal positive operator") {
    const AdjointableOp g = scalar_op({{Complex(1.0, 0.0), Complex(0.5, 0.5)},
                                       {Complex(0.2, -0.1), Complex(0.8, 0.0)}});
    const AdjointableOp t = compose(op_adjoint(g), g);
    for (long n : {1L, 4L, 100L}) {
        const AdjointableOp tn = iterate_T_n(t, n);
        CHECK(op_norm(tn) <= 1.0 + 1e-12);
        CHECK(op_norm(op_sub(compose(tn, t), t)) <= 1.0 / static_cast<double>(n) + 1e-12);
    }
}

TEST_CASE("canonical probes span the module") {
    const ModuleSpace mixed(AlgebraShape({1, 2}), 2);
    const std::vector<ModuleVector> probes = canonical_probes(mixed);
    CHECK(probes.size() == 10); // rank * sum of squared block sizes
    for (const ModuleVector& p : probes) CHECK(vec_norm(p) == doctest::Approx(1.0));
}

TEST_CASE("probe convergence counts match the scalar formula") {
    const ModuleSpace s1 = scalar_space(1);
    const AdjointableOp id = AdjointableOp::identity(s1);

    // norm(T_n - I) = 1/(n+1): the strict threshold sits at n = 1000, and the
    // boundary comparison 1/1000 < 1e-3 is decided by last-bit rounding.
    const ConvergenceResult r1 =
        converge_range_projection(id, canonical_probes(s1), 1e-3);
    CHECK(r1.n_required >= 999);
    CHECK(r1.n_required <= 1000);
    CHECK(op_norm(op_sub(r1.projection, id)) < 1e-14);

    const ModuleSpace s2 = scalar_space(2);
    const ConvergenceResult r0 = converge_range_projection(
        AdjointableOp::zero(s2, s2), canonical_probes(s2), 1e-3);
    CHECK(r0.n_required == 1);
    CHECK(op_norm(r0.projection) == 0.0);

    // Smallest eigenvalue 1/100 forces n past 99 * 100, again up to the
    // boundary bit.
    const ConvergenceResult r2 = converge_range_projection(
        diag_op({1.0, 0.01}), canonical_probes(s2), 1e-2);
    CHECK(r2.n_required >= 9900);
    CHECK(r2.n_required <= 9901);
}

TEST_CASE("range projection is stable under positive powers") {
    const AdjointableOp t = diag_op({4.0, 0.0});
    CHECK(closure_range_power_check(t, 1.0));
    CHECK(closure_range_power_check(t, 0.5));
    CHECK(max_entry_diff(range_projection(op_power(t, 0.5)),
                         range_projection(t)) < 1e-14);

    const AdjointableOp g = scalar_op({{Complex(1.0, 0.2), Complex(0.0, 1.0), 0.5, 0.0},
                                       {Complex(0.3, 0.0), 2.0, 0.0, Complex(1.0, 1.0)},
                                       {0.0, 0.1, Complex(0.7, -0.3), 1.0},
                                       {1.0, 0.0, Complex(0.0, 0.4), 0.25}});
    const AdjointableOp pos = compose(op_adjoint(g), g);
    CHECK(closure_range_power_check(pos, 3.7));
    CHECK_THROWS_AS(closure_range_power_check(diag_op({1.0, -2.0}), 2.0), NotPositive);
}
