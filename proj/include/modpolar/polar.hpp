#pragma once

#include <vector>

#include "modpolar/module.hpp"

namespace modpolar {

// The polar decomposition T = U |T| of an adjointable operator. U is the
// partial isometry with initial projection p_rstar (onto the closure of the
// range of T*) and final projection p_r (onto the closure of the range of T);
// abs = (T*T)^(1/2) and abs_star = (TT*)^(1/2).
struct PolarFactors {
    AdjointableOp u;
    AdjointableOp abs;
    AdjointableOp abs_star;
    Projection p_rstar;
    Projection p_r;
};

struct PartialIsometryReport {
    bool is_partial_isometry = false;
    double idempotent_residual = 0.0;   // norm((U*U)^2 - U*U)
    double self_adjoint_residual = 0.0; // norm(U*U - (U*U)*)
    double triple_product_residual = 0.0; // norm(U U* U - U)
};

// Residuals of the defining equations and the identity bundle tying T, U,
// |T|, |T*| together. Absolute norms; `scale` is norm(T) and the projection
// residuals are compared without scaling (projections have norm at most one).
struct PolarIdentityReport {
    double scale = 0.0;
    double factorization = 0.0;        // norm(U|T| - T)
    double abs_star_conjugation = 0.0; // norm(|T*| - U|T|U*)
    double intertwine = 0.0;           // norm(U|T| - |T*|U)
    double adjoint_factorization = 0.0; // norm(T* - U*|T*|)
    double initial_projection = 0.0;   // norm(U*U - p_rstar)
    double final_projection = 0.0;     // norm(UU* - p_r)
    bool ok = false;
    double max_residual() const;
};

struct ExistenceReport {
    bool ranges_complemented = false; // both range projections are projections
    bool defining_equalities = false; // T = U|T| and U*U = p_rstar
    bool range_equalities = false;    // R(|T|) = R(T*) and R(|T*|) = R(T)
    double max_residual = 0.0;
};

struct AlphaIdentityReport {
    double scale = 0.0;          // norm(|T|^alpha)
    double conjugation = 0.0;    // norm(U|T|^a U* - |T*|^a)
    double intertwine = 0.0;     // norm(U|T|^a - |T*|^a U)
    double reverse_conjugation = 0.0; // norm(U*|T*|^a U - |T|^a)
    bool ok = false;
};

// (T*T)^(1/2) by spectral calculus on the flattened blocks.
AdjointableOp abs_op(const AdjointableOp& t);

// Polar decomposition per summand from the singular value decomposition:
// U = T . pinv(|T|) with the spectral pseudo-inverse cut at the numerical
// rank, so degenerate singular subspaces never introduce basis ambiguity.
PolarFactors polar_decompose(const AdjointableOp& t);

// Independent construction of the same U as the extrapolated limit of
// U_eps = T (T*T + eps I)^(-1/2) over a decreasing schedule. The inverse
// square roots come from a Denman-Beavers iteration and the limit from
// polynomial extrapolation at eps = 0, so no step shares the SVD machinery
// of polar_decompose. An empty schedule picks a geometric one per summand
// from the smallest retained singular value. Throws IllConditioned when a
// retained singular value sits within a factor ten of the rank cutoff (U_eps
// is discontinuous across rank changes, so no schedule can settle there).
PolarFactors polar_decompose_via_limit(const AdjointableOp& t,
                                       const std::vector<double>& schedule = {});

PartialIsometryReport verify_partial_isometry(const AdjointableOp& u,
                                              double tol = kResidualTol);

// Checks T = U|T|, |T*| = U|T|U*, U|T| = |T*|U, T* = U*|T*|, U*U = p_rstar,
// UU* = p_r; ok iff every residual is within tol relative to norm(T) (the
// projection residuals within tol absolutely).
PolarIdentityReport verify_polar_identities(const AdjointableOp& t,
                                            const PolarFactors& f,
                                            double tol = kResidualTol);

// Evaluates the three equivalent existence conditions (complemented ranges,
// the defining equalities, the range identities R(|T|) = R(T*) and
// R(|T*|) = R(T)) and requires them to agree; disagreement throws
// EquivalenceViolation since it can only come from a defect, not the math.
ExistenceReport check_existence_conditions(const AdjointableOp& t,
                                           double tol = kResidualTol);

// The power identities U|T|^a U* = |T*|^a, U|T|^a = |T*|^a U,
// U*|T*|^a U = |T|^a for alpha > 0.
AlphaIdentityReport alpha_intertwine_check(const PolarFactors& f, double alpha,
                                           double tol = kResidualTol);

// True iff T = W|T| and the kernel of T is contained in the kernel of W
// (tested as norm(W (I - p_rstar)) <= tol); W must be a partial isometry.
// A true verdict forces W to coincide with the canonical U, and the check
// asserts that it does.
bool criterion_check(const AdjointableOp& t, const AdjointableOp& w,
                     double tol = kResidualTol);

} // namespace modpolar
