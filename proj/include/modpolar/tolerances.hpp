#pragma once

#include <algorithm>
#include <limits>

namespace modpolar {

// Relative tolerance below which a drifted element still counts as
// self-adjoint and gets symmetrized before spectral calculus.
inline constexpr double kHermitianTol = 1e-10;

// Relative tolerance on the most negative eigenvalue of a nominally positive
// element; eigenvalues above -kPositiveTol * norm are clamped to zero.
inline constexpr double kPositiveTol = 1e-10;

// Global residual tolerance for operator identities. The CLI may override it
// at runtime via MODPOLAR_TOL; the library default stays fixed.
inline constexpr double kResidualTol = 1e-8;

// Relative tolerance for commutators, measured against the product of the
// operand norms (family members scale like powers of the operator norm).
inline constexpr double kCommutatorTol = 1e-8;

// Idempotency / self-adjointness tolerance for projections.
inline constexpr double kProjectionTol = 1e-10;

// Agreement tolerance between the truncation and regularized-limit
// constructions of the polar isometry.
inline constexpr double kLimitAgreementTol = 1e-6;

// A partial isometry must vanish when U^k reaches this norm for the
// exactness flag of a centered report.
inline constexpr double kNilpotencyTol = 1e-12;

// Cap on the projection-iteration index before NoConvergence is raised.
inline constexpr long kConvergenceCap = 1'000'000;

// Singular values at or below this cutoff are treated as null directions.
// This is the single most consequential numeric decision in the library and
// is centralized here: the standard numerical-rank rule.
inline double rank_tolerance(int rows, int cols, double sigma_max) {
    const double eps = std::numeric_limits<double>::epsilon();
    return static_cast<double>(std::max(rows, cols)) * eps * sigma_max;
}

} // namespace modpolar
