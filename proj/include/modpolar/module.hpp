#pragma once

#include <vector>

#include "modpolar/algebra.hpp"

namespace modpolar {

// The free right module over the algebra: rank-many algebra entries with the
// algebra-valued inner product <x, y> = sum_j x_j* y_j.
struct ModuleSpace {
    AlgebraShape shape;
    int rank;

    ModuleSpace(AlgebraShape s, int k);

    bool operator==(const ModuleSpace& other) const {
        return shape == other.shape && rank == other.rank;
    }
    bool operator!=(const ModuleSpace& other) const { return !(*this == other); }
};

// A module vector, stored per summand as the (rank * n_i) x n_i stack of its
// algebra entries.
struct ModuleVector {
    ModuleSpace space;
    std::vector<Matrix> blocks;

    ModuleVector(ModuleSpace s, std::vector<Matrix> b);

    static ModuleVector zero(const ModuleSpace& space);
    static ModuleVector from_entries(const ModuleSpace& space,
                                     const std::vector<AlgebraElement>& entries);
    AlgebraElement entry(int j) const;
};

// An adjointable operator between free modules over the same algebra. Stored
// per summand as the (m * n_i) x (k * n_i) complex matrix acting on stacked
// vectors; entry (p, q) of the matrix over the algebra is the corresponding
// n_i x n_i sub-block in every summand.
struct AdjointableOp {
    ModuleSpace domain;
    ModuleSpace codomain;
    std::vector<Matrix> blocks;

    AdjointableOp(ModuleSpace dom, ModuleSpace cod, std::vector<Matrix> b);

    static AdjointableOp zero(const ModuleSpace& domain, const ModuleSpace& codomain);
    static AdjointableOp identity(const ModuleSpace& space);
    // Build from the codomain_rank x domain_rank grid of algebra entries.
    static AdjointableOp from_entries(
        const ModuleSpace& domain, const ModuleSpace& codomain,
        const std::vector<std::vector<AlgebraElement>>& entries);

    AlgebraElement entry(int p, int q) const;
    bool square() const { return domain == codomain; }
};

// Projections are ordinary operators with domain == codomain satisfying
// P = P* = P^2; construction sites guarantee the invariants and
// is_projection() checks them.
using Projection = AdjointableOp;

struct ConvergenceResult {
    Projection projection;
    long n_required;
};

// --- vectors ---------------------------------------------------------------

AlgebraElement inner(const ModuleVector& x, const ModuleVector& y);
double vec_norm(const ModuleVector& x); // sqrt(norm(<x, x>))

ModuleVector vec_add(const ModuleVector& x, const ModuleVector& y);
ModuleVector vec_sub(const ModuleVector& x, const ModuleVector& y);
ModuleVector vec_scale(Complex c, const ModuleVector& x);
// Right module action x . a.
ModuleVector module_scale(const ModuleVector& x, const AlgebraElement& a);

// The k * sum(n_i^2) canonical basis vectors of the module as a complex
// vector space (a single 1 in one complex slot). Spanning probe set for
// pointwise convergence checks.
std::vector<ModuleVector> canonical_probes(const ModuleSpace& space);

// --- operators ---------------------------------------------------------------

ModuleVector apply(const AdjointableOp& t, const ModuleVector& x);

AdjointableOp compose(const AdjointableOp& a, const AdjointableOp& b); // a after b
AdjointableOp op_adjoint(const AdjointableOp& t);
AdjointableOp op_add(const AdjointableOp& a, const AdjointableOp& b);
AdjointableOp op_sub(const AdjointableOp& a, const AdjointableOp& b);
AdjointableOp op_scale(Complex c, const AdjointableOp& t);
AdjointableOp op_commutator(const AdjointableOp& a, const AdjointableOp& b);
double op_norm(const AdjointableOp& t);

// Integer power (square operators), n >= 0; n = 0 gives the identity.
AdjointableOp op_pow_int(const AdjointableOp& t, int n);

// t^alpha spectral calculus for a positive square operator, alpha > 0.
AdjointableOp op_power(const AdjointableOp& t, double alpha);

// Per-summand complex matrices of the operator and the inverse build.
std::vector<Matrix> flatten(const AdjointableOp& t);
AdjointableOp unflatten(const ModuleSpace& domain, const ModuleSpace& codomain,
                        std::vector<Matrix> blocks);

bool is_projection(const AdjointableOp& p, double tol = kProjectionTol);

// Throws NotSquare / NotPositive unless t is square and positive within
// tolerance; returns norm(t) for reuse.
double require_positive(const AdjointableOp& t);

// Orthogonal projection onto the column space (the closure of the range is
// the column space in finite dimension): per summand, the sum of u u* over
// singular triplets above the rank cutoff.
Projection range_projection(const AdjointableOp& t);

// The regularized iterate (I/n + T)^{-1} T of a positive operator; bounded by
// one in norm and within 1/n of T on its range.
AdjointableOp iterate_T_n(const AdjointableOp& t, long n);
ModuleVector iterate_range_projection(const AdjointableOp& t,
                                      const ModuleVector& x, long n);

// Smallest n at which every probe satisfies |T_n x - P x| < eps, found by
// doubling then bisection (the probe error is nonincreasing in n). Throws
// NoConvergence past n_cap: a positive eigenvalue sits below the rank cutoff.
ConvergenceResult converge_range_projection(const AdjointableOp& t,
                                            const std::vector<ModuleVector>& probes,
                                            double eps,
                                            long n_cap = kConvergenceCap);

// Whether range_projection(t^alpha) equals range_projection(t) within the
// residual tolerance; true for every positive operator and alpha > 0.
bool closure_range_power_check(const AdjointableOp& t, double alpha,
                               double tol = kResidualTol);

inline AdjointableOp operator+(const AdjointableOp& a, const AdjointableOp& b) { return op_add(a, b); }
inline AdjointableOp operator-(const AdjointableOp& a, const AdjointableOp& b) { return op_sub(a, b); }
inline AdjointableOp operator*(const AdjointableOp& a, const AdjointableOp& b) { return compose(a, b); }
inline AdjointableOp operator*(Complex c, const AdjointableOp& t) { return op_scale(c, t); }
inline AdjointableOp adj(const AdjointableOp& t) { return op_adjoint(t); }

} // namespace modpolar
