#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

#include "modpolar/errors.hpp"
#include "modpolar/tolerances.hpp"

namespace modpolar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// A finite-dimensional C*-algebra: the direct sum of full complex matrix
// algebras with the given block sizes, one summand per entry.
class AlgebraShape {
public:
    explicit AlgebraShape(std::vector<int> block_sizes);

    int summands() const { return static_cast<int>(sizes_.size()); }
    int block_size(int i) const { return sizes_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& block_sizes() const { return sizes_; }

    // Dimension as a complex vector space: sum of n_i^2.
    int complex_dim() const;

    bool operator==(const AlgebraShape& other) const { return sizes_ == other.sizes_; }
    bool operator!=(const AlgebraShape& other) const { return !(*this == other); }

private:
    std::vector<int> sizes_;
};

// An element of the algebra: one n_i x n_i complex block per summand.
struct AlgebraElement {
    AlgebraShape shape;
    std::vector<Matrix> blocks;

    AlgebraElement(AlgebraShape s, std::vector<Matrix> b);

    static AlgebraElement zero(const AlgebraShape& shape);
    static AlgebraElement identity(const AlgebraShape& shape);
};

// Eigenvalues of a self-adjoint element, all summands pooled, sorted
// ascending. They lie in [-norm(a), norm(a)].
struct Spectrum {
    std::vector<double> eigenvalues;
};

struct PositivityReport {
    bool positive = false;
    bool self_adjoint = false;
    double hermitian_defect = 0.0; // norm(a - a*)
    double min_eigenvalue = 0.0;
    // Witness of failure: the summand and eigenvector of the most negative
    // eigenvalue (empty when positive).
    int witness_summand = -1;
    Eigen::VectorXcd witness_vector;
};

AlgebraElement alg_add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement alg_sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement alg_mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement alg_adjoint(const AlgebraElement& a);
AlgebraElement alg_scale(Complex c, const AlgebraElement& a);

// Induced C*-norm: max over summands of the spectral 2-norm.
double alg_norm(const AlgebraElement& a);

// [a, b] = ab - ba.
AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b);

// Spectrum of a self-adjoint element (throws NotSelfAdjoint otherwise).
Spectrum spectrum(const AlgebraElement& a);

// Continuous functional calculus for a self-adjoint element: symmetrize,
// eigendecompose each block, apply f on the eigenvalues. Requires
// norm(a - a*) <= kHermitianTol * norm(a).
AlgebraElement functional_calculus(const AlgebraElement& a,
                                   const std::function<double(double)>& f);

// t^alpha calculus for a positive element, alpha > 0. Eigenvalues in
// [-kPositiveTol * norm(a), 0) are clamped to zero; anything lower throws
// NotPositive.
AlgebraElement alg_power(const AlgebraElement& a, double alpha);

// Self-adjointness plus nonnegative spectrum, with a witness when it fails.
PositivityReport positivity_check(const AlgebraElement& a);

// Arithmetic sugar used throughout the operator identities.
inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) { return alg_add(a, b); }
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return alg_sub(a, b); }
inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) { return alg_mul(a, b); }
inline AlgebraElement operator*(Complex c, const AlgebraElement& a) { return alg_scale(c, a); }
inline AlgebraElement adj(const AlgebraElement& a) { return alg_adjoint(a); }

} // namespace modpolar
