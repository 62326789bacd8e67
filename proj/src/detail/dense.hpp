#pragma once

// Internal dense-matrix helpers shared by the algebra, module, and polar
// translation units. Not installed; everything here works on one complex
// block at a time.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <functional>

#include "modpolar/errors.hpp"
#include "modpolar/tolerances.hpp"

namespace modpolar::detail {

using Matrix = Eigen::MatrixXcd;

inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

inline Matrix hermitize(const Matrix& m) {
    return 0.5 * (m + m.adjoint());
}

inline double hermitian_defect(const Matrix& m) {
    return spectral_norm(m - m.adjoint());
}

// Eigendecomposition of the symmetrized block; rejects inputs that drift
// from self-adjointness beyond the relative tolerance.
inline Eigen::SelfAdjointEigenSolver<Matrix>
hermitian_eigen(const Matrix& m, double scale) {
    if (hermitian_defect(m) > kHermitianTol * std::max(scale, 1e-300)) {
        throw NotSelfAdjoint("element is not self-adjoint within tolerance");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(m));
    if (solver.info() != Eigen::Success) {
        throw Error("hermitian eigendecomposition failed");
    }
    return solver;
}

inline Matrix apply_spectral(const Matrix& m, double scale,
                             const std::function<double(double)>& f) {
    auto solver = hermitian_eigen(m, scale);
    Eigen::VectorXd vals = solver.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
    return solver.eigenvectors() * vals.asDiagonal() *
           solver.eigenvectors().adjoint();
}

// t^alpha on a positive block. Slightly negative eigenvalues (relative to
// `scale`) are clamped to zero; genuinely negative ones throw NotPositive.
inline Matrix power_psd(const Matrix& m, double scale, double alpha) {
    auto solver = hermitian_eigen(m, scale);
    Eigen::VectorXd vals = solver.eigenvalues();
    const double floor = -kPositiveTol * std::max(scale, 1e-300);
    // Eigenvalues inside the numerical kernel band are rounding artifacts of
    // an exact zero; snap them before powering, because fractional exponents
    // would otherwise lift them across the rank cutoff (eps^0.5 is huge
    // relative to eps).
    const double kernel =
        rank_tolerance(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                       scale);
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < floor) {
            throw NotPositive("element has a negative eigenvalue beyond tolerance");
        }
        const double t = vals(i) < kernel ? 0.0 : vals(i);
        vals(i) = t == 0.0 ? 0.0 : std::pow(t, alpha);
    }
    return solver.eigenvectors() * vals.asDiagonal() *
           solver.eigenvectors().adjoint();
}

// SVD with a deterministic phase convention: each right singular vector is
// rotated so its largest-magnitude entry is real positive (the matching left
// vector absorbs the conjugate phase, leaving the product unchanged).
struct Svd {
    Matrix u;               // rows x r
    Eigen::VectorXd sigma;  // r = min(rows, cols), descending
    Matrix v;               // cols x r
};

inline Svd decompose_svd(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    for (Eigen::Index j = 0; j < out.v.cols(); ++j) {
        Eigen::Index imax = 0;
        out.v.col(j).cwiseAbs().maxCoeff(&imax);
        const std::complex<double> pivot = out.v(imax, j);
        if (std::abs(pivot) > 0.0) {
            const std::complex<double> phase = pivot / std::abs(pivot);
            out.v.col(j) *= std::conj(phase);
            out.u.col(j) *= std::conj(phase);
        }
    }
    return out;
}

inline double rank_cutoff(const Matrix& m, const Svd& svd) {
    const double sigma_max = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
    return rank_tolerance(static_cast<int>(m.rows()),
                          static_cast<int>(m.cols()), sigma_max);
}

} // namespace modpolar::detail
