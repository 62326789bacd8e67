#include "modpolar/algebra.hpp"

#include <cmath>
#include <utility>

#include "detail/dense.hpp"

namespace modpolar {

namespace {

void require_same_shape(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.shape != b.shape) {
        throw ShapeMismatch("algebra elements live over different shapes");
    }
}

} // namespace

AlgebraShape::AlgebraShape(std::vector<int> block_sizes)
    : sizes_(std::move(block_sizes)) {
    if (sizes_.empty()) {
        throw ShapeMismatch("algebra shape needs at least one summand");
    }
    for (int n : sizes_) {
        if (n < 1) throw ShapeMismatch("block sizes must be positive");
    }
}

int AlgebraShape::complex_dim() const {
    int dim = 0;
    for (int n : sizes_) dim += n * n;
    return dim;
}

AlgebraElement::AlgebraElement(AlgebraShape s, std::vector<Matrix> b)
    : shape(std::move(s)), blocks(std::move(b)) {
    if (static_cast<int>(blocks.size()) != shape.summands()) {
        throw ShapeMismatch("block count does not match shape");
    }
    for (int i = 0; i < shape.summands(); ++i) {
        const int n = shape.block_size(i);
        if (blocks[static_cast<std::size_t>(i)].rows() != n ||
            blocks[static_cast<std::size_t>(i)].cols() != n) {
            throw ShapeMismatch("block dimensions do not match shape");
        }
    }
}

AlgebraElement AlgebraElement::zero(const AlgebraShape& shape) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(shape.summands()));
    for (int i = 0; i < shape.summands(); ++i) {
        blocks.push_back(Matrix::Zero(shape.block_size(i), shape.block_size(i)));
    }
    return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement AlgebraElement::identity(const AlgebraShape& shape) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(shape.summands()));
    for (int i = 0; i < shape.summands(); ++i) {
        blocks.push_back(Matrix::Identity(shape.block_size(i), shape.block_size(i)));
    }
    return AlgebraElement(shape, std::move(blocks));
}

AlgebraElement alg_add(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_shape(a, b);
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        blocks.push_back(a.blocks[i] + b.blocks[i]);
    }
    return AlgebraElement(a.shape, std::move(blocks));
}

AlgebraElement alg_sub(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_shape(a, b);
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        blocks.push_back(a.blocks[i] - b.blocks[i]);
    }
    return AlgebraElement(a.shape, std::move(blocks));
}

AlgebraElement alg_mul(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_shape(a, b);
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        blocks.push_back(a.blocks[i] * b.blocks[i]);
    }
    return AlgebraElement(a.shape, std::move(blocks));
}

AlgebraElement alg_adjoint(const AlgebraElement& a) {
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) blocks.push_back(m.adjoint());
    return AlgebraElement(a.shape, std::move(blocks));
}

AlgebraElement alg_scale(Complex c, const AlgebraElement& a) {
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) blocks.push_back(c * m);
    return AlgebraElement(a.shape, std::move(blocks));
}

double alg_norm(const AlgebraElement& a) {
    double norm = 0.0;
    for (const Matrix& m : a.blocks) {
        norm = std::max(norm, detail::spectral_norm(m));
    }
    return norm;
}

AlgebraElement commutator(const AlgebraElement& a, const AlgebraElement& b) {
    return alg_sub(alg_mul(a, b), alg_mul(b, a));
}

Spectrum spectrum(const AlgebraElement& a) {
    const double scale = alg_norm(a);
    Spectrum spec;
    for (const Matrix& m : a.blocks) {
        auto solver = detail::hermitian_eigen(m, scale);
        for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
            spec.eigenvalues.push_back(solver.eigenvalues()(i));
        }
    }
    std::sort(spec.eigenvalues.begin(), spec.eigenvalues.end());
    return spec;
}

AlgebraElement functional_calculus(const AlgebraElement& a,
                                   const std::function<double(double)>& f) {
    const double scale = alg_norm(a);
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) {
        blocks.push_back(detail::apply_spectral(m, scale, f));
    }
    return AlgebraElement(a.shape, std::move(blocks));
}

AlgebraElement alg_power(const AlgebraElement& a, double alpha) {
    if (alpha <= 0.0) throw NonPositiveAlpha("power exponent must be positive");
    const double scale = alg_norm(a);
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (const Matrix& m : a.blocks) {
        blocks.push_back(detail::power_psd(m, scale, alpha));
    }
    return AlgebraElement(a.shape, std::move(blocks));
}

PositivityReport positivity_check(const AlgebraElement& a) {
    PositivityReport report;
    const double scale = alg_norm(a);

    double defect = 0.0;
    for (const Matrix& m : a.blocks) {
        defect = std::max(defect, detail::hermitian_defect(m));
    }
    report.hermitian_defect = defect;
    report.self_adjoint = defect <= kHermitianTol * std::max(scale, 1e-300);

    report.min_eigenvalue = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(detail::hermitize(a.blocks[i]));
        const double lo = solver.eigenvalues()(0);
        if (first || lo < report.min_eigenvalue) {
            report.min_eigenvalue = lo;
            report.witness_summand = static_cast<int>(i);
            report.witness_vector = solver.eigenvectors().col(0);
            first = false;
        }
    }

    const bool nonnegative =
        report.min_eigenvalue >= -kPositiveTol * std::max(scale, 1e-300);
    report.positive = report.self_adjoint && nonnegative;
    if (report.positive) {
        report.witness_summand = -1;
        report.witness_vector.resize(0);
    }
    return report;
}

} // namespace modpolar
