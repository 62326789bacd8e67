#include "modpolar/module.hpp"

#include <cmath>
#include <utility>

#include "detail/dense.hpp"

namespace modpolar {

namespace {

void require_same_space(const ModuleSpace& a, const ModuleSpace& b,
                        const char* what) {
    if (a != b) throw ShapeMismatch(what);
}

void require_square(const AdjointableOp& t) {
    if (!t.square()) throw NotSquare("operator is not square");
}

// (I/n + T)^{-1} T per block, positivity already checked by the caller.
std::vector<Matrix> iterate_blocks(const AdjointableOp& t, long n) {
    std::vector<Matrix> out;
    out.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) {
        const Matrix shifted =
            detail::hermitize(b) +
            (1.0 / static_cast<double>(n)) * Matrix::Identity(b.rows(), b.cols());
        out.push_back(shifted.llt().solve(b));
    }
    return out;
}

} // namespace

ModuleSpace::ModuleSpace(AlgebraShape s, int k) : shape(std::move(s)), rank(k) {
    if (rank < 1) throw ShapeMismatch("module rank must be at least one");
}

ModuleVector::ModuleVector(ModuleSpace s, std::vector<Matrix> b)
    : space(std::move(s)), blocks(std::move(b)) {
    if (static_cast<int>(blocks.size()) != space.shape.summands()) {
        throw ShapeMismatch("vector block count does not match the algebra");
    }
    for (int i = 0; i < space.shape.summands(); ++i) {
        const int n = space.shape.block_size(i);
        const Matrix& blk = blocks[static_cast<std::size_t>(i)];
        if (blk.rows() != static_cast<Eigen::Index>(space.rank) * n ||
            blk.cols() != n) {
            throw ShapeMismatch("vector block has the wrong dimensions");
        }
    }
}

ModuleVector ModuleVector::zero(const ModuleSpace& space) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(space.shape.summands()));
    for (int i = 0; i < space.shape.summands(); ++i) {
        const int n = space.shape.block_size(i);
        blocks.push_back(Matrix::Zero(static_cast<Eigen::Index>(space.rank) * n, n));
    }
    return ModuleVector(space, std::move(blocks));
}

ModuleVector ModuleVector::from_entries(const ModuleSpace& space,
                                        const std::vector<AlgebraElement>& entries) {
    if (static_cast<int>(entries.size()) != space.rank) {
        throw ShapeMismatch("entry count does not match the module rank");
    }
    ModuleVector out = zero(space);
    for (int j = 0; j < space.rank; ++j) {
        const AlgebraElement& e = entries[static_cast<std::size_t>(j)];
        if (e.shape != space.shape) {
            throw ShapeMismatch("entry shape does not match the module algebra");
        }
        for (int i = 0; i < space.shape.summands(); ++i) {
            const int n = space.shape.block_size(i);
            out.blocks[static_cast<std::size_t>(i)].block(j * n, 0, n, n) =
                e.blocks[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

AlgebraElement ModuleVector::entry(int j) const {
    if (j < 0 || j >= space.rank) throw ShapeMismatch("entry index out of range");
    std::vector<Matrix> blocks;
    blocks.reserve(this->blocks.size());
    for (int i = 0; i < space.shape.summands(); ++i) {
        const int n = space.shape.block_size(i);
        blocks.push_back(this->blocks[static_cast<std::size_t>(i)].block(j * n, 0, n, n));
    }
    return AlgebraElement(space.shape, std::move(blocks));
}

AdjointableOp::AdjointableOp(ModuleSpace dom, ModuleSpace cod, std::vector<Matrix> b)
    : domain(std::move(dom)), codomain(std::move(cod)), blocks(std::move(b)) {
    if (domain.shape != codomain.shape) {
        throw ShapeMismatch("domain and codomain live over different algebras");
    }
    if (static_cast<int>(blocks.size()) != domain.shape.summands()) {
        throw ShapeMismatch("operator block count does not match the algebra");
    }
    for (int i = 0; i < domain.shape.summands(); ++i) {
        const int n = domain.shape.block_size(i);
        const Matrix& blk = blocks[static_cast<std::size_t>(i)];
        if (blk.rows() != static_cast<Eigen::Index>(codomain.rank) * n ||
            blk.cols() != static_cast<Eigen::Index>(domain.rank) * n) {
            throw ShapeMismatch("operator block has the wrong dimensions");
        }
    }
}

AdjointableOp AdjointableOp::zero(const ModuleSpace& domain,
                                  const ModuleSpace& codomain) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(domain.shape.summands()));
    for (int i = 0; i < domain.shape.summands(); ++i) {
        const int n = domain.shape.block_size(i);
        blocks.push_back(Matrix::Zero(static_cast<Eigen::Index>(codomain.rank) * n,
                                      static_cast<Eigen::Index>(domain.rank) * n));
    }
    return AdjointableOp(domain, codomain, std::move(blocks));
}

AdjointableOp AdjointableOp::identity(const ModuleSpace& space) {
    std::vector<Matrix> blocks;
    blocks.reserve(static_cast<std::size_t>(space.shape.summands()));
    for (int i = 0; i < space.shape.summands(); ++i) {
        const Eigen::Index d =
            static_cast<Eigen::Index>(space.rank) * space.shape.block_size(i);
        blocks.push_back(Matrix::Identity(d, d));
    }
    return AdjointableOp(space, space, std::move(blocks));
}

AdjointableOp AdjointableOp::from_entries(
    const ModuleSpace& domain, const ModuleSpace& codomain,
    const std::vector<std::vector<AlgebraElement>>& entries) {
    if (static_cast<int>(entries.size()) != codomain.rank) {
        throw ShapeMismatch("entry row count does not match the codomain rank");
    }
    AdjointableOp out = zero(domain, codomain);
    for (int p = 0; p < codomain.rank; ++p) {
        const auto& row = entries[static_cast<std::size_t>(p)];
        if (static_cast<int>(row.size()) != domain.rank) {
            throw ShapeMismatch("entry column count does not match the domain rank");
        }
        for (int q = 0; q < domain.rank; ++q) {
            const AlgebraElement& e = row[static_cast<std::size_t>(q)];
            if (e.shape != domain.shape) {
                throw ShapeMismatch("entry shape does not match the module algebra");
            }
            for (int i = 0; i < domain.shape.summands(); ++i) {
                const int n = domain.shape.block_size(i);
                out.blocks[static_cast<std::size_t>(i)].block(p * n, q * n, n, n) =
                    e.blocks[static_cast<std::size_t>(i)];
            }
        }
    }
    return out;
}

AlgebraElement AdjointableOp::entry(int p, int q) const {
    if (p < 0 || p >= codomain.rank || q < 0 || q >= domain.rank) {
        throw ShapeMismatch("entry index out of range");
    }
    std::vector<Matrix> blocks;
    blocks.reserve(this->blocks.size());
    for (int i = 0; i < domain.shape.summands(); ++i) {
        const int n = domain.shape.block_size(i);
        blocks.push_back(
            this->blocks[static_cast<std::size_t>(i)].block(p * n, q * n, n, n));
    }
    return AlgebraElement(domain.shape, std::move(blocks));
}

// --- vectors ---------------------------------------------------------------

AlgebraElement inner(const ModuleVector& x, const ModuleVector& y) {
    require_same_space(x.space, y.space, "inner product needs one module");
    std::vector<Matrix> blocks;
    blocks.reserve(x.blocks.size());
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        blocks.push_back(x.blocks[i].adjoint() * y.blocks[i]);
    }
    return AlgebraElement(x.space.shape, std::move(blocks));
}

double vec_norm(const ModuleVector& x) {
    double best = 0.0;
    for (const Matrix& b : x.blocks) {
        best = std::max(best, detail::spectral_norm(b));
    }
    return best;
}

ModuleVector vec_add(const ModuleVector& x, const ModuleVector& y) {
    require_same_space(x.space, y.space, "vector sum needs one module");
    std::vector<Matrix> blocks;
    blocks.reserve(x.blocks.size());
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        blocks.push_back(x.blocks[i] + y.blocks[i]);
    }
    return ModuleVector(x.space, std::move(blocks));
}

ModuleVector vec_sub(const ModuleVector& x, const ModuleVector& y) {
    require_same_space(x.space, y.space, "vector difference needs one module");
    std::vector<Matrix> blocks;
    blocks.reserve(x.blocks.size());
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        blocks.push_back(x.blocks[i] - y.blocks[i]);
    }
    return ModuleVector(x.space, std::move(blocks));
}

ModuleVector vec_scale(Complex c, const ModuleVector& x) {
    std::vector<Matrix> blocks;
    blocks.reserve(x.blocks.size());
    for (const Matrix& b : x.blocks) blocks.push_back(c * b);
    return ModuleVector(x.space, std::move(blocks));
}

ModuleVector module_scale(const ModuleVector& x, const AlgebraElement& a) {
    if (a.shape != x.space.shape) {
        throw ShapeMismatch("module action needs a matching algebra element");
    }
    std::vector<Matrix> blocks;
    blocks.reserve(x.blocks.size());
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        blocks.push_back(x.blocks[i] * a.blocks[i]);
    }
    return ModuleVector(x.space, std::move(blocks));
}

std::vector<ModuleVector> canonical_probes(const ModuleSpace& space) {
    std::vector<ModuleVector> probes;
    for (int j = 0; j < space.rank; ++j) {
        for (int i = 0; i < space.shape.summands(); ++i) {
            const int n = space.shape.block_size(i);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    ModuleVector probe = ModuleVector::zero(space);
                    probe.blocks[static_cast<std::size_t>(i)](j * n + r, c) = 1.0;
                    probes.push_back(std::move(probe));
                }
            }
        }
    }
    return probes;
}

// --- operators ---------------------------------------------------------------

ModuleVector apply(const AdjointableOp& t, const ModuleVector& x) {
    require_same_space(t.domain, x.space, "operator domain does not match the vector");
    std::vector<Matrix> blocks;
    blocks.reserve(t.blocks.size());
    for (std::size_t i = 0; i < t.blocks.size(); ++i) {
        blocks.push_back(t.blocks[i] * x.blocks[i]);
    }
    return ModuleVector(t.codomain, std::move(blocks));
}

AdjointableOp compose(const AdjointableOp& a, const AdjointableOp& b) {
    require_same_space(a.domain, b.codomain, "composition domains do not chain");
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        blocks.push_back(a.blocks[i] * b.blocks[i]);
    }
    return AdjointableOp(b.domain, a.codomain, std::move(blocks));
}

AdjointableOp op_adjoint(const AdjointableOp& t) {
    std::vector<Matrix> blocks;
    blocks.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) blocks.push_back(b.adjoint());
    return AdjointableOp(t.codomain, t.domain, std::move(blocks));
}

AdjointableOp op_add(const AdjointableOp& a, const AdjointableOp& b) {
    require_same_space(a.domain, b.domain, "operator sum needs matching domains");
    require_same_space(a.codomain, b.codomain, "operator sum needs matching codomains");
    std::vector<Matrix> blocks;
    blocks.reserve(a.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        blocks.push_back(a.blocks[i] + b.blocks[i]);
    }
    return AdjointableOp(a.domain, a.codomain, std::move(blocks));
}

AdjointableOp op_sub(const AdjointableOp& a, const AdjointableOp& b) {
    return op_add(a, op_scale(-1.0, b));
}

AdjointableOp op_scale(Complex c, const AdjointableOp& t) {
    std::vector<Matrix> blocks;
    blocks.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) blocks.push_back(c * b);
    return AdjointableOp(t.domain, t.codomain, std::move(blocks));
}

AdjointableOp op_commutator(const AdjointableOp& a, const AdjointableOp& b) {
    return op_sub(compose(a, b), compose(b, a));
}

double op_norm(const AdjointableOp& t) {
    double best = 0.0;
    for (const Matrix& b : t.blocks) {
        best = std::max(best, detail::spectral_norm(b));
    }
    return best;
}

AdjointableOp op_pow_int(const AdjointableOp& t, int n) {
    require_square(t);
    if (n < 0) throw InvalidSpec("integer power wants a nonnegative exponent");
    AdjointableOp acc = AdjointableOp::identity(t.domain);
    for (int i = 0; i < n; ++i) acc = compose(acc, t);
    return acc;
}

AdjointableOp op_power(const AdjointableOp& t, double alpha) {
    require_square(t);
    if (alpha <= 0.0) throw NonPositiveAlpha("power exponent must be positive");
    const double scale = op_norm(t);
    std::vector<Matrix> blocks;
    blocks.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) {
        blocks.push_back(detail::power_psd(b, scale, alpha));
    }
    return AdjointableOp(t.domain, t.codomain, std::move(blocks));
}

std::vector<Matrix> flatten(const AdjointableOp& t) { return t.blocks; }

AdjointableOp unflatten(const ModuleSpace& domain, const ModuleSpace& codomain,
                        std::vector<Matrix> blocks) {
    return AdjointableOp(domain, codomain, std::move(blocks));
}

bool is_projection(const AdjointableOp& p, double tol) {
    if (!p.square()) return false;
    return op_norm(op_sub(p, op_adjoint(p))) <= tol &&
           op_norm(op_sub(compose(p, p), p)) <= tol;
}

double require_positive(const AdjointableOp& t) {
    require_square(t);
    const double scale = op_norm(t);
    const double guard = std::max(scale, 1e-300);
    for (const Matrix& b : t.blocks) {
        if (detail::hermitian_defect(b) > kHermitianTol * guard) {
            throw NotSelfAdjoint("operator is not self-adjoint within tolerance");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(detail::hermitize(b));
        if (solver.eigenvalues().size() > 0 &&
            solver.eigenvalues()(0) < -kPositiveTol * guard) {
            throw NotPositive("operator has a negative eigenvalue beyond tolerance");
        }
    }
    return scale;
}

Projection range_projection(const AdjointableOp& t) {
    std::vector<Matrix> blocks;
    blocks.reserve(t.blocks.size());
    for (const Matrix& b : t.blocks) {
        const detail::Svd svd = detail::decompose_svd(b);
        const double cutoff = detail::rank_cutoff(b, svd);
        Matrix p = Matrix::Zero(b.rows(), b.rows());
        for (Eigen::Index j = 0; j < svd.sigma.size(); ++j) {
            if (svd.sigma(j) > cutoff) {
                p += svd.u.col(j) * svd.u.col(j).adjoint();
            }
        }
        blocks.push_back(std::move(p));
    }
    return Projection(t.codomain, t.codomain, std::move(blocks));
}

AdjointableOp iterate_T_n(const AdjointableOp& t, long n) {
    if (n < 1) throw InvalidSpec("iteration index must be at least one");
    require_positive(t);
    return AdjointableOp(t.domain, t.codomain, iterate_blocks(t, n));
}

ModuleVector iterate_range_projection(const AdjointableOp& t,
                                      const ModuleVector& x, long n) {
    return apply(iterate_T_n(t, n), x);
}

ConvergenceResult converge_range_projection(const AdjointableOp& t,
                                            const std::vector<ModuleVector>& probes,
                                            double eps,
                                            long n_cap) {
    require_positive(t);
    if (eps <= 0.0) throw InvalidSpec("convergence tolerance must be positive");
    for (const ModuleVector& x : probes) {
        require_same_space(x.space, t.domain, "probe lives outside the domain");
    }
    const Projection p = range_projection(t);

    const auto within = [&](long n) {
        const AdjointableOp tn(t.domain, t.codomain, iterate_blocks(t, n));
        for (const ModuleVector& x : probes) {
            if (vec_norm(vec_sub(apply(tn, x), apply(p, x))) >= eps) return false;
        }
        return true;
    };

    long lo = 0; // largest n known to fail (0 = none tried)
    long hi = 1;
    while (!within(hi)) {
        lo = hi;
        if (hi >= n_cap) {
            throw NoConvergence("range projection iteration did not reach the "
                                "tolerance by the iteration cap");
        }
        hi = (hi > n_cap / 2) ? n_cap : 2 * hi;
    }
    // The probe error is nonincreasing in n, so the threshold n is the unique
    // crossing point in (lo, hi].
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (within(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return ConvergenceResult{p, hi};
}

bool closure_range_power_check(const AdjointableOp& t, double alpha, double tol) {
    require_positive(t);
    const Projection base = range_projection(t);
    const Projection powered = range_projection(op_power(t, alpha));
    return op_norm(op_sub(base, powered)) <= tol;
}

} // namespace modpolar
