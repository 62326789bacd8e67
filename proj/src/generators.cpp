#include "modpolar/generators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "modpolar/centered.hpp"
#include "detail/dense.hpp"

namespace modpolar {

namespace {

constexpr double kPi = 3.14159265358979323846;

Matrix random_matrix(SplitMix64& rng, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = rng.uniform_pm1();
            const double im = rng.uniform_pm1();
            m(r, c) = Complex(re, im);
        }
    }
    return m;
}

// Seeded unitary: QR of a random complex matrix with the column phases fixed
// by the signs of the triangular factor's diagonal.
Matrix random_unitary(SplitMix64& rng, Eigen::Index d) {
    const Matrix g = random_matrix(rng, d, d);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Eigen::Index j = 0; j < d; ++j) {
        const Complex pivot = r(j, j);
        if (std::abs(pivot) > 0.0) q.col(j) *= pivot / std::abs(pivot);
    }
    return q;
}

void require_square_kind(const GeneratorSpec& spec) {
    if (spec.domain_rank != spec.codomain_rank) {
        throw InvalidSpec("this generator kind produces square operators only");
    }
}

std::vector<int> flattened_dims(const GeneratorSpec& spec) {
    std::vector<int> dims;
    for (int i = 0; i < spec.shape.summands(); ++i) {
        dims.push_back(spec.domain_rank * spec.shape.block_size(i));
    }
    return dims;
}

// Provided eigenvalue for slot j (cycled), or none when the list is empty.
const Complex* provided_eigenvalue(const GeneratorSpec& spec, int j) {
    if (spec.eigenvalues.empty()) return nullptr;
    return &spec.eigenvalues[static_cast<std::size_t>(j) % spec.eigenvalues.size()];
}

using EigenvalueSource = std::function<Complex(const Complex*, SplitMix64&)>;

AdjointableOp diagonalizable(const GeneratorSpec& spec,
                             const EigenvalueSource& eigenvalue) {
    require_square_kind(spec);
    SplitMix64 rng(spec.seed);
    const ModuleSpace space(spec.shape, spec.domain_rank);
    std::vector<Matrix> blocks;
    for (int d : flattened_dims(spec)) {
        Eigen::VectorXcd lambda(d);
        for (int j = 0; j < d; ++j) {
            lambda(j) = eigenvalue(provided_eigenvalue(spec, j), rng);
        }
        if (spec.diagonal) {
            blocks.push_back(Matrix(lambda.asDiagonal()));
        } else {
            const Matrix v = random_unitary(rng, d);
            blocks.push_back(v * lambda.asDiagonal() * v.adjoint());
        }
    }
    return AdjointableOp(space, space, std::move(blocks));
}

AdjointableOp make_weighted_shift(const GeneratorSpec& spec) {
    require_square_kind(spec);
    const int k = spec.domain_rank;
    if (static_cast<int>(spec.weights.size()) != k - 1) {
        throw InvalidSpec("a weighted shift on rank k needs k - 1 weights");
    }
    for (double w : spec.weights) {
        if (!(w > 0.0)) throw InvalidSpec("shift weights must be strictly positive");
    }
    const ModuleSpace space(spec.shape, k);
    std::vector<std::vector<AlgebraElement>> entries(
        static_cast<std::size_t>(k),
        std::vector<AlgebraElement>(static_cast<std::size_t>(k),
                                    AlgebraElement::zero(spec.shape)));
    for (int i = 0; i + 1 < k; ++i) {
        AlgebraElement unit = AlgebraElement::identity(spec.shape);
        entries[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(i)] =
            alg_scale(spec.weights[static_cast<std::size_t>(i)], unit);
    }
    return AdjointableOp::from_entries(space, space, entries);
}

AdjointableOp make_jordan(const GeneratorSpec& spec) {
    require_square_kind(spec);
    SplitMix64 rng(spec.seed);
    const ModuleSpace space(spec.shape, spec.domain_rank);
    std::vector<Matrix> blocks;
    for (int d : flattened_dims(spec)) {
        if (d < 2) {
            throw InvalidSpec("the Jordan kind needs flattened dimension at least two");
        }
        // Modulus in [0.8, 1.5]: keeps the block non-normal with a healthy
        // commutation defect and its singular values off the rank cutoff.
        const double modulus = 0.8 + 0.7 * rng.uniform01();
        const double angle = 2.0 * kPi * rng.uniform01();
        const Complex lambda = modulus * Complex(std::cos(angle), std::sin(angle));
        Matrix j = Matrix::Zero(d, d);
        for (int r = 0; r < d; ++r) {
            j(r, r) = lambda;
            if (r + 1 < d) j(r, r + 1) = 1.0;
        }
        blocks.push_back(std::move(j));
    }
    return AdjointableOp(space, space, std::move(blocks));
}

AdjointableOp make_scalar_dense(const GeneratorSpec& spec) {
    SplitMix64 rng(spec.seed);
    const ModuleSpace domain(spec.shape, spec.domain_rank);
    const ModuleSpace codomain(spec.shape, spec.codomain_rank);
    const Matrix pattern =
        random_matrix(rng, spec.codomain_rank, spec.domain_rank);
    std::vector<Matrix> blocks;
    for (int i = 0; i < spec.shape.summands(); ++i) {
        const int n = spec.shape.block_size(i);
        Matrix b = Matrix::Zero(spec.codomain_rank * n, spec.domain_rank * n);
        for (int p = 0; p < spec.codomain_rank; ++p) {
            for (int q = 0; q < spec.domain_rank; ++q) {
                b.block(p * n, q * n, n, n) = pattern(p, q) * Matrix::Identity(n, n);
            }
        }
        blocks.push_back(std::move(b));
    }
    return AdjointableOp(domain, codomain, std::move(blocks));
}

AdjointableOp make_block_random(const GeneratorSpec& spec) {
    SplitMix64 rng(spec.seed);
    const ModuleSpace domain(spec.shape, spec.domain_rank);
    const ModuleSpace codomain(spec.shape, spec.codomain_rank);
    std::vector<Matrix> blocks;
    for (int i = 0; i < spec.shape.summands(); ++i) {
        const int n = spec.shape.block_size(i);
        blocks.push_back(
            random_matrix(rng, spec.codomain_rank * n, spec.domain_rank * n));
    }
    return AdjointableOp(domain, codomain, std::move(blocks));
}

// Snap magnitudes below the floor to exact zero: spectra either vanish or
// stay well above the rank cutoff, so downstream conditioning gates see a
// clean gap instead of a borderline singular value.
constexpr double kSpectrumFloor = 1e-2;

} // namespace

AdjointableOp generate(const GeneratorSpec& spec) {
    if (spec.domain_rank < 1 || spec.codomain_rank < 1) {
        throw InvalidSpec("module ranks must be at least one");
    }
    switch (spec.kind) {
        case GeneratorKind::WeightedShift:
            return make_weighted_shift(spec);
        case GeneratorKind::Normal:
            return diagonalizable(spec, [](const Complex* given, SplitMix64& rng) {
                const Complex z = given ? *given
                                        : Complex(rng.uniform_pm1(), rng.uniform_pm1());
                return std::abs(z) < kSpectrumFloor ? Complex(0.0, 0.0) : z;
            });
        case GeneratorKind::Unitary:
            return diagonalizable(spec, [](const Complex* given, SplitMix64& rng) {
                if (!given) {
                    const double angle = 2.0 * kPi * rng.uniform01();
                    return Complex(std::cos(angle), std::sin(angle));
                }
                const double r = std::abs(*given);
                if (r == 0.0) throw InvalidSpec("unitary eigenvalues must be nonzero");
                return *given / r;
            });
        case GeneratorKind::Positive:
            return diagonalizable(spec, [](const Complex* given, SplitMix64& rng) {
                double r = given ? given->real() : 2.0 * rng.uniform01();
                if (given && (given->imag() != 0.0 || given->real() < 0.0)) {
                    throw InvalidSpec("positive eigenvalues must be nonnegative reals");
                }
                return Complex(r < kSpectrumFloor ? 0.0 : r, 0.0);
            });
        case GeneratorKind::GenericDense:
            return make_scalar_dense(spec);
        case GeneratorKind::JordanLike:
            return make_jordan(spec);
        case GeneratorKind::BlockAlgebraRandom:
            return make_block_random(spec);
    }
    throw InvalidSpec("unhandled generator kind");
}

GapDiagnostic gap_diagnostic(int d, double eps) {
    if (d < 1) throw InvalidSpec("truncation dimension must be at least one");
    if (!(eps > 0.0)) throw InvalidSpec("tolerance must be positive");
    const ModuleSpace space(AlgebraShape({1}), d);
    Matrix block = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) block(i, i) = 1.0 / (i + 1);
    const AdjointableOp s(space, space, {block});

    GapDiagnostic out;
    const detail::Svd svd = detail::decompose_svd(block);
    out.min_singular = svd.sigma(svd.sigma.size() - 1);
    out.n_required =
        converge_range_projection(s, canonical_probes(space), eps).n_required;
    return out;
}

namespace {

GeneratorSpec corpus_spec(SplitMix64& master, int index, bool allow_rectangular) {
    static const std::vector<std::vector<int>> shapes = {
        {1}, {2}, {1, 2}, {3}};
    static const GeneratorKind mix[8] = {
        GeneratorKind::WeightedShift, GeneratorKind::Normal,
        GeneratorKind::Unitary,       GeneratorKind::Positive,
        GeneratorKind::JordanLike,    GeneratorKind::GenericDense,
        GeneratorKind::BlockAlgebraRandom, GeneratorKind::JordanLike};

    GeneratorSpec spec;
    spec.kind = mix[index % 8];
    spec.shape = AlgebraShape(shapes[static_cast<std::size_t>(index / 2) % shapes.size()]);
    spec.domain_rank = 1 + static_cast<int>(master.below(3));
    spec.codomain_rank = spec.domain_rank;
    spec.seed = master.next();
    if (allow_rectangular && (spec.kind == GeneratorKind::GenericDense ||
                              spec.kind == GeneratorKind::BlockAlgebraRandom)) {
        spec.codomain_rank = 1 + static_cast<int>(master.below(3));
    }
    if (spec.kind == GeneratorKind::JordanLike) {
        const int min_block = *std::min_element(spec.shape.block_sizes().begin(),
                                                spec.shape.block_sizes().end());
        if (spec.domain_rank * min_block < 2) {
            spec.domain_rank = 2;
            spec.codomain_rank = 2;
        }
    }
    if (spec.kind == GeneratorKind::WeightedShift) {
        SplitMix64 wrng(master.next());
        for (int i = 0; i + 1 < spec.domain_rank; ++i) {
            spec.weights.push_back(0.5 + 1.5 * wrng.uniform01());
        }
    }
    return spec;
}

CorpusLabel label_for(const GeneratorSpec& spec, const AdjointableOp& op) {
    switch (spec.kind) {
        case GeneratorKind::WeightedShift:
        case GeneratorKind::Normal:
        case GeneratorKind::Unitary:
        case GeneratorKind::Positive:
            return CorpusLabel::Centered;
        case GeneratorKind::JordanLike: {
            if (centered_direct(op, 2).holds) {
                throw Error("generator invariant broken: a Jordan instance "
                            "passed the direct commutation check");
            }
            return CorpusLabel::NotCentered;
        }
        case GeneratorKind::GenericDense:
        case GeneratorKind::BlockAlgebraRandom:
            return CorpusLabel::Unknown;
    }
    throw InvalidSpec("unhandled generator kind");
}

std::vector<LabeledOperator> build_corpus(std::uint64_t seed, int count,
                                          bool allow_rectangular) {
    if (count < 1) throw InvalidSpec("corpus size must be at least one");
    SplitMix64 master(seed);
    std::vector<LabeledOperator> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        GeneratorSpec spec = corpus_spec(master, i, allow_rectangular);
        AdjointableOp op = generate(spec);
        CorpusLabel label = spec.domain_rank == spec.codomain_rank
                                ? label_for(spec, op)
                                : CorpusLabel::Unknown;
        out.push_back(LabeledOperator{std::move(spec), std::move(op), label});
    }
    return out;
}

} // namespace

std::vector<LabeledOperator> corpus(std::uint64_t seed, int count) {
    return build_corpus(seed, count, false);
}

std::vector<LabeledOperator> polar_corpus(std::uint64_t seed, int count) {
    return build_corpus(seed, count, true);
}

} // namespace modpolar
