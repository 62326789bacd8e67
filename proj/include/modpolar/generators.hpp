#pragma once

#include <cstdint>
#include <vector>

#include "modpolar/module.hpp"

namespace modpolar {

// Counter-based pseudo-random stream with exact cross-platform semantics
// (pure 64-bit integer mixing; doubles are exact dyadic rationals).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [-1, 1).
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    // Uniform integer in {0, ..., n - 1}.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

enum class GeneratorKind {
    WeightedShift,     // e_i -> w_i e_(i+1), e_k -> 0, per summand
    Normal,            // V diag(lambda) V* with a seeded unitary V
    Unitary,           // V diag(unimodular) V*
    Positive,          // V diag(nonnegative) V*
    GenericDense,      // scalar entries times the algebra unit
    JordanLike,        // lambda I + nilpotent superdiagonal, per summand
    BlockAlgebraRandom // independent dense complex entries per summand
};

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::GenericDense;
    AlgebraShape shape{std::vector<int>{1}};
    int domain_rank = 1;
    int codomain_rank = 1; // must equal domain_rank except for the dense kinds
    std::vector<double> weights;       // WeightedShift: length domain_rank - 1
    std::vector<Complex> eigenvalues;  // Normal/Unitary/Positive: cycled; empty = seeded
    bool diagonal = false;             // skip the conjugating unitary (V = I)
    std::uint64_t seed = 0;
};

// Deterministic in every GeneratorSpec field. Throws InvalidSpec on
// out-of-contract parameters (nonpositive weights, rectangular square kinds,
// negative eigenvalues for Positive, zero eigenvalues for Unitary).
AdjointableOp generate(const GeneratorSpec& spec);

// Truncated diagonal compression of the operator e_n -> e_n / n: builds
// diag(1, 1/2, ..., 1/d), measures its smallest singular value and the
// iteration count needed to approximate its range projection to eps on the
// canonical probes. The count diverges as d grows, which is the finite
// shadow of a range whose closure is not orthogonally complemented.
struct GapDiagnostic {
    double min_singular = 0.0;
    long n_required = 0;
};

GapDiagnostic gap_diagnostic(int d, double eps);

enum class CorpusLabel { Centered, NotCentered, Unknown };

struct LabeledOperator {
    GeneratorSpec spec;
    AdjointableOp op;
    CorpusLabel label;
};

// Square labeled corpus mixing the structured kinds (labeled Centered), the
// Jordan kind (labeled NotCentered, verified by the direct commutation check
// at generation time), and the dense kinds (labeled Unknown). Deterministic
// in the seed; shapes cycle over {[1], [2], [1,2], [3]} and ranks over
// {1, 2, 3}.
std::vector<LabeledOperator> corpus(std::uint64_t seed, int count);

// Corpus for decomposition tests: same shape/rank cycling, mixes all kinds
// and includes rectangular dense operators. Singular spectra are kept away
// from the rank cutoff by construction so the limit construction's
// conditioning gate passes on the overwhelming share of entries.
std::vector<LabeledOperator> polar_corpus(std::uint64_t seed, int count);

} // namespace modpolar
