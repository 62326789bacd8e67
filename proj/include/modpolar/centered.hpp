#pragma once

#include <string>
#include <utility>
#include <vector>

#include "modpolar/polar.hpp"

namespace modpolar {

// A finite sequence (t_1, ..., t_N) with t_n in {1, ..., n}. Each term picks
// which conjugated modulus U^t |T| (U^t)* is tested against which power
// modulus |T^(n+1-t)|.
struct RestrictedSequence {
    std::vector<int> terms;

    explicit RestrictedSequence(std::vector<int> t);

    int length() const { return static_cast<int>(terms.size()); }

    static RestrictedSequence constant_one(int length);  // (1, 1, ..., 1)
    static RestrictedSequence staircase(int length);     // (1, 2, ..., N)
    static RestrictedSequence midpoint(int length);      // t_n = ceil(n / 2)
};

// The commutation conditions that are mutually equivalent for an operator
// with polar decomposition T = U|T|. Roman numerals follow the order in
// which the library evaluates and reports them.
enum class ConditionTag {
    I,    // {T^n (T^n)*, (T^n)* T^n} commute pairwise
    II,   // [|T^n|, |(T^m)*|] = 0
    III,  // [|T^n|, |T*|] = 0
    VI,   // [U^m |T| (U^m)*, |T^n|] = 0
    VII,  // [U^n |T| (U^n)*, |T|] = 0
    VIII, // [|(T^n)*|, |T|] = 0
    IX,   // [(U^n)* |T*| U^n, |T*|] = 0
    X,    // [(U^m)* |T*| U^m, |(T^n)*|] = 0
    XI,   // {|T|, U^j |T| (U^j)*, (U^j)* |T| U^j} commute pairwise
};

ConditionTag parse_condition_tag(const std::string& name); // throws UnknownTag
std::string condition_tag_name(ConditionTag tag);
const std::vector<ConditionTag>& report_tags(); // evaluation order

struct ConditionResult {
    bool holds = false;
    // Largest norm([A, B]) / (norm(A) norm(B)) over the tested pairs.
    double max_scaled_residual = 0.0;
};

enum class Exactness {
    Exact,       // U^k vanished for some k within the order bound
    BoundedOnly, // no finite certificate; conditions checked up to the bound
};

struct CenteredReport {
    int order_bound = 0;
    std::vector<std::pair<ConditionTag, ConditionResult>> conditions;
    std::vector<ConditionResult> sequence_samples; // constant-one, staircase, midpoint
    double max_residual = 0.0;
    bool centered = false;
    Exactness exactness = Exactness::BoundedOnly;
};

// One diagonal s + t = n + 2 of the commutation grid. When the hypothesis
// [U^k |T| (U^k)*, |T^l|] = 0 (k + l <= n + 1) holds, the products
// A_t = |T^t|^2 U^s |T| (U^s)* and B_t = U^s |T| (U^s)* |T^t|^2 agree for one
// t on the diagonal exactly when they agree for all of them.
struct PropagationReport {
    bool applicable = false; // hypothesis held below the diagonal
    bool uniform = false;    // the per-t verdicts agree across the diagonal
    bool chain_holds = false; // every A_t = B_t within tolerance
    std::vector<double> scaled_residuals; // t = 1, ..., n + 1
};

struct ProductFormulaReport {
    bool applicable = false; // [U^j |T| (U^j)*, |T|] = 0 for j < k
    bool holds = false;
    double residual = 0.0; // norm(|(T^k)*| - prod_j U^j |T| (U^j)*)
    double scale = 0.0;    // norm(T)^k
};

struct AbsorptionReport {
    bool applicable = false;
    bool holds = false;
    double max_residual = 0.0;
};

// Builds {T^n (T^n)*, (T^n)* T^n : 1 <= n <= n_max} and checks every pairwise
// commutator against the scaled tolerance.
ConditionResult centered_direct(const AdjointableOp& t, int n_max,
                                double tol = kCommutatorTol);

// Evaluates one tagged condition for all indices up to n_max. Pair-indexed
// tags (ii), (vi), (x) run over m + n <= n_max + 1, which probes the same
// commutation diagonals as the single-index tags and keeps the truncated
// battery self-consistent.
ConditionResult condition_family(const PolarFactors& f, ConditionTag tag,
                                 int n_max, double tol = kCommutatorTol);

// [U^(t_n) |T| (U^(t_n))*, |T^(n+1-t_n)|] = 0 along the sequence.
ConditionResult restricted_commutativity(const PolarFactors& f,
                                         const RestrictedSequence& s,
                                         double tol = kCommutatorTol);

PropagationReport propagation_check(const PolarFactors& f, int n,
                                    double tol = kCommutatorTol);

// |(T^k)*| = U|T|U* . U^2|T|(U^2)* ... U^k|T|(U^k)*, valid whenever the
// conjugated moduli below k commute with |T|.
ProductFormulaReport product_formula_check(const PolarFactors& f, int k,
                                           double tol = kResidualTol);

// U^s |T| (U^s)* U^t = U^s |T| (U^(s-t))* and its adjoint for
// 1 <= t <= s <= n + 1, valid under the same hypothesis as the product
// formula at order n.
AbsorptionReport conjugate_absorption_check(const PolarFactors& f, int n,
                                            double tol = kResidualTol);

// Runs the whole battery at the given order bound and requires unanimity:
// every evaluated condition and sampled sequence must return the same
// verdict, anything else throws EquivalenceViolation (a disagreement can
// only come from a defect, never from the operator).
CenteredReport centered_report(const AdjointableOp& t, int n_max = 8,
                               double tol = kCommutatorTol);

} // namespace modpolar
