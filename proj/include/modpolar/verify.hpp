#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "modpolar/tolerances.hpp"

namespace modpolar {

struct InvariantResult {
    std::string suite;
    std::string name;
    int trials = 0;
    int violations = 0; // trials whose residual exceeded the tolerance or threw
    int skipped = 0;    // trials excluded by a documented gate, not failures
    double max_residual = 0.0;
    double tolerance = 0.0;
};

struct SuiteResult {
    std::string suite;
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<InvariantResult> invariants;

    bool ok() const;
};

// Runs the named invariant suite ("core", "module", "polar", "centered" or
// "all") over `trials` seeded trials per invariant. Deterministic in (suite,
// seed, trials, tol): repeated invocation reproduces every residual exactly.
// The residual tolerance `tol` applies to the identity-level checks; the
// tighter structural tolerances stay pinned. Throws UnknownSuite for other
// names and InvalidSpec when trials < 1.
SuiteResult run_suite(const std::string& suite, std::uint64_t seed, int trials,
                      double tol = kResidualTol);

std::string render_json(const SuiteResult& result);
std::string render_table(const SuiteResult& result);

} // namespace modpolar
