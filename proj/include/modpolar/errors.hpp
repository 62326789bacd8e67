#pragma once

#include <stdexcept>
#include <string>

namespace modpolar {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operands live over different algebra shapes, ranks, or spaces.
struct ShapeMismatch : Error {
    using Error::Error;
};

// Spectral calculus was asked for on an element that is not self-adjoint
// within tolerance.
struct NotSelfAdjoint : Error {
    using Error::Error;
};

// A positive element/operator was required.
struct NotPositive : Error {
    using Error::Error;
};

// An operation required a square operator (domain == codomain).
struct NotSquare : Error {
    using Error::Error;
};

// Projection iteration did not reach the requested accuracy within the cap.
struct NoConvergence : Error {
    using Error::Error;
};

// Singular values cluster at the rank threshold; the regularized limit
// construction is unreliable there.
struct IllConditioned : Error {
    using Error::Error;
};

// A candidate operator failed the partial-isometry test.
struct NotPartialIsometry : Error {
    using Error::Error;
};

// Unrecognized condition tag.
struct UnknownTag : Error {
    using Error::Error;
};

// A restricted sequence violated t_n in {1..n}.
struct InvalidSequence : Error {
    using Error::Error;
};

// A generator spec failed validation.
struct InvalidSpec : Error {
    using Error::Error;
};

// alpha <= 0 passed to a power identity.
struct NonPositiveAlpha : Error {
    using Error::Error;
};

// Mutually equivalent conditions disagreed beyond tolerance. This is never a
// valid mathematical outcome; it signals a numerical or implementation defect.
struct EquivalenceViolation : Error {
    using Error::Error;
};

// Malformed operator document or unreadable input.
struct ParseError : Error {
    using Error::Error;
};

// cmd_verify was asked for a suite it does not know.
struct UnknownSuite : Error {
    using Error::Error;
};

} // namespace modpolar
