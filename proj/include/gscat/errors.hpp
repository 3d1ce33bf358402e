#pragma once

#include <stdexcept>
#include <string>

namespace gscat {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input file could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

// Input parsed but violates a structural constraint (Hermiticity, index
// range, n < 1, bad tolerance values, ...).
struct ValidationError : Error {
    using Error::Error;
};

// z = 0 passed to an operation that requires z != 0.
struct ZeroArgument : Error {
    using Error::Error;
};

// 1/z + z coincides with an eigenvalue of D; the Q-form resolvent does
// not exist at this point.
struct ResolventSingular : Error {
    using Error::Error;
};

// gamma(z) is numerically singular: z sits at (or too close to) a root
// of W(z), i.e. a confined/half-bound energy or a bound-state pole.
struct GammaSingular : Error {
    using Error::Error;
};

// Argument outside its mathematical domain (e.g. momentum not in (-pi,0)).
struct DomainError : Error {
    using Error::Error;
};

// Singular values straddle the rank cutoff too closely to call the null
// space dimension; reported rather than guessed.
struct RankAmbiguous : Error {
    using Error::Error;
};

// Branch-matching overlap between adjacent grid samples fell below the
// safe threshold; the grid is too coarse.
struct MatchingAmbiguous : Error {
    using Error::Error;
};

// derivative_check called at a point that is not a branch zero.
struct NoCrossing : Error {
    using Error::Error;
};

// Phase unwrapping still sees steps >= pi/2 at maximum bisection depth.
struct RefinementExhausted : Error {
    using Error::Error;
};

// Accumulated phase is not close to an integer multiple of 2*pi; signals
// an evaluation failure, never expected mathematically.
struct NotInteger : Error {
    using Error::Error;
};

// Adaptive quadrature error estimate stopped decreasing.
struct QuadratureStalled : Error {
    using Error::Error;
};

// Wave packet does not fit on the truncated lattice.
struct TruncationTooSmall : Error {
    using Error::Error;
};

// Too much probability left near the gadget at measurement time.
struct PacketNotCleared : Error {
    using Error::Error;
};

}  // namespace gscat
