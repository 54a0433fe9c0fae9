#pragma once

#include <stdexcept>
#include <string>

namespace succession {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All weights or all density ordinates are zero; the prior carries no mass.
struct ZeroMassError : Error {
    using Error::Error;
};

// Malformed prior spec, number, or command line.
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input outside the supported domain (atom outside [0,1],
// nonpositive Beta parameter, wrong prior kind for an operation, ...).
struct DomainError : Error {
    using Error::Error;
};

// Adaptive quadrature exhausted its refinement budget.
struct ToleranceNotMetError : Error {
    using Error::Error;
};

// An exact-arithmetic path was requested for a prior built from
// non-rational inputs.
struct NotExactlyRepresentableError : Error {
    using Error::Error;
};

// Conditioning on an event of probability zero. Always an error, never 0/0.
struct ImpossibleEvidenceError : Error {
    using Error::Error;
};

// A hard operation cap was exceeded (e.g. brute-force run length).
struct LimitExceededError : Error {
    using Error::Error;
};

// Rejection sampling kept zero trials; the estimate is undefined.
struct NoConditionedTrialsError : Error {
    using Error::Error;
};

}  // namespace succession
