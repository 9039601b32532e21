#pragma once

#include <stdexcept>
#include <string>

namespace epp {

// Base class for every failure raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension mismatch between operands.
struct ShapeError : Error {
    using Error::Error;
};

// Argument outside the documented domain of an operation.
struct ContractError : Error {
    using Error::Error;
};

// Run description file missing, unreadable, or inconsistent.
struct ConfigError : Error {
    using Error::Error;
};

// No eigen-phase preserving transformation exists for the requested channel count.
struct EppNotExistentError : Error {
    using Error::Error;
};

// Mixing matrix has a numerically singular real part; the asymptotic frame is undefined.
struct DegenerateBError : Error {
    using Error::Error;
};

// A required inverse does not exist to working precision.
struct SingularMatrixError : Error {
    using Error::Error;
};

// A step or eigendecomposition failed to meet its accuracy gate.
struct AccuracyError : Error {
    using Error::Error;
};

// Asymptotic matching of the integrated solution is invalid.
struct MatchingError : Error {
    using Error::Error;
};

}  // namespace epp
