#pragma once

#include <stdexcept>
#include <string>

namespace twistspec {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration / construction arguments.
struct ConfigError : Error {
    using Error::Error;
};

/// A hypothesis of one of the certificate routines is violated
/// (wrong geometry class for the requested certificate).
struct HypothesisError : Error {
    using Error::Error;
};

struct NotInside : Error {
    using Error::Error;
};
struct EmptyGrid : Error {
    using Error::Error;
};
struct ZeroVector : Error {
    using Error::Error;
};
struct NoInradius : HypothesisError {
    using HypothesisError::HypothesisError;
};
struct NoOrigin : HypothesisError {
    using HypothesisError::HypothesisError;
};
struct HalfPlaneViolated : HypothesisError {
    using HypothesisError::HypothesisError;
};
struct NotDiverging : HypothesisError {
    using HypothesisError::HypothesisError;
};
struct TooLarge : Error {
    using Error::Error;
};

}  // namespace twistspec
