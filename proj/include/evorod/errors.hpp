#pragma once

#include <stdexcept>
#include <string>

namespace evorod {

// Base for all library errors so callers can catch evorod failures as one family.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A rotation matrix failed the orthonormality / determinant check.
class InvalidFrameError : public Error {
public:
    using Error::Error;
};

// A scalar or tensor argument is outside its admissible range.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

// An operation needs more grid nodes than were supplied.
class InsufficientGridError : public Error {
public:
    using Error::Error;
};

// A grid-coupled evaluation was requested without the grid data it needs.
class MissingContextError : public Error {
public:
    using Error::Error;
};

// Inputs violate a stated operation precondition (constraint algebra, history kind, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// An iterative solver failed to reach its tolerance.
class NonconvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace evorod
