#pragma once

#include <stdexcept>
#include <string>

namespace shiftlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or incomplete configuration (weight-rule gaps, bad config fields).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A checker's hypothesis does not hold for the given inputs.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation (negative index on a one-sided
/// vector, support outside a diagonal operator's eigenpairs, power cap exceeded).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A right inverse was requested for weights below the invertibility floor.
class NoninvertibleError : public Error {
public:
    using Error::Error;
};

} // namespace shiftlab
