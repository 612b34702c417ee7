#pragma once

#include <stdexcept>
#include <string>

namespace conefrac {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (non-convergence, singular system, divergent integral).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration or unparsable input text.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace conefrac
