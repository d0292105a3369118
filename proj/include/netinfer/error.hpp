#pragma once

#include <stdexcept>
#include <string>

namespace netinfer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, violated preconditions, invalid configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A computation could not be completed (degenerate covariance, divergence, overflow).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace netinfer
