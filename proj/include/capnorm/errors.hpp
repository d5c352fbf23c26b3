#pragma once

#include <stdexcept>
#include <string>

namespace capnorm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible range. The message names the
/// violated constraint, e.g. "p in (delta/dim, delta/alpha)".
class ParameterError : public Error {
public:
    using Error::Error;
};

/// The requested grid exceeds the configured leaf-cell cap.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Two operands live on different grids.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// A sampled or computed value is NaN or infinite.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Malformed input document (JSON artifact or config).
class FormatError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& constraint)
{
    if (!ok) throw ParameterError("constraint violated: " + constraint);
}

} // namespace detail
} // namespace capnorm
