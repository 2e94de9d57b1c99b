#pragma once

#include <stdexcept>
#include <string>

namespace qcm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an input value was violated. The message names the
/// offending parameter.
struct DomainError : Error {
    using Error::Error;
};

/// Too few data points for the requested operation.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// Oscillation amplitude too small to identify a frequency.
struct LowVisibilityError : Error {
    using Error::Error;
};

/// Malformed input file. Message carries the file name and line number.
struct ParseError : Error {
    using Error::Error;
};

/// An internal numerical procedure failed to converge.
struct NumericalError : Error {
    using Error::Error;
};

/// A requested threshold or target is not reachable on the search domain.
struct OutOfRangeError : Error {
    using Error::Error;
};

} // namespace qcm
