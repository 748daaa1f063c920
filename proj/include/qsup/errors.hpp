#pragma once

#include <stdexcept>
#include <string>

namespace qsup {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A wavelength (or other argument) fell outside a model's declared validity range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// An argument violated a physical precondition (e.g. no physical idler exists).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Transverse momentum exceeds a medium wavevector; the wave is evanescent there.
class EvanescentError : public Error {
public:
    using Error::Error;
};

/// A required spectral axis does not cover the requested range.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// A spectrum has no interior fringe extrema; visibility cannot be extracted.
class NoFringesError : public Error {
public:
    using Error::Error;
};

/// An analysis window contains no visibility points.
class WindowError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; message carries the file and line number.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (unknown label, overlapping intervals, missing field).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data violates a documented requirement (e.g. negative absorbance).
class DataError : public Error {
public:
    using Error::Error;
};

/// Least-squares fit failed to converge within the iteration budget.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace qsup
