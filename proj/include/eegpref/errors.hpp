#pragma once

#include <stdexcept>
#include <string>

namespace eegpref {

// Base for all pipeline errors. Subtypes map to failure classes so callers
// (and tests) can distinguish bad input files from bad numerics.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid value in a domain object or argument (out-of-range rating, k > p, ...).
struct ValidationError : Error {
    using Error::Error;
};

// On-disk data that does not match the expected container layout.
struct FormatError : Error {
    using Error::Error;
};

// Filesystem-level failure (unreadable / unwritable path).
struct IoError : Error {
    using Error::Error;
};

// Infeasible filter or decomposition request (cutoff past Nyquist, fs too low).
struct DesignError : Error {
    using Error::Error;
};

// Linear-algebra breakdown (singular covariance, degenerate signal).
struct NumericalError : Error {
    using Error::Error;
};

// Bad experiment configuration (unknown key, invalid grid value).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace eegpref
