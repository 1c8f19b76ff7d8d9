#pragma once

#include <stdexcept>
#include <string>

namespace drlcheck {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files (models, property specs, transition specs, configs).
struct ParseError : Error {
    using Error::Error;
};

// Structurally invalid networks or queries (dimension mismatches, bad
// variable references, empty boxes, non-finite data where finite is required).
struct ModelError : Error {
    using Error::Error;
};

// A solver invariant was violated at runtime (non-monotone search axis,
// basis repair failure). Indicates a bug or numerically hostile input and
// is always preferable to returning a wrong verdict.
struct SolverError : Error {
    using Error::Error;
};

}
