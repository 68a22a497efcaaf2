#pragma once

#include <stdexcept>
#include <string>

namespace railsched {

// Bad data inside an otherwise well-formed document or instance
// (missing pass_min edge, inconsistent pair references, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Caller asked for something outside the supported parameter space
// (unsupported train count, negative shot count, bad penalty values, ...).
struct ParameterError : std::runtime_error {
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// Problem is too large for the requested exact method.
struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file / document.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Requested stochastic/deterministic split cannot be represented.
struct DecompositionError : std::runtime_error {
    explicit DecompositionError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace railsched
