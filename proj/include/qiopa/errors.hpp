#pragma once

#include <stdexcept>
#include <string>

namespace qiopa {

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameters outside the physical domain of an operation (poles,
/// unstable operating points, invalid ranges).
class PhysicsError : public std::runtime_error {
public:
    explicit PhysicsError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal numerical failure (non-convergence, singular systems).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qiopa
