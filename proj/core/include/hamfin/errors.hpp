#pragma once

#include <stdexcept>
#include <string>

namespace hamfin {

/// Invalid or inconsistent input parameters / configuration.
class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched operator/field dimensions.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure broke down (e.g. a linear solve); carries the
/// failing step index when known.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, long step = -1)
        : std::runtime_error(what), step_index(step) {}
    long step_index;
};

/// A computed quantity left the representable floating range; the message
/// suggests a remedy (usually a narrower grid).
class RangeError : public std::runtime_error {
public:
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear system is singular by construction; the message names the
/// one-field fallback to use instead.
class DegenerateSystemError : public std::runtime_error {
public:
    explicit DegenerateSystemError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hamfin
