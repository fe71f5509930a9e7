#pragma once

#include <stdexcept>
#include <string>

namespace mgequiv {

/// Malformed input files (CSV / parameter / scenario text).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter values that violate physical constraints, or model
/// configurations for which no steady state exists.
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during time-domain integration.
class SimError : public std::runtime_error {
public:
    SimError(const std::string& what, double t_fail)
        : std::runtime_error(what), time(t_fail) {}
    double time = 0.0;
};

/// Invalid run configuration (windows, DE settings, CLI arguments).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mgequiv
