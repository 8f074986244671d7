#pragma once

#include <stdexcept>
#include <string>

namespace coag {

/// Invalid argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation not defined for the given kernel family or configuration.
class UnsupportedOperation : public std::logic_error {
public:
    explicit UnsupportedOperation(const std::string& what) : std::logic_error(what) {}
};

/// A quadrature or iteration failed to reach its accuracy target.
/// Carries the best estimate achieved so callers can report it.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_estimate(achieved) {}
    double achieved_estimate;
};

/// Least-squares or model fit could not be performed on the given data.
class FitFailure : public std::runtime_error {
public:
    explicit FitFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Bad run configuration (CLI or config file).
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key(key) {}
    std::string key;
};

} // namespace coag
