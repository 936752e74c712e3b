#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mmdoppler {

/// Raised when an argument lies outside the domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to converge.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    /// Error estimate at the point of failure.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Raised for malformed scenario configurations; carries the offending field path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace mmdoppler
