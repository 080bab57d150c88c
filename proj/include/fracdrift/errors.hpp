#pragma once

#include <stdexcept>
#include <string>

namespace fracdrift {

/// Raised when an argument lies outside the domain of an operation
/// (pole of Gamma, beta outside (0, N), point outside the ball, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed input that is not a mathematical domain issue (empty grids,
/// unsorted tables, mismatched sizes).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance. Carries the best
/// value obtained and an estimate of its error.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double partial, double error_bound)
        : std::runtime_error(what), partial_(partial), bound_(error_bound) {}

    double partial() const noexcept { return partial_; }
    double error_bound() const noexcept { return bound_; }

private:
    double partial_;
    double bound_;
};

}  // namespace fracdrift
