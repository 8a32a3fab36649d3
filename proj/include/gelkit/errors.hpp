#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gelkit {

/// Invalid system specification or configuration (bad fractions, asymmetric W, ...).
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Integrator, root finder or fixed-point failure.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double last_t = 0.0, std::vector<double> last_state = {})
        : std::runtime_error(what), last_t_(last_t), last_state_(std::move(last_state)) {}

    double last_t() const noexcept { return last_t_; }
    const std::vector<double>& last_state() const noexcept { return last_state_; }

private:
    double last_t_;
    std::vector<double> last_state_;
};

} // namespace gelkit
