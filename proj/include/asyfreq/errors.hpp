#pragma once

#include <stdexcept>
#include <string>

namespace asyfreq {

/// Invalid argument to a density, solver or model (negative time, bad rate).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input data or configuration failed validation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine did not reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double achieved_error)
        : std::runtime_error(what + " (achieved error estimate " +
                             std::to_string(achieved_error) + ")"),
          achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// The model makes a closed-form expression undefined (e.g. a divisor is zero).
class ModelDegeneracy : public NumericalFailure {
public:
    explicit ModelDegeneracy(const std::string& what) : NumericalFailure(what, 0.0) {}
};

}  // namespace asyfreq
