#pragma once

#include <stdexcept>
#include <string>

namespace polytrap {

// Invalid parameter values (negative gamma, lambda <= 0, empty ranges, ...).
struct InvalidParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Singular inputs: coincident particle positions fed to an interaction term.
struct SingularInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested evaluation form is not available for the given trap degree.
struct UnsupportedFormError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Quadrature self-check failed (orthogonality residual above tolerance);
// indicates insufficient resolution for the requested order/weight.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative solver failed to reach tolerance; carries the best residual seen.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

} // namespace polytrap
