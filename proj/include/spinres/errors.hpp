// errors.hpp: exception types shared by all spinres modules

#pragma once

#include <stdexcept>
#include <string>

namespace spinres {

// Invalid input: precondition violated, dimension mismatch, bad config value.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Time integration left the physical state space (e.g. negative eigenvalue of rho).
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operating point is above the parametric instability threshold.
struct AboveThresholdError : std::domain_error {
    using std::domain_error::domain_error;
};

// Inverse problem has no consistent solution.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File could not be read or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace spinres
