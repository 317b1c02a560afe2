// gain.hpp: phase-dependent parametric gain g = 1 + 2 eta cos(2 phi_T + phase) + eta^2.

#pragma once

#include <cmath>

namespace spinres {

struct GainStructure {
    double eta = 0.0;
    double phase = 0.0;

    double at(double phi_T) const { return 1.0 + 2.0 * eta * std::cos(2.0 * phi_T + phase) + eta * eta; }
    double min() const { return (1.0 - eta) * (1.0 - eta); }
    double max() const { return (1.0 + eta) * (1.0 + eta); }
};

} // namespace spinres
