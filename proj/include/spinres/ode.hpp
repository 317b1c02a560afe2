// ode.hpp: classical fixed-step RK4 for Eigen-valued states.

#pragma once

#include "spinres/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace spinres {

// One RK4 step of dy/dt = f(t, y). State must support +, scalar * and copy.
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double dt) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
    const State k3 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
    const State k4 = f(t + dt, State(y + dt * k3));
    return State(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

// Number of fixed steps covering [0, t_end]; the last step is shortened when
// t_end is not a multiple of dt.
inline std::size_t step_count(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("step_count: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ArgumentError("step_count: t_end must be >= 0");
    const double n = std::ceil(t_end / dt - 1e-9);
    return n < 0.0 ? 0 : static_cast<std::size_t>(n);
}

// Integrates from t=0 to t_end; `observe(step, t, y)` is called at t=0 and
// after every step and may return false to stop early.
template <class State, class Rhs, class Observer>
State integrate_rk4(const Rhs& f, State y, double t_end, double dt, Observer&& observe) {
    const std::size_t n = step_count(t_end, dt);
    if (!observe(std::size_t{0}, 0.0, y)) return y;
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = std::min(dt, t_end - t);
        y = rk4_step(f, t, y, h);
        t = (i + 1 == n) ? t_end : t + h;
        if (!observe(i + 1, t, y)) break;
    }
    return y;
}

} // namespace spinres
