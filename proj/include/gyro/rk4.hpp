#pragma once

#include <cmath>
#include <cstddef>

#include "gyro/errors.hpp"

namespace gyro::ode {

/// Number of equal steps of size at most `max_step` covering `span`.
inline std::size_t steps_for(double span, double max_step)
{
    if (!(max_step > 0.0) || !std::isfinite(span)) {
        throw PreconditionViolation("integration step must be positive");
    }
    const double n = std::ceil(std::abs(span) / max_step - 1e-9);
    return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

/// One classical Runge-Kutta step of y' = f(t, y).
template <class State, class Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double h)
{
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates from t0 to t1 in n equal steps. `after_step(t, y)` may modify y
/// (e.g. reprojection) and is called after every step.
template <class State, class Rhs, class AfterStep>
State rk4_integrate(const Rhs& f, double t0, double t1, State y, std::size_t n, AfterStep&& after_step)
{
    const double h = (t1 - t0) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + h * static_cast<double>(i);
        y = rk4_step(f, t, y, h);
        after_step(i + 1 == n ? t1 : t + h, y);
    }
    return y;
}

template <class State, class Rhs>
State rk4_integrate(const Rhs& f, double t0, double t1, State y, std::size_t n)
{
    return rk4_integrate(f, t0, t1, std::move(y), n, [](double, State&) {});
}

}  // namespace gyro::ode
