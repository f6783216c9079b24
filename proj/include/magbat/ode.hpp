// ode.hpp: adaptive Runge-Kutta-Fehlberg 7(8) integration of complex ODE
// systems, sampled on a caller-supplied time grid.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace magbat::ode {

using State = std::vector<std::complex<double>>;
using Rhs = std::function<void(const State& x, State& dxdt, double t)>;
using Observer = std::function<void(std::size_t index, double t, const State& x)>;

// Integrates dx/dt = rhs(x, t) from times.front() (where x holds x0) and calls
// `observe` at every grid time, in order. Local error per step is kept below
// `tol` in the mixed absolute/relative sense. Throws magbat::NumericalError
// if the step size collapses. `times` must be non-decreasing.
void integrate_on_grid(const Rhs& rhs, State x, std::span<const double> times, double tol,
                       const Observer& observe);

} // namespace magbat::ode
