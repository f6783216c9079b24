// qsd.cpp: noise-averaged QSD coefficient equations

#include "magbat/qsd.hpp"
#include "magbat/error.hpp"
#include "magbat/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace magbat::qsd {

namespace {

void check_grid(std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    if (times.front() != 0.0) throw std::invalid_argument("time grid must start at t = 0");
    if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("time grid must be non-decreasing");
}

void require_markov(const QsdParams& params) {
    params.validate();
    if (!params.markov()) {
        throw std::invalid_argument("coefficient equations are only available in the Markov limit");
    }
}

void check_blowup(const QsdParams& params, double t, std::initializer_list<cplx> values) {
    const double limit = 1e6 * std::abs(params.g);
    for (cplx v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || (limit > 0.0 && std::abs(v) > limit)) {
            throw NumericalError("Riccati solution escaped (|F| > 1e6 g) at t = " + std::to_string(t));
        }
    }
}

} // namespace

void QsdParams::validate() const {
    if (!std::isfinite(g) || !std::isfinite(omega) || !std::isfinite(omega_m)) {
        throw std::invalid_argument("g, omega and omega_m must be finite");
    }
    if (omega == omega_m) throw std::invalid_argument("omega == omega_m: detuning must be nonzero");
    if (!(gamma_noise >= 0.0) || !std::isfinite(gamma_noise)) {
        throw std::invalid_argument("noise strength Gamma must be finite and >= 0");
    }
    if (memory_gamma && (!(*memory_gamma > 0.0) || !std::isfinite(*memory_gamma))) {
        throw std::invalid_argument("memory rate gamma must be finite and > 0");
    }
}

double ou_correlation(const QsdParams& params, double t, double s) {
    params.validate();
    if (!params.memory_gamma) throw std::invalid_argument("OU correlation is a delta function in the Markov limit");
    const double gamma = *params.memory_gamma;
    return 0.5 * params.gamma_noise * gamma * std::exp(-gamma * std::abs(t - s));
}

cplx bath_correlation(const QsdParams& params, double t, double s) {
    params.validate();
    if (t < s) throw std::invalid_argument("bath correlation needs t >= s");
    const double lag = t - s;
    double bracket = lag;
    if (params.memory_gamma) bracket += std::expm1(-*params.memory_gamma * lag) / *params.memory_gamma;
    const double decay = std::exp(-0.5 * params.gamma_noise * bracket);
    return params.g * params.g * decay * std::polar(1.0, -params.omega_m * lag);
}

F12Solution solve_f12(const QsdParams& params, std::span<const double> times, double tol) {
    require_markov(params);
    check_grid(times);
    const cplx c{-0.5 * params.gamma_noise, -params.detuning()};
    const double g2 = params.g * params.g;
    // Checked at every stage: the adaptive stepper can otherwise hop across a
    // near-pole between two grid points.
    auto rhs = [&](const ode::State& x, ode::State& dx, double t) {
        check_blowup(params, t, {x[0], x[1]});
        const cplx f1 = x[0];
        const cplx f2 = x[1];
        dx[0] = g2 + c * f1 + f1 * f1 + 3.0 * f2 * f2;
        dx[1] = c * f2 - f1 * f1 + f2 * f2 + 4.0 * f1 * f2;
    };
    F12Solution out;
    out.times.assign(times.begin(), times.end());
    out.f1.resize(times.size());
    out.f2.resize(times.size());
    ode::integrate_on_grid(rhs, ode::State{0.0, 0.0}, times, tol, [&](std::size_t i, double, const ode::State& x) {
        out.f1[i] = x[0];
        out.f2[i] = x[1];
    });
    return out;
}

FSolution solve_calF(const QsdParams& params, std::span<const double> times, double tol) {
    require_markov(params);
    check_grid(times);
    const cplx c{-0.5 * params.gamma_noise, -params.detuning()};
    const double g2 = params.g * params.g;
    auto rhs = [&](const ode::State& x, ode::State& dx, double t) {
        check_blowup(params, t, {x[0]});
        dx[0] = g2 + c * x[0] + 2.0 * x[0] * x[0];
        dx[1] = x[0];
    };
    FSolution out;
    const std::size_t n = times.size();
    out.times.assign(times.begin(), times.end());
    out.f.resize(n);
    out.integral.resize(n);
    out.a.resize(n);
    out.b.resize(n);
    ode::integrate_on_grid(rhs, ode::State{0.0, 0.0}, times, tol, [&](std::size_t i, double, const ode::State& x) {
        out.f[i] = x[0];
        out.integral[i] = x[1];
        const cplx half_decay = 0.5 * std::exp(-2.0 * x[1]);
        out.a[i] = half_decay + 0.5;
        out.b[i] = half_decay - 0.5;
    });
    out.energy = qsd_energy(out);
    return out;
}

std::vector<double> qsd_energy(const FSolution& solution) {
    std::vector<double> e(solution.b.size());
    std::transform(solution.b.begin(), solution.b.end(), e.begin(), [](cplx b) { return std::norm(b); });
    return e;
}

std::vector<Maximum> quasi_period_maxima(std::span<const double> times, std::span<const double> values,
                                         double period) {
    if (times.size() != values.size()) throw std::invalid_argument("times and values differ in length");
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
    std::vector<Maximum> out;
    const double half = 0.5 * period;
    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        if (!(values[i] > values[i - 1] && values[i] >= values[i + 1])) continue;
        while (times[lo] < times[i] - half) ++lo;
        while (hi + 1 < times.size() && times[hi + 1] <= times[i] + half) ++hi;
        // A peak whose window runs off the end of the grid is not confirmed.
        if (times[i] + half > times.back()) break;
        const auto window = values.subspan(lo, hi - lo + 1);
        if (values[i] >= *std::max_element(window.begin(), window.end())) out.push_back({times[i], values[i]});
    }
    return out;
}

} // namespace magbat::qsd
