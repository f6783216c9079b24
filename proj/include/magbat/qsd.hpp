// qsd.hpp: one charger spin and one battery spin coupled through a magnon
// mode whose frequency carries Ornstein-Uhlenbeck noise, treated with the
// noise-averaged quantum-state-diffusion coefficient equations.

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace magbat::qsd {

using cplx = std::complex<double>;

struct QsdParams {
    double g{0.1};                     // spin-magnon coupling
    double omega{10.0};                // spin splitting
    double omega_m{11.0};              // magnon frequency
    double gamma_noise{0.0};           // Gamma, noise strength (>= 0)
    std::optional<double> memory_gamma;  // gamma, inverse memory time; empty = Markov limit

    double detuning() const noexcept { return omega_m - omega; }
    // G = g^2 / (omega - omega_m); sets the ideal charging period pi / |G|.
    double effective_coupling() const noexcept { return g * g / (omega - omega_m); }
    bool markov() const noexcept { return !memory_gamma.has_value(); }

    // Throws std::invalid_argument on negative Gamma, non-positive gamma,
    // non-finite values or omega == omega_m.
    void validate() const;
};

// (Gamma gamma / 2) exp(-gamma |t - s|). Needs a finite memory_gamma.
double ou_correlation(const QsdParams& params, double t, double s);

// g^2 exp(-i omega_m (t - s)) exp{-(Gamma/2)[(t - s) + (exp(-gamma (t - s)) - 1)/gamma]},
// with the bracket replaced by (t - s) in the Markov limit. Requires t >= s.
cplx bath_correlation(const QsdParams& params, double t, double s);

struct F12Solution {
    std::vector<double> times;
    std::vector<cplx> f1;
    std::vector<cplx> f2;
};

// Coupled F1, F2 equations from F1(0) = F2(0) = 0 (Markov limit only).
// The grid must start at 0. Throws magbat::NumericalError if |F| exceeds
// 1e6 g.
F12Solution solve_f12(const QsdParams& params, std::span<const double> times, double tol = 1e-10);

struct FSolution {
    std::vector<double> times;
    std::vector<cplx> f;         // F = F1 - F2
    std::vector<cplx> integral;  // int_0^t F(s) ds
    std::vector<cplx> a;         // |e,g> amplitude
    std::vector<cplx> b;         // |g,e> amplitude
    std::vector<double> energy;  // |b|^2, units of omega
};

// dF/dt = g^2 + (-i Delta - Gamma/2) F + 2 F^2 with its integral carried as
// a second ODE component. Same preconditions and errors as solve_f12.
FSolution solve_calF(const QsdParams& params, std::span<const double> times, double tol = 1e-10);

// Stored energy |b(t)|^2 in units of omega.
std::vector<double> qsd_energy(const FSolution& solution);

struct Maximum {
    double t;
    double value;
};

// Local maxima that also dominate a window of half a period on either side,
// so the fast detuning ripple is ignored. `period` is usually pi / |G|.
std::vector<Maximum> quasi_period_maxima(std::span<const double> times, std::span<const double> values,
                                         double period);

} // namespace magbat::qsd
