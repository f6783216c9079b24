// analytic.hpp: closed-form charging curves and states for the small
// configurations with exact solutions. Energies are in units of omega, g_eff
// is the signed induced coupling G and j the direct intra-charger coupling.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace magbat::analytic {

using cplx = std::complex<double>;

// Two chargers, one battery. theta is taken from atan2(2 sqrt2 G, G + J) / 2,
// which keeps the eigenvector assignment right when G + J < 0.
struct TwoToOneSpectrum {
    double theta{0.0};
    double eps_plus{0.0};
    double eps_minus{0.0};
};
// Throws std::invalid_argument when G = J = 0.
TwoToOneSpectrum two_to_one_spectrum(double g_eff, double j);

// Maximum, first time it is reached, and e_max / tau (omega per unit time).
struct ClosedFormMetrics {
    double e_max{0.0};
    double tau{0.0};
    double p_tau{0.0};
};

// sin^2(|G| t)
double energy_one_to_one(double g_eff, double t);
// sin^2(2 theta) (1 - cos((eps+ - eps-) t)) / 2
double energy_two_to_one(double g_eff, double j, double t);
// Sweet spot, N chargers: sin^2(sqrt(N) |G| t). Throws for N < 1.
double energy_n_to_one(double g_eff, int n_charger, double t);
// Sweet spot, two chargers and two batteries: 2 sin^2(sqrt2 |G| t).
double energy_two_to_two(double g_eff, double t);

ClosedFormMetrics metrics_one_to_one(double g_eff);
ClosedFormMetrics metrics_two_to_one(double g_eff, double j);
ClosedFormMetrics metrics_n_to_one(double g_eff, int n_charger);
ClosedFormMetrics metrics_two_to_two(double g_eff);

// Amplitudes on {|e,e;g>, |e,g;e>, |g,e;e>} starting from |e,e;g>.
std::array<cplx, 3> state_two_to_one(double g_eff, double j, double t);

// Sweet spot N-to-one in the collective basis {|N/2, N/2>|1/2,-1/2>,
// |N/2, N/2-1>|1/2, 1/2>}: (cos(sqrt(N) G t), -i sin(sqrt(N) G t)).
Eigen::VectorXcd state_n_to_one(double g_eff, int n_charger, double t);

// Sweet spot two-to-two in the collective basis with m_C = 1, 0, -1:
// (cos^2(sqrt2 G t), -i sin(2 sqrt2 G t) / sqrt2, -sin^2(sqrt2 G t)).
Eigen::VectorXcd state_two_to_two(double g_eff, double t);

} // namespace magbat::analytic
