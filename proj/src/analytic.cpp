// analytic.cpp: closed-form charging solutions

#include "magbat/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace magbat::analytic {

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);
const cplx minus_i{0.0, -1.0};

double sq(double x) { return x * x; }

void require_coupling(double g_eff) {
    if (!(g_eff != 0.0) || !std::isfinite(g_eff)) throw std::invalid_argument("G must be finite and nonzero");
}

void require_chargers(int n) {
    if (n < 1) throw std::invalid_argument("need at least one charger");
}

} // namespace

TwoToOneSpectrum two_to_one_spectrum(double g_eff, double j) {
    if (g_eff == 0.0 && j == 0.0) throw std::invalid_argument("mixing angle undefined at G = J = 0");
    if (!std::isfinite(g_eff) || !std::isfinite(j)) throw std::invalid_argument("couplings must be finite");
    const double s = g_eff + j;
    const double root = std::sqrt(s * s + 8.0 * g_eff * g_eff);
    return {0.5 * std::atan2(2.0 * sqrt2 * g_eff, s), 0.5 * (s + root), 0.5 * (s - root)};
}

double energy_one_to_one(double g_eff, double t) { return sq(std::sin(std::abs(g_eff) * t)); }

double energy_two_to_one(double g_eff, double j, double t) {
    const TwoToOneSpectrum sp = two_to_one_spectrum(g_eff, j);
    return sq(std::sin(2.0 * sp.theta)) * (1.0 - std::cos((sp.eps_plus - sp.eps_minus) * t)) / 2.0;
}

double energy_n_to_one(double g_eff, int n_charger, double t) {
    require_chargers(n_charger);
    return sq(std::sin(std::sqrt(static_cast<double>(n_charger)) * std::abs(g_eff) * t));
}

double energy_two_to_two(double g_eff, double t) { return 2.0 * sq(std::sin(sqrt2 * std::abs(g_eff) * t)); }

ClosedFormMetrics metrics_one_to_one(double g_eff) { return metrics_n_to_one(g_eff, 1); }

ClosedFormMetrics metrics_two_to_one(double g_eff, double j) {
    const TwoToOneSpectrum sp = two_to_one_spectrum(g_eff, j);
    const double e_max = sq(std::sin(2.0 * sp.theta));
    if (e_max == 0.0) throw std::invalid_argument("no energy is transferred when G = 0");
    const double tau = pi / (sp.eps_plus - sp.eps_minus);
    return {e_max, tau, e_max / tau};
}

ClosedFormMetrics metrics_n_to_one(double g_eff, int n_charger) {
    require_coupling(g_eff);
    require_chargers(n_charger);
    const double tau = pi / (2.0 * std::sqrt(static_cast<double>(n_charger)) * std::abs(g_eff));
    return {1.0, tau, 1.0 / tau};
}

ClosedFormMetrics metrics_two_to_two(double g_eff) {
    require_coupling(g_eff);
    const double tau = pi / (2.0 * sqrt2 * std::abs(g_eff));
    return {2.0, tau, 2.0 / tau};
}

std::array<cplx, 3> state_two_to_one(double g_eff, double j, double t) {
    const TwoToOneSpectrum sp = two_to_one_spectrum(g_eff, j);
    const cplx plus = std::polar(1.0, -sp.eps_plus * t);
    const cplx minus = std::polar(1.0, -sp.eps_minus * t);
    const double s = std::sin(sp.theta);
    const double c = std::cos(sp.theta);
    const cplx moved = (plus - minus) * (std::sin(2.0 * sp.theta) / (2.0 * sqrt2));
    return {s * s * plus + c * c * minus, moved, moved};
}

Eigen::VectorXcd state_n_to_one(double g_eff, int n_charger, double t) {
    require_chargers(n_charger);
    const double phase = std::sqrt(static_cast<double>(n_charger)) * g_eff * t;
    Eigen::VectorXcd psi(2);
    psi << std::cos(phase), minus_i * std::sin(phase);
    return psi;
}

Eigen::VectorXcd state_two_to_two(double g_eff, double t) {
    const double phase = sqrt2 * g_eff * t;
    Eigen::VectorXcd psi(3);
    psi << sq(std::cos(phase)), minus_i * std::sin(2.0 * phase) / sqrt2, -sq(std::sin(phase));
    return psi;
}

} // namespace magbat::analytic
