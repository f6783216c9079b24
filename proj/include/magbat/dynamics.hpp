// dynamics.hpp: unitary propagation, battery energy / average power
// trajectories, and charging metrics.

#pragma once

#include "magbat/hilbert.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace magbat {

enum class Propagator { automatic, eigen, integrator };

struct EvolveOptions {
    double tol{1e-10};                 // local error bound for the integrator path
    std::size_t eig_threshold{2048};   // dimensions up to this use eigendecomposition
    Propagator method{Propagator::automatic};
};

// n + 1 equally spaced times on [0, t_end].
std::vector<double> uniform_grid(double t_end, std::size_t samples);

// Horizon for metric runs: 1.2 pi / (sqrt(max(N, M)) |G|).
double default_horizon(int n_charger, int m_battery, double g_eff);

using StateObserver = std::function<void(std::size_t index, double t, const Eigen::VectorXcd& psi)>;

// Calls `observe` with psi(t) = exp(-i H t) psi0 at every grid time. The grid
// must start at t >= 0 and be non-decreasing. Throws std::invalid_argument for
// a non-Hermitian H, a dimension mismatch, or |psi0| off unity by > 1e-12.
void propagate(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
               const EvolveOptions& options, const StateObserver& observe);

std::vector<Eigen::VectorXcd> evolve_states(const HamiltonianMatrix& h, const StateVector& psi0,
                                            std::span<const double> times,
                                            const EvolveOptions& options = {});

// Diagonal observables sampled along a trajectory.
struct Observables {
    Eigen::VectorXd battery;                 // battery excitations per basis state
    std::optional<Eigen::VectorXd> magnons;  // magnon number, when the basis has one
};
Observables observables_for(const SectorBasis& basis);

// E in units of omega, P = E / t in units of omega per unit time (P(0) = 0).
// Divide P by |G| for the usual |G| omega units.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> power;
    std::vector<double> norm;
    std::vector<double> magnons;  // empty when not tracked
};

Trajectory evolve(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
                  const Observables& observables, const EvolveOptions& options = {});

// Uses the basis bound to h (which must exist).
Trajectory evolve(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
                  const EvolveOptions& options = {});

struct ChargingMetrics {
    double e_max{0.0};  // units of omega
    double tau{0.0};    // first time E reaches e_max
    double p_tau{0.0};  // e_max / tau
    double p_max{0.0};  // max of E(t)/t on (0, tau]
    bool interior_maximum{true};  // false: no interior peak, endpoint values returned
};

// Peaks are refined by a parabola through the three samples around each grid
// maximum. Among refined peaks within `tie_tol` of the largest, the earliest
// wins. A trajectory without an interior peak is flagged and reports the
// endpoint instead.
ChargingMetrics charging_metrics(const Trajectory& trajectory, double tie_tol = 1e-9);

// <H_B> including the intra-battery exchange, in absolute energy units:
// omega sum_k <n_k> + sum_{k<l} J_kl <sigma+_k sigma-_l + h.c.>.
double battery_energy_full(const StateVector& psi, const SectorBasis& basis, const SystemConfig& config);

// <psi|A|psi> for a Hermitian A.
double expectation(const HamiltonianMatrix& a, const Eigen::VectorXcd& psi);

} // namespace magbat
