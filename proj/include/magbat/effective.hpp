// effective.hpp: magnon-induced couplings from second-order perturbation
// theory and the dispersive spin-only Hamiltonian.

#pragma once

#include "magbat/hilbert.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace magbat {

// Induced couplings g_a g_b / (omega - omega_m) for every pair of spins.
// Diagonals of the intra-group matrices are zero.
struct EffectiveCouplings {
    Eigen::MatrixXd charger_battery;  // N x M
    Eigen::MatrixXd charger_charger;  // N x N
    Eigen::MatrixXd battery_battery;  // M x M
    double detuning{0.0};             // omega_m - omega
};

// sum_{w != p,q} <q|V|w><w|V|p> / (E_p - E_w) over the unperturbed
// eigenbasis. Throws DegenerateStateError if some w with a nonzero path
// amplitude has E_w == E_p, std::invalid_argument on bad indices.
cplx second_order_coupling(std::span<const double> unperturbed_energies,
                           const HamiltonianMatrix& interaction, std::size_t p, std::size_t q);

// Splits H into its diagonal (unperturbed energies) and off-diagonal part.
struct PerturbativeSplit {
    Eigen::VectorXd energies;
    HamiltonianMatrix interaction;
};
PerturbativeSplit split_diagonal(const HamiltonianMatrix& h);

// Throws std::invalid_argument when omega == omega_m.
EffectiveCouplings effective_couplings(const SystemConfig& config);

// Flip-flop Hamiltonian on a spin-only basis (cutoff 0): G_ik between charger
// and battery, G_ij + J_ij inside the charger, G_kl + J_kl inside the battery.
// Free-spin energies are constant in a sector and are dropped.
HamiltonianMatrix build_effective_hamiltonian(const SystemConfig& config, const SectorBasis& spin_basis);

// Spin-only sector with N excitations, the one holding |e>^N |g>^M.
SectorBasis effective_sector(const SystemConfig& config);

// J that cancels the induced intra-group coupling (J = -G). Requires every
// induced coupling to be equal; otherwise throws std::invalid_argument whose
// message lists the per-pair values -G_ij, -G_kl.
double sweet_spot_j(const EffectiveCouplings& couplings, double rel_tol = 1e-12);

// Message when max(|g|, |J|) exceeds ratio * |Delta|; empty when dispersive.
std::optional<std::string> dispersive_warning(const SystemConfig& config, double ratio = 0.2);

} // namespace magbat
