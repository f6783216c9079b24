// collective.hpp: charger and battery as collective angular momenta in the
// fully symmetric (maximal j) Dicke subspace.

#pragma once

#include "magbat/hilbert.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace magbat {

enum class Ladder { raising, lowering };

// <j, m +- 1| J_+- |j, m> = sqrt((j -+ m)(j +- m + 1)); zero past the edge.
// j and m must be half-integers with j - m integral and |m| <= j.
double ladder_matrix_element(double j, double m, Ladder direction);

// Product Dicke states |j_C, m_C> |j_B, m_B> with j_C = N/2, j_B = M/2 and a
// fixed excitation count n = (m_C + N/2) + (m_B + M/2). Ordered by m_C
// descending, so the charged state |N/2, -M/2> (when n = N) comes first.
class DickeBasis {
public:
    DickeBasis(int n_charger, int m_battery, int n_excitations);
    // Explicit spins; anything below the maximal j = N/2, M/2 is rejected.
    DickeBasis(int n_charger, int m_battery, int n_excitations, double j_charger, double j_battery);

    int n_charger() const noexcept { return n_charger_; }
    int m_battery() const noexcept { return m_battery_; }
    int n_excitations() const noexcept { return n_excitations_; }
    double j_charger() const noexcept { return 0.5 * n_charger_; }
    double j_battery() const noexcept { return 0.5 * m_battery_; }

    std::size_t dimension() const noexcept { return charger_excitations_.size(); }
    int charger_excitations(std::size_t index) const { return charger_excitations_.at(index); }
    int battery_excitations(std::size_t index) const { return n_excitations_ - charger_excitations(index); }
    double m_charger(std::size_t index) const { return charger_excitations(index) - j_charger(); }
    double m_battery_value(std::size_t index) const { return battery_excitations(index) - j_battery(); }
    std::optional<std::size_t> index_of_charger_excitations(int e_c) const;

    Eigen::VectorXd battery_occupation_diagonal() const;

private:
    int n_charger_;
    int m_battery_;
    int n_excitations_;
    std::vector<int> charger_excitations_;
};

// G (J-_C J+_B + J+_C J-_B). Only meaningful at the sweet spot G + J = 0,
// where the intra-group terms cancel.
HamiltonianMatrix build_collective_hamiltonian(double g_eff, const DickeBasis& basis);

// Single-group collective operators on |j, m>, m = j, j-1, ..., -j
// (dimension n_spins + 1, index 0 is m = j).
Eigen::MatrixXd collective_ladder(int n_spins, Ladder direction);
Eigen::MatrixXd collective_jz(int n_spins);

// Expands Dicke amplitudes into the spin basis: |j, m> becomes the equal
// superposition of the C(N, j + m) strings with j + m excitations.
// spin_basis must carry the same N, M and excitation number; labels with
// magnons get zero weight.
StateVector dicke_embed(const DickeBasis& basis, const Eigen::VectorXcd& amplitudes,
                        const SectorBasis& spin_basis);

// |N/2, N/2>|M/2, -M/2> as a collective state (requires n_excitations == N).
StateVector dicke_charged_state(const DickeBasis& basis);

} // namespace magbat
