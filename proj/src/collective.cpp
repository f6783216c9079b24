// collective.cpp: Dicke-subspace reduction at the sweet spot

#include "magbat/collective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace magbat {

namespace {

bool is_half_integer(double x) {
    const double twice = 2.0 * x;
    return std::isfinite(x) && twice == std::round(twice);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

} // namespace

double ladder_matrix_element(double j, double m, Ladder direction) {
    if (!is_half_integer(j) || !is_half_integer(m) || j < 0.0) {
        throw std::invalid_argument("j and m must be non-negative half-integers");
    }
    if (std::abs(m) > j) throw std::invalid_argument("|m| exceeds j");
    if (std::round(j - m) != j - m) throw std::invalid_argument("j - m must be an integer");
    const double value = direction == Ladder::raising ? (j - m) * (j + m + 1.0) : (j + m) * (j - m + 1.0);
    return std::sqrt(value);
}

DickeBasis::DickeBasis(int n_charger, int m_battery, int n_excitations)
    : n_charger_(n_charger), m_battery_(m_battery), n_excitations_(n_excitations) {
    if (n_charger < 1 || m_battery < 1) throw std::invalid_argument("spin counts must be positive");
    if (n_excitations < 0 || n_excitations > n_charger + m_battery) {
        throw std::invalid_argument("empty collective sector");
    }
    const int hi = std::min(n_charger, n_excitations);
    const int lo = std::max(0, n_excitations - m_battery);
    for (int e = hi; e >= lo; --e) charger_excitations_.push_back(e);
}

DickeBasis::DickeBasis(int n_charger, int m_battery, int n_excitations, double j_charger, double j_battery)
    : DickeBasis(n_charger, m_battery, n_excitations) {
    if (j_charger != 0.5 * n_charger || j_battery != 0.5 * m_battery) {
        throw std::invalid_argument("only the maximal-j (fully symmetric) subspace is supported");
    }
}

std::optional<std::size_t> DickeBasis::index_of_charger_excitations(int e_c) const {
    if (charger_excitations_.empty()) return std::nullopt;
    const int hi = charger_excitations_.front();
    const int lo = charger_excitations_.back();
    if (e_c > hi || e_c < lo) return std::nullopt;
    return static_cast<std::size_t>(hi - e_c);
}

Eigen::VectorXd DickeBasis::battery_occupation_diagonal() const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(dimension()));
    for (std::size_t p = 0; p < dimension(); ++p) d(static_cast<Eigen::Index>(p)) = battery_excitations(p);
    return d;
}

HamiltonianMatrix build_collective_hamiltonian(double g_eff, const DickeBasis& basis) {
    HermitianBuilder builder(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t p = 0; p + 1 < basis.dimension(); ++p) {
        // p -> p + 1 moves one quantum from charger to battery.
        const double down = ladder_matrix_element(basis.j_charger(), basis.m_charger(p), Ladder::lowering);
        const double up = ladder_matrix_element(basis.j_battery(), basis.m_battery_value(p), Ladder::raising);
        builder.add_pair(static_cast<Eigen::Index>(p + 1), static_cast<Eigen::Index>(p), g_eff * down * up);
    }
    return builder.build();
}

Eigen::MatrixXd collective_ladder(int n_spins, Ladder direction) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be positive");
    const double j = 0.5 * n_spins;
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n_spins + 1, n_spins + 1);
    for (int p = 0; p <= n_spins; ++p) {
        const double m = j - p;
        const int target = direction == Ladder::raising ? p - 1 : p + 1;
        if (target < 0 || target > n_spins) continue;
        op(target, p) = ladder_matrix_element(j, m, direction);
    }
    return op;
}

Eigen::MatrixXd collective_jz(int n_spins) {
    if (n_spins < 1) throw std::invalid_argument("n_spins must be positive");
    Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n_spins + 1, n_spins + 1);
    for (int p = 0; p <= n_spins; ++p) op(p, p) = 0.5 * n_spins - p;
    return op;
}

StateVector dicke_embed(const DickeBasis& basis, const Eigen::VectorXcd& amplitudes,
                        const SectorBasis& spin_basis) {
    if (amplitudes.size() != static_cast<Eigen::Index>(basis.dimension())) {
        throw std::invalid_argument("amplitude vector does not match the Dicke basis");
    }
    if (spin_basis.n_charger() != basis.n_charger() || spin_basis.m_battery() != basis.m_battery() ||
        spin_basis.n_excitations() != basis.n_excitations()) {
        throw std::invalid_argument("spin basis does not match the Dicke basis");
    }
    StateVector out{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(spin_basis.dimension())), spin_basis};
    for (std::size_t p = 0; p < spin_basis.dimension(); ++p) {
        const OccupationLabel& l = spin_basis.label(p);
        if (l.magnons != 0) continue;
        const int e_c = std::popcount(l.charger);
        const int e_b = std::popcount(l.battery);
        auto idx = basis.index_of_charger_excitations(e_c);
        if (!idx) continue;
        const double weight = binomial(basis.n_charger(), e_c) * binomial(basis.m_battery(), e_b);
        out.amplitudes(static_cast<Eigen::Index>(p)) =
            amplitudes(static_cast<Eigen::Index>(*idx)) / std::sqrt(weight);
    }
    return out;
}

StateVector dicke_charged_state(const DickeBasis& basis) {
    if (basis.n_excitations() != basis.n_charger()) {
        throw std::invalid_argument("charged collective state needs n_excitations == N");
    }
    StateVector psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension())), std::nullopt};
    psi.amplitudes(0) = 1.0;
    return psi;
}

} // namespace magbat
