// effective.cpp: dispersive elimination of the magnon mode

#include "magbat/effective.hpp"
#include "magbat/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace magbat {

cplx second_order_coupling(std::span<const double> energies, const HamiltonianMatrix& interaction,
                           std::size_t p, std::size_t q) {
    const auto dim = static_cast<std::size_t>(interaction.dimension());
    if (energies.size() != dim) {
        throw std::invalid_argument("energy list does not match the interaction dimension");
    }
    if (p >= dim || q >= dim) throw std::invalid_argument("state index out of range");
    if (p == q) throw std::invalid_argument("second_order_coupling needs p != q");

    const auto& v = interaction.matrix();
    const double e_p = energies[p];
    double scale = std::abs(e_p);
    for (double e : energies) scale = std::max(scale, std::abs(e));
    const double degeneracy_tol = 1e-12 * std::max(scale, 1.0);

    cplx sum{0.0, 0.0};
    // Row p of a Hermitian V gives <p|V|w> = conj(<w|V|p>).
    for (HamiltonianMatrix::Sparse::InnerIterator it(v, static_cast<Eigen::Index>(p)); it; ++it) {
        const auto w = static_cast<std::size_t>(it.col());
        if (w == p || w == q) continue;
        const cplx w_from_p = std::conj(it.value());
        const cplx q_from_w = v.coeff(static_cast<Eigen::Index>(q), it.col());
        const cplx numerator = q_from_w * w_from_p;
        if (numerator == cplx{}) continue;
        const double gap = e_p - energies[w];
        if (std::abs(gap) <= degeneracy_tol) {
            throw DegenerateStateError("intermediate state " + std::to_string(w) +
                                       " is degenerate with state " + std::to_string(p));
        }
        sum += numerator / gap;
    }
    return sum;
}

PerturbativeSplit split_diagonal(const HamiltonianMatrix& h) {
    HermitianBuilder off(h.dimension());
    const auto& m = h.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        for (HamiltonianMatrix::Sparse::InnerIterator it(m, r); it; ++it) {
            if (it.row() < it.col()) off.add_pair(it.row(), it.col(), it.value());
        }
    }
    return {h.real_diagonal(), off.build(h.basis())};
}

EffectiveCouplings effective_couplings(const SystemConfig& config) {
    config.validate();
    const double denom = config.omega - config.omega_m;
    const int n = config.n_charger;
    const int m = config.m_battery;

    EffectiveCouplings out;
    out.detuning = config.detuning();
    out.charger_battery.resize(n, m);
    out.charger_charger = Eigen::MatrixXd::Zero(n, n);
    out.battery_battery = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            out.charger_battery(i, k) = config.g_charger[i] * config.g_battery[k] / denom;
        }
        for (int j = 0; j < n; ++j) {
            if (i != j) out.charger_charger(i, j) = config.g_charger[i] * config.g_charger[j] / denom;
        }
    }
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
            if (k != l) out.battery_battery(k, l) = config.g_battery[k] * config.g_battery[l] / denom;
        }
    }
    return out;
}

SectorBasis effective_sector(const SystemConfig& config) {
    return enumerate_sector_basis(config.n_charger, config.m_battery, 0, config.n_charger);
}

HamiltonianMatrix build_effective_hamiltonian(const SystemConfig& config, const SectorBasis& basis) {
    const EffectiveCouplings c = effective_couplings(config);
    if (basis.n_charger() != config.n_charger || basis.m_battery() != config.m_battery) {
        throw std::invalid_argument("basis was built for a different (N, M) than the config");
    }
    if (basis.cutoff() != 0) {
        throw std::invalid_argument("effective Hamiltonian acts on a spin-only basis (cutoff 0)");
    }

    const int n = config.n_charger;
    const int m = config.m_battery;
    const int total = n + m;
    // Spin s < n is charger spin s, otherwise battery spin s - n.
    auto coupling = [&](int a, int b) -> double {
        if (a < n && b < n) return c.charger_charger(a, b) + config.j_charger(a, b);
        if (a >= n && b >= n) return c.battery_battery(a - n, b - n) + config.j_battery(a - n, b - n);
        if (a < n) return c.charger_battery(a, b - n);
        return c.charger_battery(b, a - n);
    };
    auto bit = [&](int s) -> std::pair<bool, std::uint64_t> {
        if (s < n) return {true, std::uint64_t{1} << (n - 1 - s)};
        return {false, std::uint64_t{1} << (m - 1 - (s - n))};
    };
    auto excited = [&](const OccupationLabel& l, int s) {
        return s < n ? basis.charger_excited(l, s) : basis.battery_excited(l, s - n);
    };

    HermitianBuilder builder(static_cast<Eigen::Index>(basis.dimension()));
    const auto labels = basis.labels();
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const OccupationLabel& l = labels[p];
        for (int a = 0; a < total; ++a) {
            if (!excited(l, a)) continue;
            // Each connected pair of labels is reached once, from the side
            // where the lower-index spin of the hopping pair is excited.
            for (int b = a + 1; b < total; ++b) {
                if (excited(l, b)) continue;
                const double value = coupling(a, b);
                if (value == 0.0) continue;
                OccupationLabel t = l;
                for (int s : {a, b}) {
                    auto [in_charger, mask] = bit(s);
                    (in_charger ? t.charger : t.battery) ^= mask;
                }
                if (auto q = basis.index_of(t)) {
                    builder.add_pair(static_cast<Eigen::Index>(*q), static_cast<Eigen::Index>(p), value);
                }
            }
        }
    }
    return builder.build(basis);
}

double sweet_spot_j(const EffectiveCouplings& couplings, double rel_tol) {
    std::optional<double> g;
    bool uniform = true;
    auto visit = [&](const Eigen::MatrixXd& mat, bool skip_diagonal) {
        for (Eigen::Index a = 0; a < mat.rows(); ++a) {
            for (Eigen::Index b = 0; b < mat.cols(); ++b) {
                if (skip_diagonal && a == b) continue;
                const double x = mat(a, b);
                if (!g) {
                    g = x;
                } else if (std::abs(x - *g) > rel_tol * std::max(std::abs(x), std::abs(*g))) {
                    uniform = false;
                }
            }
        }
    };
    visit(couplings.charger_battery, false);
    visit(couplings.charger_charger, true);
    visit(couplings.battery_battery, true);
    if (!g) throw std::invalid_argument("no couplings to balance");
    if (!uniform) {
        std::ostringstream msg;
        msg << "couplings are not uniform, no single sweet spot; per-pair J = -G:";
        auto dump = [&](const char* name, const Eigen::MatrixXd& mat) {
            for (Eigen::Index a = 0; a < mat.rows(); ++a) {
                for (Eigen::Index b = a + 1; b < mat.cols(); ++b) {
                    msg << ' ' << name << '(' << a << ',' << b << ")=" << -mat(a, b);
                }
            }
        };
        dump("J_charger", couplings.charger_charger);
        dump("J_battery", couplings.battery_battery);
        throw std::invalid_argument(msg.str());
    }
    return *g == 0.0 ? 0.0 : -*g;
}

std::optional<std::string> dispersive_warning(const SystemConfig& config, double ratio) {
    const double delta = std::abs(config.detuning());
    double largest = 0.0;
    for (double g : config.g_charger) largest = std::max(largest, std::abs(g));
    for (double g : config.g_battery) largest = std::max(largest, std::abs(g));
    largest = std::max(largest, config.j_charger.size() ? config.j_charger.cwiseAbs().maxCoeff() : 0.0);
    largest = std::max(largest, config.j_battery.size() ? config.j_battery.cwiseAbs().maxCoeff() : 0.0);
    if (largest <= ratio * delta) return std::nullopt;
    std::ostringstream msg;
    msg << "outside the dispersive regime: max(|g|, |J|) = " << largest << " exceeds " << ratio
        << " * |Delta| = " << ratio * delta << "; the effective model may drift from the full one";
    return msg.str();
}

} // namespace magbat
