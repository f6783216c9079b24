// dynamics.cpp: Schrodinger propagation and charging metrics

#include "magbat/dynamics.hpp"
#include "magbat/error.hpp"
#include "magbat/ode.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace magbat {

namespace {

constexpr double norm_tolerance = 1e-12;

void check_inputs(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times) {
    if (h.dimension() != psi0.dimension()) {
        throw std::invalid_argument("state dimension " + std::to_string(psi0.dimension()) +
                                    " does not match Hamiltonian dimension " + std::to_string(h.dimension()));
    }
    double scale = 1.0;
    for (Eigen::Index k = 0; k < h.matrix().nonZeros(); ++k) {
        scale = std::max(scale, std::abs(h.matrix().valuePtr()[k]));
    }
    if (!h.is_hermitian(1e-12 * scale)) throw std::invalid_argument("Hamiltonian is not Hermitian");
    if (std::abs(psi0.norm() - 1.0) > norm_tolerance) {
        throw std::invalid_argument("initial state is not normalized (norm " + std::to_string(psi0.norm()) + ")");
    }
    if (!times.empty() && !(times.front() >= 0.0)) throw std::invalid_argument("time grid must start at t >= 0");
    if (!std::is_sorted(times.begin(), times.end())) throw std::invalid_argument("time grid must be non-decreasing");
    for (double t : times) {
        if (!std::isfinite(t)) throw std::invalid_argument("time grid contains a non-finite value");
    }
}

template <typename Solver>
void propagate_spectral(const Solver& solver, const Eigen::VectorXcd& psi0, std::span<const double> times,
                        const StateObserver& observe) {
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition did not converge");
    const auto& vectors = solver.eigenvectors();
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::VectorXcd coeffs = vectors.adjoint() * psi0;
    Eigen::VectorXcd phased(coeffs.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        const double t = times[n];
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            phased(k) = coeffs(k) * std::polar(1.0, -values(k) * t);
        }
        const Eigen::VectorXcd psi = vectors * phased;
        observe(n, t, psi);
    }
}

void propagate_integrator(const HamiltonianMatrix& h, const Eigen::VectorXcd& psi0, std::span<const double> times,
                          double tol, const StateObserver& observe) {
    // Remove the mean diagonal as a global phase to keep the integrated
    // oscillation slow; it is restored on output.
    const double shift = h.dimension() > 0 ? h.real_diagonal().mean() : 0.0;
    HamiltonianMatrix::Sparse shifted = h.matrix();
    for (Eigen::Index p = 0; p < h.dimension(); ++p) shifted.coeffRef(p, p) -= shift;
    shifted.makeCompressed();

    const cplx minus_i{0.0, -1.0};
    auto rhs = [&](const ode::State& x, ode::State& dx, double) {
        const Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXcd> dv(dx.data(), static_cast<Eigen::Index>(dx.size()));
        dv.noalias() = minus_i * (shifted * xv);
    };
    ode::State x(psi0.data(), psi0.data() + psi0.size());
    const double t0 = times.empty() ? 0.0 : times.front();
    if (t0 > 0.0) {
        // The grid does not start at 0: integrate up to it first.
        const double head[2] = {0.0, t0};
        ode::integrate_on_grid(rhs, x, head, tol, [&](std::size_t i, double, const ode::State& s) {
            if (i == 1) x = s;
        });
    }
    Eigen::VectorXcd psi(psi0.size());
    ode::integrate_on_grid(rhs, x, times, tol, [&](std::size_t i, double t, const ode::State& s) {
        const cplx phase = std::polar(1.0, -shift * t);
        for (std::size_t k = 0; k < s.size(); ++k) psi(static_cast<Eigen::Index>(k)) = s[k] * phase;
        observe(i, t, psi);
    });
}

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2), clamped to the
// bracket. Returns the middle sample when the points are collinear.
std::pair<double, double> parabola_peak(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d0 = x0 - x1;
    const double d2 = x2 - x1;
    const double s0 = (y0 - y1) / d0;
    const double s2 = (y2 - y1) / d2;
    const double curvature = (s2 - s0) / (d2 - d0);  // a in y = y1 + b u + a u^2
    if (!(curvature < 0.0)) return {x1, y1};
    const double slope = s0 - curvature * d0;
    double u = -slope / (2.0 * curvature);
    u = std::clamp(u, d0, d2);
    return {x1 + u, y1 + slope * u + curvature * u * u};
}

struct Peak {
    double t;
    double value;
};

std::vector<Peak> refined_peaks(std::span<const double> t, std::span<const double> y, std::size_t last) {
    std::vector<Peak> peaks;
    for (std::size_t i = 1; i < last; ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            auto [tp, vp] = parabola_peak(t[i - 1], y[i - 1], t[i], y[i], t[i + 1], y[i + 1]);
            peaks.push_back({tp, std::max(vp, y[i])});
        }
    }
    return peaks;
}

} // namespace

std::vector<double> uniform_grid(double t_end, std::size_t samples) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("time horizon must be positive");
    if (samples < 1) throw std::invalid_argument("need at least one sampling interval");
    std::vector<double> grid(samples + 1);
    for (std::size_t i = 0; i <= samples; ++i) {
        grid[i] = t_end * static_cast<double>(i) / static_cast<double>(samples);
    }
    return grid;
}

double default_horizon(int n_charger, int m_battery, double g_eff) {
    if (n_charger < 1 || m_battery < 1) throw std::invalid_argument("spin counts must be positive");
    if (!(g_eff != 0.0) || !std::isfinite(g_eff)) throw std::invalid_argument("effective coupling must be nonzero");
    return 1.2 * std::numbers::pi / (std::sqrt(static_cast<double>(std::max(n_charger, m_battery))) * std::abs(g_eff));
}

void propagate(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
               const EvolveOptions& options, const StateObserver& observe) {
    check_inputs(h, psi0, times);
    if (times.empty()) return;
    bool use_eigen = static_cast<std::size_t>(h.dimension()) <= options.eig_threshold;
    if (options.method == Propagator::eigen) use_eigen = true;
    if (options.method == Propagator::integrator) use_eigen = false;

    if (!use_eigen) {
        propagate_integrator(h, psi0.amplitudes, times, options.tol, observe);
    } else if (h.is_real()) {
        const Eigen::MatrixXd dense = h.dense().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
        propagate_spectral(solver, psi0.amplitudes, times, observe);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.dense());
        propagate_spectral(solver, psi0.amplitudes, times, observe);
    }
}

std::vector<Eigen::VectorXcd> evolve_states(const HamiltonianMatrix& h, const StateVector& psi0,
                                            std::span<const double> times, const EvolveOptions& options) {
    std::vector<Eigen::VectorXcd> out(times.size());
    propagate(h, psi0, times, options, [&](std::size_t i, double, const Eigen::VectorXcd& psi) { out[i] = psi; });
    return out;
}

Observables observables_for(const SectorBasis& basis) {
    return {battery_occupation_diagonal(basis), magnon_occupation_diagonal(basis)};
}

Trajectory evolve(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
                  const Observables& observables, const EvolveOptions& options) {
    if (observables.battery.size() != h.dimension() ||
        (observables.magnons && observables.magnons->size() != h.dimension())) {
        throw std::invalid_argument("observable diagonal does not match Hamiltonian dimension");
    }
    Trajectory traj;
    const std::size_t n = times.size();
    traj.times.assign(times.begin(), times.end());
    traj.energy.resize(n);
    traj.power.resize(n);
    traj.norm.resize(n);
    if (observables.magnons) traj.magnons.resize(n);

    propagate(h, psi0, times, options, [&](std::size_t i, double t, const Eigen::VectorXcd& psi) {
        const Eigen::VectorXd prob = psi.cwiseAbs2();
        traj.norm[i] = std::sqrt(prob.sum());
        traj.energy[i] = prob.dot(observables.battery);
        traj.power[i] = t > 0.0 ? traj.energy[i] / t : 0.0;
        if (observables.magnons) traj.magnons[i] = prob.dot(*observables.magnons);
    });
    return traj;
}

Trajectory evolve(const HamiltonianMatrix& h, const StateVector& psi0, std::span<const double> times,
                  const EvolveOptions& options) {
    if (!h.basis()) throw std::invalid_argument("Hamiltonian carries no basis; pass observables explicitly");
    return evolve(h, psi0, times, observables_for(*h.basis()), options);
}

ChargingMetrics charging_metrics(const Trajectory& trajectory, double tie_tol) {
    const auto& t = trajectory.times;
    const auto& e = trajectory.energy;
    if (t.size() != e.size() || t.size() < 2) throw std::invalid_argument("trajectory needs at least two samples");

    ChargingMetrics m;
    const std::vector<Peak> peaks = refined_peaks(t, e, t.size() - 1);
    if (peaks.empty()) {
        m.interior_maximum = false;
        m.tau = t.back();
        m.e_max = e.back();
        m.p_tau = m.tau > 0.0 ? m.e_max / m.tau : 0.0;
        m.p_max = m.p_tau;
        return m;
    }

    double best = peaks.front().value;
    for (const Peak& p : peaks) best = std::max(best, p.value);
    const double tie = tie_tol * std::max(1.0, std::abs(best));
    for (const Peak& p : peaks) {
        if (p.value >= best - tie) {
            m.tau = p.t;
            m.e_max = p.value;
            break;
        }
    }
    m.p_tau = m.e_max / m.tau;

    // P on (0, tau]: grid samples up to tau, refined at its own interior peaks.
    std::size_t last = 0;
    while (last + 1 < t.size() && t[last + 1] <= m.tau) ++last;
    const auto& p = trajectory.power;
    m.p_max = m.p_tau;
    for (std::size_t i = 1; i <= last; ++i) m.p_max = std::max(m.p_max, p[i]);
    if (last >= 2) {
        for (const Peak& q : refined_peaks(t, p, last)) {
            if (q.t > 0.0 && q.t <= m.tau) m.p_max = std::max(m.p_max, q.value);
        }
    }
    return m;
}

double battery_energy_full(const StateVector& psi, const SectorBasis& basis, const SystemConfig& config) {
    if (psi.dimension() != static_cast<Eigen::Index>(basis.dimension())) {
        throw std::invalid_argument("state does not match basis");
    }
    const int m = basis.m_battery();
    if (config.m_battery != m) throw std::invalid_argument("config battery size does not match basis");
    double local = 0.0;
    double exchange = 0.0;
    for (std::size_t p = 0; p < basis.dimension(); ++p) {
        const cplx amp = psi.amplitudes(static_cast<Eigen::Index>(p));
        if (amp == cplx{}) continue;
        const OccupationLabel& l = basis.label(p);
        local += std::norm(amp) * basis.battery_excitations(l);
        if (config.j_battery.size() == 0) continue;
        for (int k = 0; k < m; ++k) {
            for (int q = k + 1; q < m; ++q) {
                const double j = config.j_battery(k, q);
                if (j == 0.0 || basis.battery_excited(l, k) == basis.battery_excited(l, q)) continue;
                OccupationLabel flipped = l;
                flipped.battery ^= (std::uint64_t{1} << (m - 1 - k)) | (std::uint64_t{1} << (m - 1 - q));
                if (auto idx = basis.index_of(flipped)) {
                    exchange += j * (std::conj(psi.amplitudes(static_cast<Eigen::Index>(*idx))) * amp).real();
                }
            }
        }
    }
    return config.omega * local + exchange;
}

double expectation(const HamiltonianMatrix& a, const Eigen::VectorXcd& psi) {
    if (a.dimension() != psi.size()) throw std::invalid_argument("operator and state dimensions differ");
    return psi.dot(a.matrix() * psi).real();
}

} // namespace magbat
