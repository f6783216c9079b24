// experiment.cpp: experiment orchestration and CSV emission

#include "magbat/experiment.hpp"
#include "magbat/analytic.hpp"
#include "magbat/collective.hpp"
#include "magbat/effective.hpp"
#include "magbat/error.hpp"
#include "magbat/qsd.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace magbat {

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_header(std::ostream& out, const ExperimentSpec& spec) {
    out << "# magbat " << tool_version() << '\n';
    for (const std::string& line : spec.echo) out << "# " << line << '\n';
}

bool at_sweet_spot(const SystemConfig& c) {
    const double g_eff = reference_coupling(c);
    auto ok = [&](const Eigen::MatrixXd& j) {
        for (Eigen::Index a = 0; a < j.rows(); ++a) {
            for (Eigen::Index b = a + 1; b < j.cols(); ++b) {
                if (std::abs(j(a, b) + g_eff) > 1e-12 * std::abs(g_eff)) return false;
            }
        }
        return true;
    };
    return ok(c.j_charger) && ok(c.j_battery);
}

Trajectory closed_form(const SystemConfig& c, std::span<const double> times) {
    if (!c.has_uniform_couplings()) throw std::invalid_argument("closed forms need uniform couplings");
    const double g_eff = reference_coupling(c);
    const int n = c.n_charger;
    const int m = c.m_battery;
    std::function<double(double)> energy;
    if (n == 1 && m == 1) {
        energy = [=](double t) { return analytic::energy_one_to_one(g_eff, t); };
    } else if (n == 2 && m == 1) {
        const double j = c.j_charger(0, 1);
        energy = [=](double t) { return analytic::energy_two_to_one(g_eff, j, t); };
    } else if (m == 1 && at_sweet_spot(c)) {
        energy = [=](double t) { return analytic::energy_n_to_one(g_eff, n, t); };
    } else if (n == 2 && m == 2 && at_sweet_spot(c)) {
        energy = [=](double t) { return analytic::energy_two_to_two(g_eff, t); };
    } else {
        throw std::invalid_argument("no closed form for N=" + std::to_string(n) + ", M=" + std::to_string(m) +
                                    " at these couplings");
    }
    Trajectory traj;
    traj.times.assign(times.begin(), times.end());
    for (double t : times) {
        const double e = energy(t);
        traj.energy.push_back(e);
        traj.power.push_back(t > 0.0 ? e / t : 0.0);
        traj.norm.push_back(1.0);
    }
    return traj;
}

std::vector<double> grid_for(const ExperimentSpec& spec, const SystemConfig& c) {
    const double g_eff = reference_coupling(c);
    return uniform_grid(spec.horizon.resolve(c.n_charger, c.m_battery, g_eff), spec.samples);
}

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// failure by index is rethrown after all workers stop.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed = true;
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n = std::max<std::size_t>(1, std::min(threads, count));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct SweepPoint {
    int n;
    int m;
    CouplingChoice j;
    Model model;
};

std::string describe(const ExperimentSpec& spec, const SweepPoint& p) {
    const double j = resolve_j(p.j, spec.g_uniform, spec.system.omega, spec.system.omega_m);
    return "sweep point N=" + std::to_string(p.n) + ", M=" + std::to_string(p.m) + ", J=" + num(j) +
           (p.j.sweet ? " (sweet)" : "") + ", model=" + std::string(to_string(p.model));
}

std::vector<SweepPoint> sweep_grid(const ExperimentSpec& spec) {
    const SweepSpec& sw = spec.sweep;
    std::vector<SweepPoint> points;
    auto add = [&](int n, int m, const CouplingChoice& j) {
        for (Model model : sw.models) {
            if (model == Model::full && sw.full_max_n && n > *sw.full_max_n) continue;
            points.push_back({n, m, j, model});
        }
    };
    switch (spec.mode) {
    case Mode::sweep_n:
        for (const auto& j : sw.j_values) for (int n : sw.n_values) add(n, spec.system.m_battery, j);
        break;
    case Mode::sweep_nm:
        for (const auto& j : sw.j_values) for (int r : sw.ratios) for (int m : sw.m_values) add(r * m, m, j);
        break;
    case Mode::sweep_j:
        for (const auto& j : sw.j_values) add(spec.system.n_charger, spec.system.m_battery, j);
        break;
    default:
        throw std::invalid_argument("not a sweep mode");
    }
    return points;
}

std::string curves_path(const std::string& path) {
    std::filesystem::path p(path);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + "_curves.csv")).string();
}

void write_trajectory(std::ostream& out, const Trajectory& traj, double g_eff) {
    out << "t,E_over_omega,P_over_Gomega,norm,n_magnon\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << num(traj.times[i]) << ',' << num(traj.energy[i]) << ',' << num(traj.power[i] / std::abs(g_eff)) << ','
            << num(traj.norm[i]) << ','
            << (traj.magnons.empty() ? std::string("nan") : num(traj.magnons[i])) << '\n';
    }
}

void write_compare(std::ostream& out, const ExperimentSpec& spec) {
    const SystemConfig& c = spec.system;
    const std::vector<double> times = grid_for(spec, c);
    const double g_eff = std::abs(reference_coupling(c));
    const Trajectory full = simulate_model(Model::full, c, times, spec.evolve);
    const Trajectory eff = simulate_model(Model::effective, c, times, spec.evolve);
    Trajectory exact;
    bool has_exact = true;
    try {
        exact = closed_form(c, times);
    } catch (const std::invalid_argument&) {
        has_exact = false;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << "t,E_full,E_effective,E_analytic,P_full,P_effective,P_analytic\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << num(times[i]) << ',' << num(full.energy[i]) << ',' << num(eff.energy[i]) << ','
            << num(has_exact ? exact.energy[i] : nan) << ',' << num(full.power[i] / g_eff) << ','
            << num(eff.power[i] / g_eff) << ',' << num(has_exact ? exact.power[i] / g_eff : nan) << '\n';
    }
}

void write_qsd(std::ostream& out, const ExperimentSpec& spec) {
    const double delta = std::abs(spec.system.detuning());
    const bool several = spec.noise_strengths.size() > 1;
    out << (several ? "Gamma_over_delta," : "") << "t,Re_F,Im_F,E_over_omega\n";
    for (double gamma : spec.noise_strengths) {
        const qsd::QsdParams params = qsd_params(spec, gamma);
        const double g_eff = params.effective_coupling();
        const std::vector<double> times = uniform_grid(spec.horizon.resolve(1, 1, g_eff), spec.samples);
        const qsd::FSolution sol = qsd::solve_calF(params, times, spec.evolve.tol);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (several) out << num(gamma / delta) << ',';
            out << num(times[i]) << ',' << num(sol.f[i].real()) << ',' << num(sol.f[i].imag()) << ','
                << num(sol.energy[i]) << '\n';
        }
    }
}

void write_sweep(std::ostream& out, std::ostream* curves_out, const ExperimentSpec& spec) {
    std::vector<Trajectory> curves;
    const bool want_curves = spec.sweep.curves && curves_out;
    const std::vector<MetricsRow> rows = sweep_metrics(spec, want_curves ? &curves : nullptr);
    const double delta = spec.system.detuning();
    out << "N,M,J_over_delta,model,E_max,tau_G,P_tau,P_max,interior_max\n";
    for (const MetricsRow& r : rows) {
        const double g = std::abs(r.g_eff);
        out << r.n_charger << ',' << r.m_battery << ',' << num(r.j / delta) << ',' << to_string(r.model) << ','
            << num(r.metrics.e_max) << ',' << num(r.metrics.tau * g) << ',' << num(r.metrics.p_tau / g) << ','
            << num(r.metrics.p_max / g) << ',' << (r.metrics.interior_maximum ? 1 : 0) << '\n';
    }
    if (!want_curves) return;
    write_header(*curves_out, spec);
    *curves_out << "N,M,J_over_delta,model,t,E_over_omega,P_over_Gomega\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const MetricsRow& r = rows[k];
        const std::string prefix = std::to_string(r.n_charger) + ',' + std::to_string(r.m_battery) + ',' +
                                   num(r.j / delta) + ',' + std::string(to_string(r.model)) + ',';
        const Trajectory& tr = curves[k];
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            *curves_out << prefix << num(tr.times[i]) << ',' << num(tr.energy[i]) << ','
                        << num(tr.power[i] / std::abs(r.g_eff)) << '\n';
        }
    }
}

} // namespace

std::string_view tool_version() { return "1.0.0"; }

Trajectory simulate_model(Model model, const SystemConfig& config, std::span<const double> times,
                          const EvolveOptions& options) {
    config.validate();
    switch (model) {
    case Model::full: {
        const int cutoff = config.fock_cutoff.value_or(config.n_charger);
        const SectorBasis basis = enumerate_sector_basis(config.n_charger, config.m_battery, cutoff, config.n_charger);
        const HamiltonianMatrix h = build_full_hamiltonian(config, basis);
        return evolve(h, charged_state(basis), times, options);
    }
    case Model::effective: {
        const SectorBasis basis = effective_sector(config);
        const HamiltonianMatrix h = build_effective_hamiltonian(config, basis);
        return evolve(h, charged_state(basis), times, Observables{battery_occupation_diagonal(basis), std::nullopt},
                      options);
    }
    case Model::collective: {
        if (!config.has_uniform_couplings() || !at_sweet_spot(config)) {
            throw std::invalid_argument("the collective model needs uniform couplings at the sweet spot J = -G");
        }
        const DickeBasis basis(config.n_charger, config.m_battery, config.n_charger);
        const HamiltonianMatrix h = build_collective_hamiltonian(reference_coupling(config), basis);
        return evolve(h, dicke_charged_state(basis), times,
                      Observables{basis.battery_occupation_diagonal(), std::nullopt}, options);
    }
    case Model::analytic:
        return closed_form(config, times);
    }
    throw std::invalid_argument("unknown model");
}

std::vector<MetricsRow> sweep_metrics(const ExperimentSpec& spec, std::vector<Trajectory>* curves) {
    const std::vector<SweepPoint> points = sweep_grid(spec);
    std::vector<MetricsRow> rows(points.size());
    if (curves) curves->assign(points.size(), Trajectory{});
    parallel_for(points.size(), spec.threads, [&](std::size_t i) {
        const SweepPoint& p = points[i];
        try {
            const double j = resolve_j(p.j, spec.g_uniform, spec.system.omega, spec.system.omega_m);
            const SystemConfig c = sweep_point_config(spec, p.n, p.m, p.j);
            const std::vector<double> times = grid_for(spec, c);
            Trajectory traj = simulate_model(p.model, c, times, spec.evolve);
            rows[i] = {p.n, p.m, j, p.model, reference_coupling(c), charging_metrics(traj)};
            if (curves) (*curves)[i] = std::move(traj);
        } catch (const NumericalError& e) {
            throw NumericalError(describe(spec, p) + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(describe(spec, p) + ": " + e.what());
        }
    });
    return rows;
}

void write_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream* curves) {
    write_header(out, spec);
    const SystemConfig& c = spec.system;
    switch (spec.mode) {
    case Mode::simulate_full:
    case Mode::simulate_effective:
    case Mode::collective: {
        const Model model = spec.mode == Mode::simulate_full   ? Model::full
                            : spec.mode == Mode::collective    ? Model::collective
                                                               : Model::effective;
        const std::vector<double> times = grid_for(spec, c);
        write_trajectory(out, simulate_model(model, c, times, spec.evolve), reference_coupling(c));
        break;
    }
    case Mode::analytic: {
        const std::vector<double> times = grid_for(spec, c);
        const Trajectory traj = closed_form(c, times);
        const double g = std::abs(reference_coupling(c));
        out << "t,E_over_omega,P_over_Gomega\n";
        for (std::size_t i = 0; i < times.size(); ++i) {
            out << num(times[i]) << ',' << num(traj.energy[i]) << ',' << num(traj.power[i] / g) << '\n';
        }
        break;
    }
    case Mode::compare:
        write_compare(out, spec);
        break;
    case Mode::qsd:
        write_qsd(out, spec);
        break;
    case Mode::sweep_n:
    case Mode::sweep_nm:
    case Mode::sweep_j:
        write_sweep(out, curves, spec);
        break;
    }
}

std::vector<std::string> run_experiment(const ExperimentSpec& spec, const std::string& path) {
    std::vector<std::string> written{path};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    std::ofstream curves_file;
    std::ostream* curves = nullptr;
    const bool sweep = spec.mode == Mode::sweep_n || spec.mode == Mode::sweep_nm || spec.mode == Mode::sweep_j;
    if (sweep && spec.sweep.curves) {
        written.push_back(curves_path(path));
        curves_file.open(written.back(), std::ios::binary);
        if (!curves_file) throw std::runtime_error("cannot open output file '" + written.back() + "'");
        curves = &curves_file;
    }
    write_experiment(spec, out, curves);
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
    return written;
}

} // namespace magbat
