#include "magbat/analytic.hpp"
#include "magbat/collective.hpp"
#include "magbat/dynamics.hpp"
#include "magbat/effective.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace magbat;
namespace an = magbat::analytic;

namespace {

constexpr double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

// Two-to-one effective Hamiltonian written out by hand.
Eigen::MatrixXcd two_to_one_matrix(double g, double j) {
    Eigen::MatrixXcd h(3, 3);
    h << 0, g, g, g, 0, g + j, g, g + j, 0;
    return h;
}

// max_t of 1 - |<eeg|psi(t)>|^2 sampled densely, with psi(t) built from a
// numerical eigendecomposition.
double exact_two_to_one_emax(double g, double j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(two_to_one_matrix(g, j));
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(3);
    psi0(0) = 1.0;
    const Eigen::VectorXcd c = solver.eigenvectors().adjoint() * psi0;
    double best = 0.0;
    for (int i = 0; i <= 200000; ++i) {
        const double t = i * 5.0 * pi / 0.01 / 200000;
        cplx a{};
        for (int k = 0; k < 3; ++k) a += std::norm(c(k)) * std::polar(1.0, -solver.eigenvalues()(k) * t);
        best = std::max(best, 1.0 - std::norm(a));
    }
    return best;
}

} // namespace

TEST_SUITE("analytic") {

TEST_CASE("one-to-one closed form") {
    for (double g : {-0.01, 0.01}) {
        CHECK(an::energy_one_to_one(g, pi / (2 * std::abs(g))) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(an::energy_one_to_one(g, 0.0) == 0.0);
        CHECK(an::energy_one_to_one(g, pi / (4 * std::abs(g))) == doctest::Approx(0.5).epsilon(1e-14));
        const an::ClosedFormMetrics m = an::metrics_one_to_one(g);
        CHECK(m.tau == doctest::Approx(pi / 0.02));
        CHECK(m.p_tau == doctest::Approx(2 * 0.01 / pi));
    }
}

TEST_CASE("two-to-one closed form") {
    const double g = -0.01;
    for (double t : {0.0, 30.0, 111.0}) {
        CHECK(an::energy_two_to_one(g, -g, t) == doctest::Approx(std::pow(std::sin(sqrt2 * 0.01 * t), 2)).epsilon(1e-13));
    }
    CHECK(an::energy_two_to_one(g, 0.3, 0.0) == 0.0);
    const an::ClosedFormMetrics zero_j = an::metrics_two_to_one(g, 0.0);
    CHECK(zero_j.e_max == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
    CHECK(zero_j.tau * 3 * 0.01 == doctest::Approx(pi).epsilon(1e-14));
    CHECK(zero_j.e_max == doctest::Approx(exact_two_to_one_emax(g, 0.0)).epsilon(1e-6));
    CHECK_THROWS_AS(an::two_to_one_spectrum(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("two-to-one spectrum matches diagonalization for both signs of G") {
    oracle::ConfigGenerator gen(0x5eed0401);
    for (int trial = 0; trial < 50; ++trial) {
        const double g = gen.uniform(0.001, 0.05) * (gen.integer(0, 1) ? 1 : -1);
        const double j = gen.uniform(-0.1, 0.1);
        const an::TwoToOneSpectrum sp = an::two_to_one_spectrum(g, j);
        CHECK(sp.eps_plus >= sp.eps_minus);
        // eps+- are the eigenvalues of the block symmetric in the two chargers;
        // the antisymmetric state sits at -(G + J).
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(two_to_one_matrix(g, j));
        std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + 3);
        const double anti = -(g + j);
        ev.erase(std::min_element(ev.begin(), ev.end(), [&](double a, double b) { return std::abs(a - anti) < std::abs(b - anti); }));
        CHECK(sp.eps_minus == doctest::Approx(ev[0]).epsilon(1e-10));
        CHECK(sp.eps_plus == doctest::Approx(ev[1]).epsilon(1e-10));
        // Mixing angle obeys tan(theta) = sqrt2 G / eps+.
        CHECK(std::tan(sp.theta) == doctest::Approx(sqrt2 * g / sp.eps_plus).epsilon(1e-10));
    }
    const an::TwoToOneSpectrum sweet = an::two_to_one_spectrum(-0.01, 0.01);
    CHECK(sweet.eps_plus == doctest::Approx(sqrt2 * 0.01));
    CHECK(sweet.eps_minus == doctest::Approx(-sqrt2 * 0.01));
    CHECK(std::pow(std::sin(2 * sweet.theta), 2) == doctest::Approx(1.0));
}

TEST_CASE("N-to-one closed form") {
    const double g = -0.01;
    CHECK(an::energy_n_to_one(g, 1, 77.0) == doctest::Approx(an::energy_one_to_one(g, 77.0)));
    CHECK(an::energy_n_to_one(g, 4, pi / (4 * 0.01)) == doctest::Approx(1.0));
    CHECK(an::metrics_n_to_one(g, 2).p_tau == doctest::Approx(sqrt2 * an::metrics_one_to_one(g).p_tau));
    CHECK_THROWS_AS(an::energy_n_to_one(g, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(an::metrics_n_to_one(g, 0), std::invalid_argument);
    const Eigen::VectorXcd psi0 = an::state_n_to_one(g, 3, 0.0);
    CHECK(psi0(0) == cplx(1.0, 0.0));
    CHECK(psi0(1) == cplx(0.0, 0.0));
}

TEST_CASE("two-to-two closed form") {
    const double g = -0.01;
    const double tau = pi / (2 * sqrt2 * 0.01);
    CHECK(an::energy_two_to_two(g, tau) == doctest::Approx(2.0));
    CHECK(an::energy_two_to_two(g, 0.0) == 0.0);
    const an::ClosedFormMetrics m = an::metrics_two_to_two(g);
    CHECK(m.e_max == 2.0);
    CHECK(m.tau == doctest::Approx(tau));
    CHECK(m.p_tau / 0.01 == doctest::Approx(4 * sqrt2 / pi));
    CHECK(m.p_tau == doctest::Approx(2 * an::metrics_two_to_one(g, -g).p_tau));

    // Quarter way through, sqrt2 |G| t = pi/4. Direct propagation of the
    // 2G-tridiagonal collective matrix gives battery energy 1, middle
    // amplitude of modulus 1/sqrt2.
    const double t = pi / (4 * sqrt2 * 0.01);
    Eigen::MatrixXcd h(3, 3);
    h << 0, 2 * g, 0, 2 * g, 0, 2 * g, 0, 2 * g, 0;
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(3);
    psi0(0) = 1.0;
    const Eigen::VectorXcd exact = oracle::expm_evolve(h, psi0, t);
    const double e_exact = std::norm(exact(1)) + 2 * std::norm(exact(2));
    CHECK(e_exact == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(an::energy_two_to_two(g, t) == doctest::Approx(e_exact).epsilon(1e-12));
    const Eigen::VectorXcd closed = an::state_two_to_two(g, t);
    CHECK((closed - exact).norm() < 1e-12);
    CHECK(std::abs(closed(1)) == doctest::Approx(1 / sqrt2));
}

TEST_CASE("two-to-one state") {
    const auto start = an::state_two_to_one(-0.01, 0.004, 0.0);
    CHECK(std::abs(start[0] - 1.0) < 1e-15);
    CHECK(std::abs(start[1]) < 1e-15);
    for (double g : {-0.01, 0.01}) {
        const double t = 57.0;
        const auto s = an::state_two_to_one(g, -g, t);
        const double x = sqrt2 * g * t;
        CHECK(std::abs(s[0] - std::cos(x)) < 1e-12);
        CHECK(std::abs(s[1] - cplx(0.0, -std::sin(x) / sqrt2)) < 1e-12);
        CHECK(std::abs(s[2] - s[1]) < 1e-15);
    }
}

TEST_CASE("closed forms match propagation of the effective model") {
    oracle::ConfigGenerator gen(0x5eed0402);
    for (int trial = 0; trial < 12; ++trial) {
        const double g = gen.uniform(0.03, 0.15);
        const double omega_m = 10.0 + gen.uniform(0.5, 2.0) * (trial % 2 ? 1 : -1);
        const double g_eff = g * g / (10.0 - omega_m);
        const double j = trial < 4 ? -g_eff : gen.uniform(-3, 3) * std::abs(g_eff);

        const SystemConfig two = SystemConfig::uniform(2, 1, g, j, 10.0, omega_m);
        const SectorBasis spin2 = effective_sector(two);
        const an::TwoToOneSpectrum sp = an::two_to_one_spectrum(g_eff, j);
        const auto times2 = uniform_grid(2 * pi / (sp.eps_plus - sp.eps_minus), 1000);
        const auto states = evolve_states(build_effective_hamiltonian(two, spin2), charged_state(spin2), times2);
        const Trajectory traj2 = evolve(build_effective_hamiltonian(two, spin2), charged_state(spin2), times2);
        double worst_e = 0.0, worst_psi = 0.0;
        for (std::size_t i = 0; i < times2.size(); ++i) {
            worst_e = std::max(worst_e, std::abs(traj2.energy[i] - an::energy_two_to_one(g_eff, j, times2[i])));
            const auto a = an::state_two_to_one(g_eff, j, times2[i]);
            const Eigen::Vector3cd closed(a[0], a[1], a[2]);
            worst_psi = std::max(worst_psi, (closed - states[i]).norm());
            CHECK(closed.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
        CHECK(worst_e < 1e-10);
        CHECK(worst_psi < 1e-10);

        const SystemConfig one = SystemConfig::uniform(1, 1, g, 0.0, 10.0, omega_m);
        const SectorBasis spin1 = effective_sector(one);
        const auto times1 = uniform_grid(pi / std::abs(g_eff), 1000);
        const Trajectory traj1 = evolve(build_effective_hamiltonian(one, spin1), charged_state(spin1), times1);
        for (std::size_t i = 0; i < times1.size(); ++i) {
            CHECK(std::abs(traj1.energy[i] - an::energy_one_to_one(g_eff, times1[i])) < 1e-10);
        }
    }
}

TEST_CASE("sweet-spot closed forms match spin and collective propagation") {
    const double g = 0.1, g_eff = -0.01;
    for (int n = 1; n <= 4; ++n) {
        const SystemConfig c = SystemConfig::uniform(n, 1, g, -g_eff);
        const SectorBasis spin = effective_sector(c);
        const auto times = uniform_grid(pi / (std::sqrt(n) * 0.01), 1000);
        const Trajectory traj = evolve(build_effective_hamiltonian(c, spin), charged_state(spin), times);
        const DickeBasis dicke(n, 1, n);
        const auto collective = evolve_states(build_collective_hamiltonian(g_eff, dicke), dicke_charged_state(dicke), times);
        for (std::size_t i = 0; i < times.size(); i += 7) {
            CHECK(std::abs(traj.energy[i] - an::energy_n_to_one(g_eff, n, times[i])) < 1e-10);
            CHECK((collective[i] - an::state_n_to_one(g_eff, n, times[i])).norm() < 1e-10);
        }
    }
    const SystemConfig c = SystemConfig::uniform(2, 2, g, -g_eff);
    const SectorBasis spin = effective_sector(c);
    const auto times = uniform_grid(pi / (sqrt2 * 0.01), 1000);
    const Trajectory traj = evolve(build_effective_hamiltonian(c, spin), charged_state(spin), times);
    const DickeBasis dicke(2, 2, 2);
    const auto collective = evolve_states(build_collective_hamiltonian(g_eff, dicke), dicke_charged_state(dicke), times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(traj.energy[i] - an::energy_two_to_two(g_eff, times[i])) < 1e-10);
        CHECK((collective[i] - an::state_two_to_two(g_eff, times[i])).norm() < 1e-10);
    }
}

TEST_CASE("maximum two-to-one energy against the direct coupling") {
    const double g = -0.01;
    // Increasing on [0, -G], decreasing beyond.
    double prev = an::metrics_two_to_one(g, 0.0).e_max;
    for (int i = 1; i <= 50; ++i) {
        const double e = an::metrics_two_to_one(g, -g * i / 50.0).e_max;
        CHECK(e > prev);
        prev = e;
    }
    for (int i = 1; i <= 100; ++i) {
        const double e = an::metrics_two_to_one(g, -g * (1.0 + i / 10.0)).e_max;
        CHECK(e < prev);
        prev = e;
    }
    CHECK(std::abs(an::metrics_two_to_one(g, -2 * g).e_max - an::metrics_two_to_one(g, 0.0).e_max) < 1e-9);
    CHECK(an::metrics_two_to_one(g, -g).e_max == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed-form states have unit norm") {
    oracle::ConfigGenerator gen(0x5eed0403);
    for (int trial = 0; trial < 200; ++trial) {
        const double g = gen.uniform(-0.05, 0.05);
        const double t = gen.uniform(0.0, 5000.0);
        const auto s = an::state_two_to_one(g, gen.uniform(-0.1, 0.1), t);
        CHECK(std::norm(s[0]) + std::norm(s[1]) + std::norm(s[2]) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(an::state_n_to_one(g, gen.integer(1, 10), t).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(an::state_two_to_two(g, t).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

} // TEST_SUITE
