#include "magbat/dynamics.hpp"
#include "magbat/effective.hpp"
#include "magbat/error.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace magbat;

namespace {

// Largest |E_full - E_eff| up to the first full charge of the effective model.
double effective_vs_full(const SystemConfig& c) {
    const SectorBasis spin = effective_sector(c);
    const HamiltonianMatrix h_eff = build_effective_hamiltonian(c, spin);
    const double g_eff = effective_couplings(c).charger_battery(0, 0);
    const auto probe = uniform_grid(2.0 * default_horizon(c.n_charger, c.m_battery, g_eff), 2000);
    const double tau = charging_metrics(evolve(h_eff, charged_state(spin), probe)).tau;

    const auto times = uniform_grid(tau, 800);
    const SectorBasis full_basis = enumerate_sector_basis(c.n_charger, c.m_battery, c.n_charger, c.n_charger);
    const Trajectory full = evolve(build_full_hamiltonian(c, full_basis), charged_state(full_basis), times);
    const Trajectory eff = evolve(h_eff, charged_state(spin), times);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, std::abs(full.energy[i] - eff.energy[i]));
    return worst;
}

} // namespace

TEST_SUITE("effective") {

TEST_CASE("single magnon path gives g^2 / (omega - omega_m)") {
    const SystemConfig c = SystemConfig::uniform(1, 1, 0.1, 0.0);
    const PerturbativeSplit split = split_diagonal(build_full_hamiltonian(c, enumerate_sector_basis(1, 1, 1, 1)));
    const std::vector<double> e(split.energies.data(), split.energies.data() + split.energies.size());
    const cplx coupling = second_order_coupling(e, split.interaction, 0, 2);
    CHECK(coupling.real() == doctest::Approx(0.01 / (10.0 - 11.0)).epsilon(1e-14));
    CHECK(coupling.imag() == 0.0);
}

TEST_CASE("two intermediate paths add") {
    // |p> and |q> at 0, intermediates at 2 and -3.
    HermitianBuilder b(4);
    b.add_diagonal(2, 2.0);
    b.add_diagonal(3, -3.0);
    b.add_pair(2, 0, 0.1);
    b.add_pair(1, 2, 0.2);
    b.add_pair(3, 0, 0.3);
    b.add_pair(1, 3, cplx(0.0, 0.4));
    const std::vector<double> e{0.0, 0.0, 2.0, -3.0};
    const cplx expected = 0.2 * 0.1 / (0.0 - 2.0) + cplx(0.0, 0.4) * 0.3 / (0.0 + 3.0);
    const cplx got = second_order_coupling(e, b.build(), 0, 1);
    CHECK(std::abs(got - expected) < 1e-15);
}

TEST_CASE("vanishing interaction gives zero") {
    const std::vector<double> e{0.0, 0.0, 1.0};
    CHECK(second_order_coupling(e, HermitianBuilder(3).build(), 0, 1) == cplx{});
}

TEST_CASE("second-order coupling is invariant under a common energy shift") {
    oracle::ConfigGenerator gen(0x5eed0101);
    for (int trial = 0; trial < 20; ++trial) {
        const SystemConfig c = gen.config(gen.integer(1, 3), gen.integer(1, 3));
        const SectorBasis basis = enumerate_sector_basis(c.n_charger, c.m_battery, 1, 1);
        const PerturbativeSplit split = split_diagonal(build_full_hamiltonian(c, basis));
        std::vector<double> e(split.energies.data(), split.energies.data() + split.energies.size());
        std::vector<double> shifted = e;
        const double shift = gen.uniform(-50.0, 50.0);
        for (double& x : shifted) x += shift;
        const std::size_t first_battery = basis.dimension() - 1;
        const cplx a = second_order_coupling(e, split.interaction, 0, first_battery);
        const cplx b = second_order_coupling(shifted, split.interaction, 0, first_battery);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("perturbative splitting of a two-level pair matches exact diagonalization") {
    oracle::ConfigGenerator gen(0x5eed0102);
    for (int trial = 0; trial < 20; ++trial) {
        const double small = gen.uniform(0.005, 0.02);
        const double d1 = gen.uniform(0.8, 1.5), d2 = -gen.uniform(0.8, 1.5);
        const double a1 = small * gen.uniform(0.5, 1.0), a2 = small * gen.uniform(0.5, 1.0);
        const double b1 = small * gen.uniform(0.5, 1.0), b2 = small * gen.uniform(0.5, 1.0);
        HermitianBuilder builder(4);
        builder.add_diagonal(2, d1);
        builder.add_diagonal(3, d2);
        builder.add_pair(2, 0, a1);
        builder.add_pair(3, 0, a2);
        builder.add_pair(2, 1, b1);
        builder.add_pair(3, 1, b2);
        const HamiltonianMatrix h = builder.build();
        const std::vector<double> e{0.0, 0.0, d1, d2};
        const double c = std::abs(second_order_coupling(e, h, 0, 1));
        const double shift_p = -(a1 * a1 / d1 + a2 * a2 / d2);
        const double shift_q = -(b1 * b1 / d1 + b2 * b2 / d2);
        const double predicted = std::sqrt((shift_p - shift_q) * (shift_p - shift_q) + 4 * c * c);

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.dense());
        const auto& ev = solver.eigenvalues();
        // The two levels nearest zero are the perturbed pair.
        std::vector<double> vals(ev.data(), ev.data() + 4);
        std::sort(vals.begin(), vals.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        const double exact = std::abs(vals[0] - vals[1]);
        // Fourth-order corrections are O(small^4 / d^3); relative error O((small/d)^2).
        CHECK(std::abs(exact - predicted) <= 0.01 * predicted + 1e-7);
    }
}

TEST_CASE("degenerate intermediate state is reported") {
    HermitianBuilder b(3);
    b.add_pair(2, 0, 0.1);
    b.add_pair(1, 2, 0.1);
    const std::vector<double> e{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(second_order_coupling(e, b.build(), 0, 1), DegenerateStateError);
    CHECK_THROWS_AS(second_order_coupling(e, b.build(), 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(second_order_coupling(e, b.build(), 0, 3), std::invalid_argument);
}

TEST_CASE("induced couplings for uniform g") {
    const SystemConfig c = SystemConfig::uniform(2, 3, 0.1, 0.0, 10.0, 11.0);
    const EffectiveCouplings k = effective_couplings(c);
    CHECK(k.charger_battery.rows() == 2);
    CHECK(k.charger_battery.cols() == 3);
    CHECK(k.charger_battery(1, 2) == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(k.charger_charger(0, 1) == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(k.charger_charger(0, 0) == 0.0);
    CHECK(k.battery_battery(0, 2) == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(k.detuning == doctest::Approx(1.0));
}

TEST_CASE("induced coupling is -g_C g_B / Delta for either sign of the detuning") {
    oracle::ConfigGenerator gen(0x5eed0103);
    for (int trial = 0; trial < 30; ++trial) {
        const SystemConfig c = gen.config(gen.integer(1, 4), gen.integer(1, 4));
        const EffectiveCouplings k = effective_couplings(c);
        const double delta = c.omega_m - c.omega;
        for (int i = 0; i < c.n_charger; ++i) {
            for (int j = 0; j < c.m_battery; ++j) {
                CHECK(k.charger_battery(i, j) ==
                      doctest::Approx(-c.g_charger[static_cast<std::size_t>(i)] * c.g_battery[static_cast<std::size_t>(j)] / delta)
                          .epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("a spin with zero coupling has no induced couplings") {
    SystemConfig c = SystemConfig::uniform(2, 2, 0.1, 0.0);
    c.g_charger[1] = 0.0;
    const EffectiveCouplings k = effective_couplings(c);
    CHECK(k.charger_battery.row(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(k.charger_charger(0, 1) == 0.0);
}

TEST_CASE("resonant magnon is rejected") {
    SystemConfig c = SystemConfig::uniform(1, 1, 0.1, 0.0);
    c.omega_m = c.omega;
    CHECK_THROWS_AS(effective_couplings(c), std::invalid_argument);
}

TEST_CASE("two-to-one effective matrix") {
    const double g = 0.1, j = 0.004;
    const SystemConfig c = SystemConfig::uniform(2, 1, g, j);
    const double big_g = g * g / (c.omega - c.omega_m);
    const SectorBasis spin = effective_sector(c);
    REQUIRE(spin.dimension() == 3);
    CHECK(spin.label(0) == OccupationLabel{0b11, 0, 0});
    CHECK(spin.label(1) == OccupationLabel{0b10, 0, 1});
    CHECK(spin.label(2) == OccupationLabel{0b01, 0, 1});
    Eigen::MatrixXcd expected(3, 3);
    expected << 0, big_g, big_g, big_g, 0, big_g + j, big_g, big_g + j, 0;
    const Eigen::MatrixXcd actual = build_effective_hamiltonian(c, spin).dense();
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("one-to-one effective model is a flip-flop of strength G for any J") {
    for (double j : {0.0, 0.05, -0.3}) {
        const SystemConfig c = SystemConfig::uniform(1, 1, 0.1, j);
        const Eigen::MatrixXcd h = build_effective_hamiltonian(c, effective_sector(c)).dense();
        REQUIRE(h.rows() == 2);
        CHECK(std::abs(h(0, 1) - cplx(-0.01, 0.0)) < 1e-15);
        CHECK(std::abs(h(0, 0)) == 0.0);
    }
}

TEST_CASE("at the sweet spot intra-group elements vanish") {
    const SystemConfig probe = SystemConfig::uniform(3, 2, 0.1, 0.0);
    const double j = sweet_spot_j(effective_couplings(probe));
    const SystemConfig c = SystemConfig::uniform(3, 2, 0.1, j);
    const SectorBasis spin = effective_sector(c);
    const Eigen::MatrixXcd h = build_effective_hamiltonian(c, spin).dense();
    for (Eigen::Index p = 0; p < h.rows(); ++p) {
        for (Eigen::Index q = 0; q < h.cols(); ++q) {
            const auto& a = spin.label(static_cast<std::size_t>(p));
            const auto& b = spin.label(static_cast<std::size_t>(q));
            const bool same_battery = a.battery == b.battery;
            const bool same_charger = a.charger == b.charger;
            if (same_battery || same_charger) CHECK(std::abs(h(p, q)) < 1e-17);
        }
    }
}

TEST_CASE("sweet-spot J") {
    CHECK(sweet_spot_j(effective_couplings(SystemConfig::uniform(2, 2, 0.1, 0.0, 10.0, 11.0))) ==
          doctest::Approx(0.01).epsilon(1e-13));
    CHECK(sweet_spot_j(effective_couplings(SystemConfig::uniform(2, 2, 0.1, 0.0, 11.0, 10.0))) ==
          doctest::Approx(-0.01).epsilon(1e-13));
    CHECK(sweet_spot_j(effective_couplings(SystemConfig::uniform(2, 2, 0.0, 0.0))) == 0.0);

    SystemConfig uneven = SystemConfig::uniform(2, 1, 0.1, 0.0);
    uneven.g_charger[1] = 0.2;
    try {
        sweet_spot_j(effective_couplings(uneven));
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("J_charger(0,1)=0.02") != std::string::npos);
    }
}

TEST_CASE("effective Hamiltonian matches the Kronecker oracle") {
    oracle::ConfigGenerator gen(0x5eed0104);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = gen.integer(1, 4), m = gen.integer(1, 4);
        const double g = gen.uniform(0.02, 0.15);
        const double j = gen.uniform(-0.05, 0.05);
        const SystemConfig c = SystemConfig::uniform(n, m, g, j);
        const double big_g = g * g / (c.omega - c.omega_m);
        for (int e = 0; e <= n + m; ++e) {
            const SectorBasis basis = enumerate_sector_basis(n, m, 0, e);
            const Eigen::MatrixXcd expected = oracle::effective_uniform(n, m, big_g, j, basis);
            CHECK((build_effective_hamiltonian(c, basis).dense() - expected).cwiseAbs().maxCoeff() < 1e-15);
        }
    }
}

TEST_CASE("effective model needs a spin-only basis of the right shape") {
    const SystemConfig c = SystemConfig::uniform(2, 1, 0.1, 0.0);
    CHECK_THROWS_AS(build_effective_hamiltonian(c, enumerate_sector_basis(2, 1, 1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(build_effective_hamiltonian(c, enumerate_sector_basis(1, 2, 0, 1)), std::invalid_argument);
}

TEST_CASE("effective model tracks the full model up to the first full charge") {
    std::vector<double> deviations;
    for (int n = 1; n <= 2; ++n) {
        for (int m = 1; m <= 2; ++m) {
            const double d = effective_vs_full(SystemConfig::uniform(n, m, 0.1, 0.0));
            MESSAGE("N=" << n << " M=" << m << " g=0.1|Delta|: max |dE| = " << d);
            deviations.push_back(d);
        }
    }
    CHECK(deviations[0] <= 0.05);  // N = M = 1
    CHECK(deviations[2] <= 0.05);  // N = 2, M = 1
    // Deeper in the dispersive regime every N, M <= 2 case agrees.
    for (int n = 1; n <= 2; ++n) {
        for (int m = 1; m <= 2; ++m) CHECK(effective_vs_full(SystemConfig::uniform(n, m, 0.05, 0.0)) <= 0.05);
    }
}

TEST_CASE("dispersive warning") {
    CHECK_FALSE(dispersive_warning(SystemConfig::uniform(1, 1, 0.1, 0.0)).has_value());
    const auto w = dispersive_warning(SystemConfig::uniform(1, 1, 0.5, 0.0));
    REQUIRE(w.has_value());
    CHECK(w->find("dispersive") != std::string::npos);
}

} // TEST_SUITE
