#include "magbat/analytic.hpp"
#include "magbat/config.hpp"
#include "magbat/error.hpp"
#include "magbat/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace magbat;

namespace {

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

std::string render(const ExperimentSpec& spec, std::string* curves = nullptr) {
    std::ostringstream out, side;
    write_experiment(spec, out, curves ? &side : nullptr);
    if (curves) *curves = side.str();
    return out.str();
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("models agree on the one-to-one system") {
    const SystemConfig c = SystemConfig::uniform(1, 1, 0.1, 0.0);
    const auto times = uniform_grid(std::numbers::pi / 0.01, 400);
    const Trajectory eff = simulate_model(Model::effective, c, times);
    const Trajectory exact = simulate_model(Model::analytic, c, times);
    const Trajectory full = simulate_model(Model::full, c, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(eff.energy[i] - exact.energy[i]) < 1e-10);
        CHECK(std::abs(full.energy[i] - exact.energy[i]) < 0.06);
    }
    CHECK_FALSE(full.magnons.empty());
    CHECK(eff.magnons.empty());
}

TEST_CASE("collective and analytic models need their special points") {
    const auto times = uniform_grid(100.0, 10);
    CHECK_THROWS_AS(simulate_model(Model::collective, SystemConfig::uniform(3, 2, 0.1, 0.0), times), std::invalid_argument);
    CHECK_NOTHROW(simulate_model(Model::collective, SystemConfig::uniform(3, 2, 0.1, 0.01), times));
    CHECK_THROWS_AS(simulate_model(Model::analytic, SystemConfig::uniform(3, 2, 0.1, 0.01), times), std::invalid_argument);
    CHECK_THROWS_AS(simulate_model(Model::analytic, SystemConfig::uniform(3, 1, 0.1, 0.0), times), std::invalid_argument);
    CHECK_NOTHROW(simulate_model(Model::analytic, SystemConfig::uniform(3, 1, 0.1, 0.01), times));
}

TEST_CASE("sweet-spot effective sweep keeps full charge for N = 1..10") {
    const ExperimentSpec spec = load_preset("fig4", "[sweep]\nmodels = effective\nj = sweet\n");
    const auto rows = sweep_metrics(spec);
    REQUIRE(rows.size() == 10);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n_charger == static_cast<int>(i) + 1);
        CHECK(rows[i].m_battery == 1);
        CHECK(rows[i].metrics.e_max == doctest::Approx(1.0).epsilon(1e-6));
        const auto closed = analytic::metrics_n_to_one(rows[i].g_eff, rows[i].n_charger);
        CHECK(rows[i].metrics.tau == doctest::Approx(closed.tau).epsilon(1e-6));
    }
}

TEST_CASE("without direct coupling the peak power levels off for many chargers") {
    const ExperimentSpec spec = load_preset("fig4", "[sweep]\nmodels = effective\nj = 0\n");
    const auto rows = sweep_metrics(spec);
    REQUIRE(rows.size() == 10);
    double prev_step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double step = rows[i].metrics.p_max - rows[i - 1].metrics.p_max;
        CHECK(step > 0.0);
        CHECK(step < prev_step);
        if (rows[i].n_charger >= 6) CHECK(step / rows[i].metrics.p_max < 0.03);
        prev_step = step;
        // More chargers store less.
        CHECK(rows[i].metrics.e_max < rows[i - 1].metrics.e_max);
    }
}

TEST_CASE("sweep rows come back in grid order whatever the thread count") {
    ExperimentSpec spec = load_preset("fig4", "[sweep]\nn = 1..4\n");
    spec.threads = 1;
    const auto serial = sweep_metrics(spec);
    spec.threads = 3;
    const auto parallel = sweep_metrics(spec);
    REQUIRE(serial.size() == 16);  // two J values, four N, two models
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].n_charger == parallel[i].n_charger);
        CHECK(serial[i].model == parallel[i].model);
        CHECK(serial[i].metrics.e_max == parallel[i].metrics.e_max);
        CHECK(serial[i].metrics.tau == parallel[i].metrics.tau);
    }
    CHECK(serial[0].model == Model::effective);
    CHECK(serial[1].model == Model::full);
    CHECK(serial[2].n_charger == 2);
}

TEST_CASE("full-model points beyond the cap are skipped") {
    const auto rows = sweep_metrics(load_preset("fig4"));
    for (const auto& r : rows) {
        if (r.model == Model::full) CHECK(r.n_charger <= 6);
    }
    CHECK(rows.size() == 2 * (10 + 6));
}

TEST_CASE("a failing sweep point is named in the error") {
    // No closed form exists for three chargers away from the sweet spot.
    const ExperimentSpec spec = load_preset("fig4", "[sweep]\nmodels = effective\nj = 0\n");
    ExperimentSpec bad = spec;
    bad.sweep.models = {Model::analytic};
    bad.sweep.n_values = {1, 2, 3};
    try {
        sweep_metrics(bad);
        FAIL("expected the sweep to fail");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        CHECK(what.find("N=3") != std::string::npos);
        CHECK(what.find("model=analytic") != std::string::npos);
    }
}

TEST_CASE("CSV layouts") {
    const std::string compare = render(load_preset("fig2", "[run]\nsamples = 10\n"));
    CHECK(compare.rfind("# magbat 1.0.0\n# preset = fig2\n", 0) == 0);
    auto lines = data_lines(compare);
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "t,E_full,E_effective,E_analytic,P_full,P_effective,P_analytic");

    std::string curves;
    const std::string sweep = render(load_preset("fig3", "[run]\nsamples = 10\n"), &curves);
    lines = data_lines(sweep);
    CHECK(lines[0] == "N,M,J_over_delta,model,E_max,tau_G,P_tau,P_max,interior_max");
    CHECK(lines.size() == 1 + 6);
    const auto curve_lines = data_lines(curves);
    CHECK(curve_lines[0] == "N,M,J_over_delta,model,t,E_over_omega,P_over_Gomega");
    CHECK(curve_lines.size() == 1 + 6 * 11);

    lines = data_lines(render(load_preset("fig6", "[run]\nsamples = 10\n")));
    CHECK(lines[0] == "Gamma_over_delta,t,Re_F,Im_F,E_over_omega");
    CHECK(lines.size() == 1 + 4 * 11);

    const ExperimentSpec one = parse_config(R"([run]
mode = simulate-full
samples = 5
[system]
n_charger = 1
m_battery = 1
g_over_delta = 0.1
)");
    lines = data_lines(render(one));
    CHECK(lines[0] == "t,E_over_omega,P_over_Gomega,norm,n_magnon");
    CHECK(lines.size() == 7);
    const ExperimentSpec eff = parse_config(R"([run]
mode = simulate-effective
samples = 5
[system]
n_charger = 1
m_battery = 1
g_over_delta = 0.1
)");
    lines = data_lines(render(eff));
    CHECK(lines[1].substr(lines[1].size() - 4) == ",nan");
}

TEST_CASE("rendering is deterministic") {
    for (const auto& name : preset_names()) {
        const ExperimentSpec spec = load_preset(name, "[run]\nsamples = 50\n");
        std::string c1, c2;
        CHECK(render(spec, &c1) == render(spec, &c2));
        CHECK(c1 == c2);
    }
}

} // TEST_SUITE
