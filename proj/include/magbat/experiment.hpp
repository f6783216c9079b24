// experiment.hpp: runs an ExperimentSpec and writes its CSV output.

#pragma once

#include "magbat/config.hpp"
#include "magbat/dynamics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace magbat {

std::string_view tool_version();

// E(t) and P(t) of one model started from the charged state. The analytic
// model covers one-to-one, two-to-one, N-to-one at the sweet spot and
// two-to-two at the sweet spot; other configurations throw
// std::invalid_argument. The collective model needs uniform couplings at the
// sweet spot.
Trajectory simulate_model(Model model, const SystemConfig& config, std::span<const double> times,
                          const EvolveOptions& options = {});

struct MetricsRow {
    int n_charger{0};
    int m_battery{0};
    double j{0.0};        // raw units
    Model model{Model::effective};
    double g_eff{0.0};    // signed induced coupling
    ChargingMetrics metrics;
};

// One row per grid point, computed on `spec.threads` workers and returned in
// grid order. A failing point aborts the sweep; the exception names the point.
// When `curves` is given it receives the trajectory of every row.
std::vector<MetricsRow> sweep_metrics(const ExperimentSpec& spec, std::vector<Trajectory>* curves = nullptr);

// Writes the mode's CSV to `out`; sweeps with curves enabled also write the
// per-point trajectories to `curves` when it is non-null.
void write_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream* curves = nullptr);

// Writes `path` (and `<stem>_curves.csv` next to it for sweeps with curves).
// Returns the paths written.
std::vector<std::string> run_experiment(const ExperimentSpec& spec, const std::string& path);

} // namespace magbat
