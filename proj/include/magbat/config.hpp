// config.hpp: experiment description and its INI-style text format.
//
// Format: `key = value` lines grouped under [system], [run], [qsd] and
// [sweep]; `#` starts a comment. Couplings come either in raw frequency
// units (`g`, `j`, ...) or relative to the detuning Delta = omega_m - omega
// (`g_over_delta`, `j_over_delta`, ...); giving both forms of one quantity is
// an error. See README.md for the full key reference.

#pragma once

#include "magbat/dynamics.hpp"
#include "magbat/hilbert.hpp"
#include "magbat/qsd.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace magbat {

enum class Mode {
    simulate_full,
    simulate_effective,
    collective,
    analytic,
    qsd,
    sweep_n,
    sweep_nm,
    sweep_j,
    compare,
};

enum class Model { full, effective, collective, analytic };

std::string_view to_string(Mode mode);
std::string_view to_string(Model model);
std::optional<Mode> parse_mode(std::string_view text);
std::optional<Model> parse_model(std::string_view text);

// Direct coupling choice: a raw value, or the sweet spot J = -G.
struct CouplingChoice {
    bool sweet{false};
    double value{0.0};  // raw units; ignored when sweet

    friend bool operator==(const CouplingChoice&, const CouplingChoice&) = default;
};

// How the time horizon is chosen. Exactly one of the three is used.
struct Horizon {
    std::optional<double> raw;       // absolute time
    std::optional<double> g_units;   // in units of 1/|G|
    double periods{1.2};             // multiples of pi / (sqrt(max(N, M)) |G|)

    double resolve(int n_charger, int m_battery, double g_eff) const;
};

struct SweepSpec {
    std::vector<int> n_values;              // sweep-n
    std::vector<int> m_values;              // sweep-nm
    std::vector<int> ratios;                // sweep-nm: N = ratio * M
    std::vector<CouplingChoice> j_values;   // sweep-j; other sweeps default to the system J
    std::vector<Model> models{Model::effective};
    std::optional<int> full_max_n;          // full-model points with larger N are skipped
    bool curves{false};                     // also write E(t) per point
};

struct ExperimentSpec {
    Mode mode{Mode::simulate_effective};
    std::string preset;                     // empty for user configs

    SystemConfig system;
    double g_uniform{0.0};                  // raw; 0 when only per-spin couplings were given
    CouplingChoice j_uniform;
    bool uniform_couplings{true};

    std::vector<double> noise_strengths{0.0};  // QSD Gamma values, raw units

    Horizon horizon;
    std::size_t samples{2000};
    EvolveOptions evolve;
    std::size_t threads{0};                 // 0: one per hardware thread
    bool allow_large_full{false};
    std::uint64_t seed{0};                  // reserved; every mode is deterministic

    SweepSpec sweep;

    // Resolved `section.key = value` lines in canonical order, echoed into
    // output headers.
    std::vector<std::string> echo;
};

// One `key = value` entry after parsing, before interpretation.
struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line{0};
};

// Splits text into entries. Throws ConfigError on syntax errors, unknown
// sections or keys, and duplicates.
std::vector<ConfigEntry> read_config_entries(std::string_view text);

// Parses and validates a complete config. `mode_override` replaces [run] mode.
ExperimentSpec parse_config(std::string_view text, std::optional<Mode> mode_override = std::nullopt);

// Names of the built-in presets: fig2 ... fig6.
std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
// The preset's config text. Throws std::invalid_argument for unknown names.
std::string preset_text(std::string_view name);

// Preset text with `overrides` layered on top: any key given in the overrides
// replaces the preset's value (and its alternate-unit spelling).
ExperimentSpec load_preset(std::string_view name, std::string_view overrides = {});

// Uniform SystemConfig for a sweep point; resolves a sweet-spot J.
SystemConfig sweep_point_config(const ExperimentSpec& spec, int n_charger, int m_battery,
                                const CouplingChoice& j);

// J in raw units for a given uniform g (sweet spot resolved).
double resolve_j(const CouplingChoice& j, double g, double omega, double omega_m);

// Signed induced coupling used to scale time and power: g^2 / (omega - omega_m)
// for uniform couplings, the mean charger-battery coupling otherwise.
double reference_coupling(const SystemConfig& config);

qsd::QsdParams qsd_params(const ExperimentSpec& spec, double noise_strength);

} // namespace magbat
