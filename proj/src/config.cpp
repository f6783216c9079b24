// config.cpp: config text parsing, validation and presets

#include "magbat/config.hpp"
#include "magbat/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace magbat {

namespace {

constexpr std::array<std::string_view, 4> section_order{"system", "run", "qsd", "sweep"};

// Keys in one family name the same quantity in different units; at most one
// may appear.
struct KeyInfo {
    std::string_view name;
    std::string_view family;
};

const std::map<std::string_view, std::vector<KeyInfo>>& key_table() {
    static const std::map<std::string_view, std::vector<KeyInfo>> table{
        {"system",
         {{"n_charger", "n_charger"},
          {"m_battery", "m_battery"},
          {"omega", "omega"},
          {"omega_m", "omega_m"},
          {"g", "g"},
          {"g_over_delta", "g"},
          {"g_charger", "g_charger"},
          {"g_charger_over_delta", "g_charger"},
          {"g_battery", "g_battery"},
          {"g_battery_over_delta", "g_battery"},
          {"j", "j"},
          {"j_over_delta", "j"},
          {"j_charger", "j_charger"},
          {"j_charger_over_delta", "j_charger"},
          {"j_battery", "j_battery"},
          {"j_battery_over_delta", "j_battery"},
          {"fock_cutoff", "fock_cutoff"}}},
        {"run",
         {{"mode", "mode"},
          {"horizon", "horizon"},
          {"horizon_G", "horizon"},
          {"periods", "horizon"},
          {"samples", "samples"},
          {"tol", "tol"},
          {"eig_threshold", "eig_threshold"},
          {"method", "method"},
          {"threads", "threads"},
          {"allow_large_full", "allow_large_full"},
          {"seed", "seed"}}},
        {"qsd", {{"gamma", "gamma"}, {"gamma_over_delta", "gamma"}}},
        {"sweep",
         {{"n", "n"},
          {"m", "m"},
          {"ratio", "ratio"},
          {"j", "j"},
          {"j_over_delta", "j"},
          {"models", "models"},
          {"full_max_n", "full_max_n"},
          {"curves", "curves"}}},
    };
    return table;
}

std::string_view family_of(std::string_view section, std::string_view key) {
    for (const KeyInfo& k : key_table().at(section)) {
        if (k.name == key) return k.family;
    }
    return {};
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Entries after merging, addressable by section.key.
class EntryTable {
public:
    explicit EntryTable(std::vector<ConfigEntry> entries) : entries_(std::move(entries)) {}

    const ConfigEntry* find(std::string_view section, std::string_view key) const {
        for (const ConfigEntry& e : entries_) {
            if (e.section == section && e.key == key) return &e;
        }
        return nullptr;
    }

    // The single entry of a unit family, if any.
    const ConfigEntry* find_family(std::string_view section, std::string_view family) const {
        for (const ConfigEntry& e : entries_) {
            if (e.section == section && family_of(e.section, e.key) == family) return &e;
        }
        return nullptr;
    }

    bool has_section(std::string_view section) const {
        return std::any_of(entries_.begin(), entries_.end(), [&](const ConfigEntry& e) { return e.section == section; });
    }

    const std::vector<ConfigEntry>& entries() const noexcept { return entries_; }

private:
    std::vector<ConfigEntry> entries_;
};

[[noreturn]] void fail(const ConfigEntry& e, const std::string& what) {
    throw ConfigError(e.section + "." + e.key, e.line, what);
}

double to_double(const ConfigEntry& e, std::string_view text) {
    const std::string s(text);
    if (s.empty()) fail(e, "expected a number, got an empty value");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
        fail(e, "expected a finite number, got '" + s + "'");
    }
    return v;
}

long long to_integer(const ConfigEntry& e, std::string_view text) {
    const std::string s(text);
    if (s.empty()) fail(e, "expected an integer, got an empty value");
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) fail(e, "expected an integer, got '" + s + "'");
    return v;
}

double number(const ConfigEntry& e) { return to_double(e, e.value); }

int integer_in(const ConfigEntry& e, long long lo, long long hi) {
    const long long v = to_integer(e, e.value);
    if (v < lo || v > hi) {
        fail(e, "value " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
}

bool boolean(const ConfigEntry& e) {
    const std::string v = lower(e.value);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    fail(e, "expected true or false, got '" + e.value + "'");
}

std::vector<double> number_list(const ConfigEntry& e) {
    std::vector<double> out;
    for (const std::string& item : split(e.value, ',')) out.push_back(to_double(e, item));
    return out;
}

// Comma list of integers and inclusive ranges `a..b`.
std::vector<int> integer_list(const ConfigEntry& e, int lo, int hi) {
    std::vector<int> out;
    for (const std::string& item : split(e.value, ',')) {
        const auto dots = item.find("..");
        long long a = 0;
        long long b = 0;
        if (dots == std::string::npos) {
            a = b = to_integer(e, item);
        } else {
            a = to_integer(e, trim(std::string_view(item).substr(0, dots)));
            b = to_integer(e, trim(std::string_view(item).substr(dots + 2)));
            if (b < a) fail(e, "range '" + item + "' is empty");
        }
        if (a < lo || b > hi) {
            fail(e, "'" + item + "' out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        for (long long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
    }
    return out;
}

Eigen::MatrixXd matrix_value(const ConfigEntry& e, int size, double scale) {
    const std::vector<std::string> rows = split(e.value, ';');
    if (static_cast<int>(rows.size()) != size) {
        fail(e, "expected a " + std::to_string(size) + " x " + std::to_string(size) + " matrix, got " +
                    std::to_string(rows.size()) + " rows");
    }
    Eigen::MatrixXd m(size, size);
    for (int r = 0; r < size; ++r) {
        const std::vector<std::string> cols = split(rows[static_cast<std::size_t>(r)], ',');
        if (static_cast<int>(cols.size()) != size) {
            fail(e, "expected a " + std::to_string(size) + " x " + std::to_string(size) + " matrix, row " +
                        std::to_string(r + 1) + " has " + std::to_string(cols.size()) + " entries");
        }
        for (int c = 0; c < size; ++c) m(r, c) = scale * to_double(e, cols[static_cast<std::size_t>(c)]);
    }
    return m;
}

bool over_delta(const ConfigEntry& e) { return e.key.ends_with("_over_delta"); }

CouplingChoice coupling_value(const ConfigEntry& e, std::string_view item, double delta) {
    if (lower(std::string(item)) == "sweet") return {true, 0.0};
    return {false, to_double(e, item) * (over_delta(e) ? delta : 1.0)};
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string preset_body(std::string_view name) {
    if (name == "fig2") {
        return R"(# one charger spin, one battery spin: full vs effective vs closed form
[run]
mode = compare
periods = 2
samples = 4000
[system]
n_charger = 1
m_battery = 1
g_over_delta = 0.1
j_over_delta = 0
)";
    }
    if (name == "fig3") {
        return R"(# two chargers, one battery, three direct couplings
[run]
mode = sweep-j
periods = 2
samples = 4000
[system]
n_charger = 2
m_battery = 1
g_over_delta = 0.1
[sweep]
j_over_delta = 0, 0.01, 0.1
models = full, effective
curves = true
)";
    }
    if (name == "fig4") {
        return R"(# N chargers, one battery: sweet spot and uncoupled chargers
[run]
mode = sweep-n
periods = 1.2
samples = 4000
[system]
m_battery = 1
g_over_delta = 0.1
[sweep]
n = 1..10
j_over_delta = sweet, 0
models = effective, full
full_max_n = 6
)";
    }
    if (name == "fig5") {
        return R"(# N = ratio * M chargers and M batteries at the sweet spot
[run]
mode = sweep-nm
periods = 20
samples = 40000
[system]
g_over_delta = 0.1
j_over_delta = sweet
[sweep]
ratio = 1, 2, 5
m = 1..6
models = collective
)";
    }
    if (name == "fig6") {
        return R"(# one-to-one charging with magnon-frequency noise
[run]
mode = qsd
periods = 3
samples = 6000
[system]
n_charger = 1
m_battery = 1
g_over_delta = 0.1
[qsd]
gamma_over_delta = 0, 0.002, 0.02, 0.2
)";
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

bool is_spin_mode(Mode m) {
    return m == Mode::simulate_full || m == Mode::simulate_effective || m == Mode::collective ||
           m == Mode::analytic || m == Mode::compare || m == Mode::sweep_j;
}

bool is_sweep(Mode m) { return m == Mode::sweep_n || m == Mode::sweep_nm || m == Mode::sweep_j; }

constexpr int full_model_cap = 12;

ExperimentSpec interpret(const EntryTable& table, std::optional<Mode> mode_override) {
    ExperimentSpec spec;
    auto get = [&](std::string_view section, std::string_view key) { return table.find(section, key); };
    auto family = [&](std::string_view section, std::string_view fam) { return table.find_family(section, fam); };

    // Mode first: it decides which keys are required.
    if (mode_override) {
        spec.mode = *mode_override;
    } else if (const ConfigEntry* e = get("run", "mode")) {
        auto m = parse_mode(e->value);
        if (!m) fail(*e, "unknown mode '" + e->value + "'");
        spec.mode = *m;
    } else {
        throw ConfigError("run.mode", 0, "no mode given (set [run] mode or pass one on the command line)");
    }

    // [system]
    SystemConfig& sys = spec.system;
    if (const ConfigEntry* e = get("system", "omega")) sys.omega = number(*e);
    if (const ConfigEntry* e = get("system", "omega_m")) sys.omega_m = number(*e);
    if (sys.omega == sys.omega_m) {
        const ConfigEntry* e = get("system", "omega_m");
        throw ConfigError("system.omega_m", e ? e->line : 0, "omega_m must differ from omega (zero detuning)");
    }
    const double delta = sys.detuning();

    const bool sweeping = is_sweep(spec.mode);
    const bool qsd_mode = spec.mode == Mode::qsd;
    const bool collective_like = spec.mode == Mode::sweep_nm;
    // Groups larger than the spin-basis limit only make sense collectively.
    const int max_group = collective_like || spec.mode == Mode::collective ? 1000 : 24;

    auto count_key = [&](std::string_view key, bool required) -> int {
        const ConfigEntry* e = get("system", key);
        if (!e) {
            if (required) throw ConfigError("system." + std::string(key), 0, "missing required key");
            return 1;
        }
        return integer_in(*e, 1, max_group);
    };
    const bool n_from_sweep = spec.mode == Mode::sweep_n || spec.mode == Mode::sweep_nm;
    const bool m_from_sweep = spec.mode == Mode::sweep_nm;
    sys.n_charger = n_from_sweep ? 1 : count_key("n_charger", is_spin_mode(spec.mode));
    sys.m_battery = m_from_sweep ? 1 : count_key("m_battery", is_spin_mode(spec.mode));
    if (spec.mode == Mode::sweep_n || spec.mode == Mode::sweep_nm) {
        if (const ConfigEntry* e = get("system", "n_charger")) fail(*e, "N is set by [sweep] in this mode");
    }
    if (spec.mode == Mode::sweep_nm) {
        if (const ConfigEntry* e = get("system", "m_battery")) fail(*e, "M is set by [sweep] in this mode");
    }
    if (qsd_mode && (sys.n_charger != 1 || sys.m_battery != 1)) {
        throw ConfigError("system.n_charger", 0, "qsd mode covers one charger and one battery spin only");
    }
    if (sys.n_charger + sys.m_battery > 62) {
        throw ConfigError("system.n_charger", 0, "too many spins");
    }

    // Magnon couplings.
    const ConfigEntry* g_entry = family("system", "g");
    const ConfigEntry* gc_entry = family("system", "g_charger");
    const ConfigEntry* gb_entry = family("system", "g_battery");
    if (g_entry) spec.g_uniform = number(*g_entry) * (over_delta(*g_entry) ? delta : 1.0);
    if ((gc_entry || gb_entry) && (sweeping || qsd_mode)) {
        fail(gc_entry ? *gc_entry : *gb_entry, "per-spin couplings are not supported in this mode");
    }
    auto spin_couplings = [&](const ConfigEntry* e, int size, const char* name) {
        if (e) {
            std::vector<double> v = number_list(*e);
            if (static_cast<int>(v.size()) != size) {
                fail(*e, "expected " + std::to_string(size) + " values, got " + std::to_string(v.size()));
            }
            if (over_delta(*e)) {
                for (double& x : v) x *= delta;
            }
            return v;
        }
        if (!g_entry) {
            throw ConfigError(std::string("system.") + name, 0, "missing magnon coupling (set g or g_over_delta)");
        }
        return std::vector<double>(static_cast<std::size_t>(size), spec.g_uniform);
    };
    sys.g_charger = spin_couplings(gc_entry, sys.n_charger, "g");
    sys.g_battery = spin_couplings(gb_entry, sys.m_battery, "g");
    if (g_entry && spec.g_uniform == 0.0) fail(*g_entry, "magnon coupling must be nonzero");

    // Direct couplings.
    const ConfigEntry* j_entry = family("system", "j");
    const ConfigEntry* jc_entry = family("system", "j_charger");
    const ConfigEntry* jb_entry = family("system", "j_battery");
    if (j_entry) {
        if (j_entry->value.find(',') != std::string::npos) fail(*j_entry, "expected a single value or 'sweet'");
        spec.j_uniform = coupling_value(*j_entry, j_entry->value, delta);
    }
    if ((jc_entry || jb_entry) && (sweeping || qsd_mode)) {
        fail(jc_entry ? *jc_entry : *jb_entry, "coupling matrices are not supported in this mode");
    }
    if (qsd_mode && j_entry && (j_entry->value != "0" || spec.j_uniform.sweet)) {
        fail(*j_entry, "qsd mode has no direct coupling");
    }
    spec.uniform_couplings = !gc_entry && !gb_entry && !jc_entry && !jb_entry;
    if (spec.j_uniform.sweet && !g_entry) {
        fail(*j_entry, "the sweet spot needs a uniform magnon coupling g");
    }
    const double j_raw = g_entry ? resolve_j(spec.j_uniform, spec.g_uniform, sys.omega, sys.omega_m) : spec.j_uniform.value;
    auto direct = [&](const ConfigEntry* e, int size) {
        if (e) return matrix_value(*e, size, over_delta(*e) ? delta : 1.0);
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(size, size, j_raw);
        m.diagonal().setZero();
        return m;
    };
    if (!sweeping) {
        sys.j_charger = direct(jc_entry, sys.n_charger);
        sys.j_battery = direct(jb_entry, sys.m_battery);
    }
    if (const ConfigEntry* e = get("system", "fock_cutoff")) sys.fock_cutoff = integer_in(*e, 0, 64);

    if (!sweeping) {
        try {
            sys.validate();
        } catch (const std::invalid_argument& ex) {
            const ConfigEntry* e = jc_entry ? jc_entry : (jb_entry ? jb_entry : nullptr);
            throw ConfigError(e ? e->section + "." + e->key : "system", e ? e->line : 0, ex.what());
        }
    }

    // [run]
    if (const ConfigEntry* e = family("run", "horizon")) {
        const double v = number(*e);
        if (!(v > 0.0)) fail(*e, "horizon must be positive");
        if (e->key == "horizon") spec.horizon.raw = v;
        else if (e->key == "horizon_G") spec.horizon.g_units = v;
        else spec.horizon.periods = v;
    }
    if (const ConfigEntry* e = get("run", "samples")) spec.samples = static_cast<std::size_t>(integer_in(*e, 1, 10'000'000));
    if (const ConfigEntry* e = get("run", "tol")) {
        spec.evolve.tol = number(*e);
        if (!(spec.evolve.tol > 0.0) || spec.evolve.tol > 1e-2) fail(*e, "tolerance must lie in (0, 1e-2]");
    }
    if (const ConfigEntry* e = get("run", "eig_threshold")) {
        spec.evolve.eig_threshold = static_cast<std::size_t>(integer_in(*e, 0, 1 << 20));
    }
    if (const ConfigEntry* e = get("run", "method")) {
        const std::string v = lower(e->value);
        if (v == "auto") spec.evolve.method = Propagator::automatic;
        else if (v == "eigen") spec.evolve.method = Propagator::eigen;
        else if (v == "integrator") spec.evolve.method = Propagator::integrator;
        else fail(*e, "expected auto, eigen or integrator");
    }
    if (const ConfigEntry* e = get("run", "threads")) spec.threads = static_cast<std::size_t>(integer_in(*e, 1, 1024));
    if (const ConfigEntry* e = get("run", "allow_large_full")) spec.allow_large_full = boolean(*e);
    if (const ConfigEntry* e = get("run", "seed")) {
        spec.seed = static_cast<std::uint64_t>(to_integer(*e, e->value));
    }

    // [qsd]
    if (table.has_section("qsd") && !qsd_mode) {
        const ConfigEntry& first = *std::find_if(table.entries().begin(), table.entries().end(),
                                                 [](const ConfigEntry& c) { return c.section == "qsd"; });
        fail(first, "[qsd] keys are only used in qsd mode");
    }
    if (qsd_mode) {
        if (!g_entry) throw ConfigError("system.g", 0, "missing required key (g or g_over_delta)");
        if (const ConfigEntry* e = family("qsd", "gamma")) {
            spec.noise_strengths = number_list(*e);
            for (double& v : spec.noise_strengths) {
                if (over_delta(*e)) v *= std::abs(delta);
                if (v < 0.0) fail(*e, "noise strength must be >= 0");
            }
        }
    }

    // [sweep]
    if (table.has_section("sweep") && !sweeping) {
        const ConfigEntry& first = *std::find_if(table.entries().begin(), table.entries().end(),
                                                 [](const ConfigEntry& c) { return c.section == "sweep"; });
        fail(first, "[sweep] keys are only used in sweep modes");
    }
    if (sweeping) {
        SweepSpec& sw = spec.sweep;
        if (!g_entry) throw ConfigError("system.g", 0, "sweeps need a uniform magnon coupling (g or g_over_delta)");
        const int sweep_cap = spec.mode == Mode::sweep_nm ? 1000 : 24;
        auto require = [&](std::string_view key) -> const ConfigEntry& {
            const ConfigEntry* e = get("sweep", key);
            if (!e) throw ConfigError("sweep." + std::string(key), 0, "missing required key for " + std::string(to_string(spec.mode)));
            return *e;
        };
        auto forbid = [&](std::string_view key) {
            if (const ConfigEntry* e = get("sweep", key)) fail(*e, "not used by " + std::string(to_string(spec.mode)));
        };
        if (spec.mode == Mode::sweep_n) {
            sw.n_values = integer_list(require("n"), 1, sweep_cap);
            forbid("m");
            forbid("ratio");
        } else if (spec.mode == Mode::sweep_nm) {
            sw.ratios = integer_list(require("ratio"), 1, 1000);
            sw.m_values = integer_list(require("m"), 1, 1000);
            forbid("n");
        } else {
            forbid("n");
            forbid("m");
            forbid("ratio");
        }
        if (const ConfigEntry* e = family("sweep", "j")) {
            for (const std::string& item : split(e->value, ',')) sw.j_values.push_back(coupling_value(*e, item, delta));
        } else if (spec.mode == Mode::sweep_j) {
            throw ConfigError("sweep.j", 0, "missing required key (j or j_over_delta)");
        } else {
            sw.j_values.push_back(spec.j_uniform);
        }
        if (const ConfigEntry* e = get("sweep", "models")) {
            sw.models.clear();
            for (const std::string& item : split(e->value, ',')) {
                auto m = parse_model(item);
                if (!m) fail(*e, "unknown model '" + item + "'");
                if (std::find(sw.models.begin(), sw.models.end(), *m) == sw.models.end()) sw.models.push_back(*m);
            }
            const bool has_collective = std::count(sw.models.begin(), sw.models.end(), Model::collective) > 0;
            if (has_collective) {
                for (const CouplingChoice& j : sw.j_values) {
                    const double jr = resolve_j(j, spec.g_uniform, sys.omega, sys.omega_m);
                    const double g_eff = spec.g_uniform * spec.g_uniform / (sys.omega - sys.omega_m);
                    if (std::abs(jr + g_eff) > 1e-12 * std::abs(g_eff)) {
                        fail(*e, "the collective model needs the sweet spot J = -G for every J in the sweep");
                    }
                }
            }
            if (spec.mode == Mode::sweep_nm) {
                for (Model m : sw.models) {
                    if (m == Model::effective || m == Model::full) {
                        // Spin-basis models at large N would need 2^(N+M) states.
                        for (int r : sw.ratios) {
                            for (int mb : sw.m_values) {
                                if ((r + 1) * mb > 24) fail(*e, std::string(to_string(m)) + " model needs N + M <= 24");
                            }
                        }
                    }
                }
            }
        }
        if (const ConfigEntry* e = get("sweep", "full_max_n")) sw.full_max_n = integer_in(*e, 1, 24);
        if (const ConfigEntry* e = get("sweep", "curves")) sw.curves = boolean(*e);

        if (std::count(sw.models.begin(), sw.models.end(), Model::full) > 0 && !spec.allow_large_full) {
            auto check = [&](int n, int m) {
                if (sw.full_max_n && n > *sw.full_max_n) return;
                if (n + m > full_model_cap) {
                    throw ConfigError("sweep.models", get("sweep", "models") ? get("sweep", "models")->line : 0,
                                      "full-model point N=" + std::to_string(n) + ", M=" + std::to_string(m) +
                                          " exceeds N + M <= 12; set [run] allow_large_full = true or full_max_n");
                }
            };
            if (spec.mode == Mode::sweep_n) for (int n : sw.n_values) check(n, sys.m_battery);
            if (spec.mode == Mode::sweep_nm) for (int r : sw.ratios) for (int m : sw.m_values) check(r * m, m);
            if (spec.mode == Mode::sweep_j) check(sys.n_charger, sys.m_battery);
        }
    }

    if ((spec.mode == Mode::simulate_full || spec.mode == Mode::compare) && !spec.allow_large_full &&
        sys.n_charger + sys.m_battery > full_model_cap) {
        throw ConfigError("system.n_charger", get("system", "n_charger") ? get("system", "n_charger")->line : 0,
                          "full model limited to N + M <= 12; set [run] allow_large_full = true to override");
    }

    // Echo: canonical order, the resolved mode, and no thread count (it
    // never changes results).
    std::vector<const ConfigEntry*> shown;
    for (const ConfigEntry& e : table.entries()) {
        if (e.section == "run" && (e.key == "threads" || e.key == "mode")) continue;
        shown.push_back(&e);
    }
    auto rank = [](const ConfigEntry* e) {
        return std::find(section_order.begin(), section_order.end(), e->section) - section_order.begin();
    };
    std::stable_sort(shown.begin(), shown.end(), [&](const ConfigEntry* a, const ConfigEntry* b) {
        if (rank(a) != rank(b)) return rank(a) < rank(b);
        return a->key < b->key;
    });
    spec.echo.push_back("run.mode = " + std::string(to_string(spec.mode)));
    for (const ConfigEntry* e : shown) spec.echo.push_back(e->section + "." + e->key + " = " + e->value);
    if (g_entry) {
        spec.echo.push_back("derived.G = " + format_value(reference_coupling(sys)));
    }
    return spec;
}

} // namespace

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::simulate_full: return "simulate-full";
    case Mode::simulate_effective: return "simulate-effective";
    case Mode::collective: return "collective";
    case Mode::analytic: return "analytic";
    case Mode::qsd: return "qsd";
    case Mode::sweep_n: return "sweep-n";
    case Mode::sweep_nm: return "sweep-nm";
    case Mode::sweep_j: return "sweep-j";
    case Mode::compare: return "compare";
    }
    return "?";
}

std::string_view to_string(Model model) {
    switch (model) {
    case Model::full: return "full";
    case Model::effective: return "effective";
    case Model::collective: return "collective";
    case Model::analytic: return "analytic";
    }
    return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
    for (Mode m : {Mode::simulate_full, Mode::simulate_effective, Mode::collective, Mode::analytic, Mode::qsd,
                   Mode::sweep_n, Mode::sweep_nm, Mode::sweep_j, Mode::compare}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

std::optional<Model> parse_model(std::string_view text) {
    for (Model m : {Model::full, Model::effective, Model::collective, Model::analytic}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

double Horizon::resolve(int n_charger, int m_battery, double g_eff) const {
    if (raw) return *raw;
    if (g_units) return *g_units / std::abs(g_eff);
    return periods / 1.2 * default_horizon(n_charger, m_battery, g_eff);
}

std::vector<ConfigEntry> read_config_entries(std::string_view text) {
    std::vector<ConfigEntry> out;
    std::string section;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", line_no, "malformed section header '" + line + "'");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!key_table().contains(section)) {
                throw ConfigError("", line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("", line_no, "expected 'key = value', got '" + line + "'");
        ConfigEntry entry{section, trim(std::string_view(line).substr(0, eq)),
                          trim(std::string_view(line).substr(eq + 1)), line_no};
        if (entry.key.empty()) throw ConfigError("", line_no, "missing key before '='");
        if (section.empty()) throw ConfigError(entry.key, line_no, "key outside any section");
        const std::string full = section + "." + entry.key;
        const std::string_view fam = family_of(section, entry.key);
        if (fam.empty()) throw ConfigError(full, line_no, "unknown key");
        const std::string family_key = section + "." + std::string(fam);
        if (!seen.insert(family_key).second) {
            throw ConfigError(full, line_no, "given more than once (or mixed with another unit form of the same quantity)");
        }
        if (entry.value.empty()) throw ConfigError(full, line_no, "empty value");
        out.push_back(std::move(entry));
    }
    return out;
}

ExperimentSpec parse_config(std::string_view text, std::optional<Mode> mode_override) {
    return interpret(EntryTable(read_config_entries(text)), mode_override);
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5", "fig6"}; }

bool is_preset(std::string_view name) {
    const auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::string preset_text(std::string_view name) { return preset_body(name); }

ExperimentSpec load_preset(std::string_view name, std::string_view overrides) {
    std::vector<ConfigEntry> base = read_config_entries(preset_body(name));
    const std::vector<ConfigEntry> extra = read_config_entries(overrides);
    for (const ConfigEntry& e : extra) {
        const std::string_view fam = family_of(e.section, e.key);
        std::erase_if(base, [&](const ConfigEntry& b) { return b.section == e.section && family_of(b.section, b.key) == fam; });
    }
    // Preset lines are reported as line 0; user lines keep their numbers.
    for (ConfigEntry& b : base) b.line = 0;
    base.insert(base.end(), extra.begin(), extra.end());
    ExperimentSpec spec = interpret(EntryTable(std::move(base)), std::nullopt);
    spec.preset = std::string(name);
    spec.echo.insert(spec.echo.begin(), "preset = " + spec.preset);
    return spec;
}

double resolve_j(const CouplingChoice& j, double g, double omega, double omega_m) {
    if (!j.sweet) return j.value;
    return -(g * g / (omega - omega_m));
}

SystemConfig sweep_point_config(const ExperimentSpec& spec, int n_charger, int m_battery, const CouplingChoice& j) {
    const double j_raw = resolve_j(j, spec.g_uniform, spec.system.omega, spec.system.omega_m);
    SystemConfig c = SystemConfig::uniform(n_charger, m_battery, spec.g_uniform, j_raw, spec.system.omega,
                                           spec.system.omega_m);
    c.fock_cutoff = spec.system.fock_cutoff;
    return c;
}

double reference_coupling(const SystemConfig& config) {
    const double denom = config.omega - config.omega_m;
    double sum = 0.0;
    for (double gc : config.g_charger) {
        for (double gb : config.g_battery) sum += gc * gb;
    }
    const double count = static_cast<double>(config.g_charger.size() * config.g_battery.size());
    return count > 0 ? sum / count / denom : 0.0;
}

qsd::QsdParams qsd_params(const ExperimentSpec& spec, double noise_strength) {
    qsd::QsdParams p;
    p.g = spec.g_uniform;
    p.omega = spec.system.omega;
    p.omega_m = spec.system.omega_m;
    p.gamma_noise = noise_strength;
    return p;
}

} // namespace magbat
