// hilbert.cpp: sector enumeration and full-model assembly

#include "magbat/hilbert.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace magbat {

namespace {

constexpr int kMaxSpinsPerGroup = 30;

bool nearly_equal(double a, double b, double rel_tol) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Descending lexicographic order on (charger, magnons, battery).
bool label_before(const OccupationLabel& a, const OccupationLabel& b) {
    return std::tie(a.charger, a.magnons, a.battery) > std::tie(b.charger, b.magnons, b.battery);
}

void check_group_sizes(int n_charger, int m_battery) {
    if (n_charger < 0 || m_battery < 0) {
        throw std::invalid_argument("spin counts must be non-negative");
    }
    if (n_charger > kMaxSpinsPerGroup || m_battery > kMaxSpinsPerGroup ||
        n_charger + m_battery > 2 * 12) {
        throw std::invalid_argument("spin-resolved basis supports at most 24 spins in total");
    }
}

void check_coupling_matrix(const Eigen::MatrixXd& j, int size, const char* name) {
    if (j.rows() != size || j.cols() != size) {
        throw std::invalid_argument(std::string(name) + " must be " + std::to_string(size) + "x" +
                                    std::to_string(size));
    }
    for (int a = 0; a < size; ++a) {
        if (j(a, a) != 0.0) {
            throw std::invalid_argument(std::string(name) + " must have a zero diagonal");
        }
        for (int b = 0; b < size; ++b) {
            if (!std::isfinite(j(a, b))) {
                throw std::invalid_argument(std::string(name) + " has non-finite entries");
            }
            if (j(a, b) != j(b, a)) {
                throw std::invalid_argument(std::string(name) + " must be symmetric");
            }
        }
    }
}

} // namespace

// ------------------------------- SystemConfig -------------------------------

SystemConfig SystemConfig::uniform(int n_charger, int m_battery, double g, double j,
                                   double omega, double omega_m) {
    SystemConfig c;
    c.n_charger = n_charger;
    c.m_battery = m_battery;
    c.omega = omega;
    c.omega_m = omega_m;
    c.g_charger.assign(static_cast<std::size_t>(std::max(n_charger, 0)), g);
    c.g_battery.assign(static_cast<std::size_t>(std::max(m_battery, 0)), g);
    c.j_charger = Eigen::MatrixXd::Constant(n_charger, n_charger, j);
    c.j_charger.diagonal().setZero();
    c.j_battery = Eigen::MatrixXd::Constant(m_battery, m_battery, j);
    c.j_battery.diagonal().setZero();
    return c;
}

bool SystemConfig::has_uniform_couplings(double rel_tol) const {
    if (g_charger.empty() || g_battery.empty()) return false;
    const double g = g_charger.front();
    auto same_g = [&](double x) { return nearly_equal(x, g, rel_tol); };
    if (!std::all_of(g_charger.begin(), g_charger.end(), same_g) ||
        !std::all_of(g_battery.begin(), g_battery.end(), same_g)) {
        return false;
    }
    std::optional<double> j;
    auto same_j = [&](const Eigen::MatrixXd& m) {
        for (Eigen::Index a = 0; a < m.rows(); ++a) {
            for (Eigen::Index b = 0; b < m.cols(); ++b) {
                if (a == b) continue;
                if (!j) j = m(a, b);
                if (!nearly_equal(m(a, b), *j, rel_tol)) return false;
            }
        }
        return true;
    };
    return same_j(j_charger) && same_j(j_battery);
}

void SystemConfig::validate() const {
    if (n_charger < 1 || m_battery < 1) {
        throw std::invalid_argument("n_charger and m_battery must be positive");
    }
    if (!std::isfinite(omega) || !std::isfinite(omega_m)) {
        throw std::invalid_argument("frequencies must be finite");
    }
    if (omega == omega_m) {
        throw std::invalid_argument("omega_m must differ from omega (zero detuning)");
    }
    if (g_charger.size() != static_cast<std::size_t>(n_charger)) {
        throw std::invalid_argument("g_charger must have n_charger entries");
    }
    if (g_battery.size() != static_cast<std::size_t>(m_battery)) {
        throw std::invalid_argument("g_battery must have m_battery entries");
    }
    for (double g : g_charger) {
        if (!std::isfinite(g)) throw std::invalid_argument("g_charger has non-finite entries");
    }
    for (double g : g_battery) {
        if (!std::isfinite(g)) throw std::invalid_argument("g_battery has non-finite entries");
    }
    check_coupling_matrix(j_charger, n_charger, "j_charger");
    check_coupling_matrix(j_battery, m_battery, "j_battery");
    if (fock_cutoff && *fock_cutoff < 0) {
        throw std::invalid_argument("fock_cutoff must be non-negative");
    }
}

// -------------------------------- SectorBasis -------------------------------

std::optional<std::size_t> SectorBasis::index_of(const OccupationLabel& label) const {
    const auto& labels = data_->labels;
    auto it = std::lower_bound(labels.begin(), labels.end(), label, label_before);
    if (it == labels.end() || !(*it == label)) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
}

bool SectorBasis::charger_excited(const OccupationLabel& label, int i) const noexcept {
    return ((label.charger >> (data_->n_charger - 1 - i)) & 1U) != 0;
}

bool SectorBasis::battery_excited(const OccupationLabel& label, int k) const noexcept {
    return ((label.battery >> (data_->m_battery - 1 - k)) & 1U) != 0;
}

int SectorBasis::charger_excitations(const OccupationLabel& label) const noexcept {
    return std::popcount(label.charger);
}

int SectorBasis::battery_excitations(const OccupationLabel& label) const noexcept {
    return std::popcount(label.battery);
}

int SectorBasis::total_excitations(const OccupationLabel& label) const noexcept {
    return std::popcount(label.charger) + label.magnons + std::popcount(label.battery);
}

std::string SectorBasis::describe(std::size_t index) const {
    const auto& l = label(index);
    std::string out = "|";
    for (int i = 0; i < n_charger(); ++i) {
        if (i) out += ',';
        out += charger_excited(l, i) ? 'e' : 'g';
    }
    out += ';' + std::to_string(l.magnons) + ';';
    for (int k = 0; k < m_battery(); ++k) {
        if (k) out += ',';
        out += battery_excited(l, k) ? 'e' : 'g';
    }
    return out + '>';
}

namespace {

std::vector<OccupationLabel> collect_labels(int n_charger, int m_battery, int cutoff,
                                            std::optional<int> n_excitations) {
    std::vector<OccupationLabel> labels;
    const std::uint64_t c_top = (std::uint64_t{1} << n_charger);
    const std::uint64_t b_top = (std::uint64_t{1} << m_battery);
    for (std::uint64_t c = c_top; c-- > 0;) {
        const int nc = std::popcount(c);
        for (int n = cutoff; n >= 0; --n) {
            if (n_excitations && nc + n > *n_excitations) continue;
            for (std::uint64_t b = b_top; b-- > 0;) {
                const int total = nc + n + std::popcount(b);
                if (n_excitations && total != *n_excitations) continue;
                labels.push_back({c, n, b});
            }
        }
    }
    return labels;
}

} // namespace

SectorBasis enumerate_sector_basis(int n_charger, int m_battery, int cutoff, int n_excitations) {
    check_group_sizes(n_charger, m_battery);
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    if (n_excitations < 0) throw std::invalid_argument("n_excitations must be non-negative");
    if (n_excitations > n_charger + m_battery + cutoff) {
        throw std::invalid_argument("empty sector: n_excitations exceeds N + M + cutoff");
    }
    SectorBasis::Data data;
    data.n_charger = n_charger;
    data.m_battery = m_battery;
    data.cutoff = cutoff;
    data.n_excitations = n_excitations;
    data.labels = collect_labels(n_charger, m_battery, cutoff, n_excitations);
    return SectorBasis(std::make_shared<const SectorBasis::Data>(std::move(data)));
}

SectorBasis enumerate_truncated_space(int n_charger, int m_battery, int cutoff) {
    check_group_sizes(n_charger, m_battery);
    if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
    SectorBasis::Data data;
    data.n_charger = n_charger;
    data.m_battery = m_battery;
    data.cutoff = cutoff;
    data.labels = collect_labels(n_charger, m_battery, cutoff, std::nullopt);
    return SectorBasis(std::make_shared<const SectorBasis::Data>(std::move(data)));
}

// ----------------------------- HamiltonianMatrix ----------------------------

HamiltonianMatrix::HamiltonianMatrix(Sparse matrix, std::optional<SectorBasis> basis)
    : matrix_(std::move(matrix)), basis_(std::move(basis)) {
    if (matrix_.rows() != matrix_.cols()) {
        throw std::invalid_argument("HamiltonianMatrix must be square");
    }
    if (basis_ && static_cast<Eigen::Index>(basis_->dimension()) != matrix_.rows()) {
        throw std::invalid_argument("HamiltonianMatrix dimension does not match its basis");
    }
    matrix_.makeCompressed();
}

bool HamiltonianMatrix::is_hermitian(double tol) const {
    for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
        for (Sparse::InnerIterator it(matrix_, r); it; ++it) {
            const cplx mirror = matrix_.coeff(it.col(), it.row());
            if (std::abs(it.value() - std::conj(mirror)) > tol) return false;
        }
    }
    return true;
}

bool HamiltonianMatrix::is_real() const {
    for (Eigen::Index k = 0; k < matrix_.nonZeros(); ++k) {
        if (matrix_.valuePtr()[k].imag() != 0.0) return false;
    }
    return true;
}

Eigen::VectorXd HamiltonianMatrix::real_diagonal() const {
    Eigen::VectorXd d(dimension());
    for (Eigen::Index p = 0; p < dimension(); ++p) d(p) = matrix_.coeff(p, p).real();
    return d;
}

void HermitianBuilder::add_diagonal(Eigen::Index p, double value) {
    if (value != 0.0) upper_.emplace_back(p, p, cplx{value, 0.0});
}

void HermitianBuilder::add_pair(Eigen::Index row, Eigen::Index col, cplx value) {
    if (row == col) throw std::invalid_argument("add_pair needs distinct indices");
    if (value == cplx{}) return;
    if (row < col) {
        upper_.emplace_back(row, col, value);
    } else {
        upper_.emplace_back(col, row, std::conj(value));
    }
}

HamiltonianMatrix HermitianBuilder::build(std::optional<SectorBasis> basis) const {
    using ColMajor = Eigen::SparseMatrix<cplx>;
    std::vector<Eigen::Triplet<cplx>> strict;
    std::vector<Eigen::Triplet<cplx>> diag;
    for (const auto& t : upper_) {
        (t.row() == t.col() ? diag : strict).push_back(t);
    }
    ColMajor upper(dim_, dim_);
    upper.setFromTriplets(strict.begin(), strict.end());
    ColMajor d(dim_, dim_);
    d.setFromTriplets(diag.begin(), diag.end());
    ColMajor lower = upper.adjoint();
    ColMajor full = upper + lower + d;
    full.prune(cplx{0.0, 0.0});
    return HamiltonianMatrix(HamiltonianMatrix::Sparse(full), std::move(basis));
}

// ------------------------------ Model assembly ------------------------------

HamiltonianMatrix build_full_hamiltonian(const SystemConfig& config, const SectorBasis& basis) {
    config.validate();
    if (basis.n_charger() != config.n_charger || basis.m_battery() != config.m_battery) {
        throw std::invalid_argument("basis was built for a different (N, M) than the config");
    }
    if (config.fock_cutoff && *config.fock_cutoff != basis.cutoff()) {
        throw std::invalid_argument("basis cutoff differs from config.fock_cutoff");
    }

    const int n = config.n_charger;
    const int m = config.m_battery;
    HermitianBuilder builder(static_cast<Eigen::Index>(basis.dimension()));

    const auto labels = basis.labels();
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const OccupationLabel& l = labels[p];
        const auto ip = static_cast<Eigen::Index>(p);
        const int spins_up = basis.charger_excitations(l) + basis.battery_excitations(l);
        builder.add_diagonal(ip, config.omega * spins_up + config.omega_m * l.magnons);

        // g sigma+ m: absorb one magnon into a ground-state spin. The reverse
        // process is the mirrored element.
        if (l.magnons > 0) {
            const double boson = std::sqrt(static_cast<double>(l.magnons));
            for (int i = 0; i < n; ++i) {
                if (basis.charger_excited(l, i)) continue;
                OccupationLabel t = l;
                t.charger |= std::uint64_t{1} << (n - 1 - i);
                t.magnons -= 1;
                if (auto q = basis.index_of(t)) {
                    builder.add_pair(static_cast<Eigen::Index>(*q), ip, config.g_charger[i] * boson);
                }
            }
            for (int k = 0; k < m; ++k) {
                if (basis.battery_excited(l, k)) continue;
                OccupationLabel t = l;
                t.battery |= std::uint64_t{1} << (m - 1 - k);
                t.magnons -= 1;
                if (auto q = basis.index_of(t)) {
                    builder.add_pair(static_cast<Eigen::Index>(*q), ip, config.g_battery[k] * boson);
                }
            }
        }

        // J (sigma+_a sigma-_b + h.c.) per unordered pair a < b. Each
        // connection is added from the side where a is excited; the mirror
        // supplies the other.
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                if (config.j_charger(a, b) == 0.0) continue;
                if (!basis.charger_excited(l, a) || basis.charger_excited(l, b)) continue;
                OccupationLabel t = l;
                t.charger ^= (std::uint64_t{1} << (n - 1 - a)) | (std::uint64_t{1} << (n - 1 - b));
                if (auto q = basis.index_of(t)) {
                    builder.add_pair(static_cast<Eigen::Index>(*q), ip, config.j_charger(a, b));
                }
            }
        }
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                if (config.j_battery(a, b) == 0.0) continue;
                if (!basis.battery_excited(l, a) || basis.battery_excited(l, b)) continue;
                OccupationLabel t = l;
                t.battery ^= (std::uint64_t{1} << (m - 1 - a)) | (std::uint64_t{1} << (m - 1 - b));
                if (auto q = basis.index_of(t)) {
                    builder.add_pair(static_cast<Eigen::Index>(*q), ip, config.j_battery(a, b));
                }
            }
        }
    }
    return builder.build(basis);
}

namespace {

HamiltonianMatrix diagonal_operator(const SectorBasis& basis, const Eigen::VectorXd& diag) {
    HermitianBuilder builder(diag.size());
    for (Eigen::Index p = 0; p < diag.size(); ++p) builder.add_diagonal(p, diag(p));
    return builder.build(basis);
}

} // namespace

Eigen::VectorXd battery_occupation_diagonal(const SectorBasis& basis) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t p = 0; p < basis.dimension(); ++p) {
        d(static_cast<Eigen::Index>(p)) = basis.battery_excitations(basis.label(p));
    }
    return d;
}

Eigen::VectorXd magnon_occupation_diagonal(const SectorBasis& basis) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t p = 0; p < basis.dimension(); ++p) {
        d(static_cast<Eigen::Index>(p)) = basis.label(p).magnons;
    }
    return d;
}

HamiltonianMatrix battery_occupation_operator(const SectorBasis& basis) {
    return diagonal_operator(basis, battery_occupation_diagonal(basis));
}

HamiltonianMatrix magnon_occupation_operator(const SectorBasis& basis) {
    return diagonal_operator(basis, magnon_occupation_diagonal(basis));
}

HamiltonianMatrix excitation_number_operator(const SectorBasis& basis) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(basis.dimension()));
    for (std::size_t p = 0; p < basis.dimension(); ++p) {
        d(static_cast<Eigen::Index>(p)) = basis.total_excitations(basis.label(p));
    }
    return diagonal_operator(basis, d);
}

StateVector product_state(const SectorBasis& basis, const OccupationLabel& label) {
    auto idx = basis.index_of(label);
    if (!idx) throw std::invalid_argument("label is not part of the basis");
    StateVector psi{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension())), basis};
    psi.amplitudes(static_cast<Eigen::Index>(*idx)) = 1.0;
    return psi;
}

StateVector charged_state(const SectorBasis& basis) {
    if (basis.n_excitations() != basis.n_charger()) {
        throw std::invalid_argument("charged state needs the sector with exactly N excitations");
    }
    const std::uint64_t all_up = (std::uint64_t{1} << basis.n_charger()) - 1;
    return product_state(basis, OccupationLabel{all_up, 0, 0});
}

void write_matrix(std::ostream& out, const HamiltonianMatrix& h) {
    const auto& m = h.matrix();
    out << "# dim=" << h.dimension() << " nnz=" << m.nonZeros() << '\n';
    char line[128];
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        for (HamiltonianMatrix::Sparse::InnerIterator it(m, r); it; ++it) {
            std::snprintf(line, sizeof line, "%lld %lld %.17g %.17g\n",
                          static_cast<long long>(it.row()), static_cast<long long>(it.col()),
                          it.value().real(), it.value().imag());
            out << line;
        }
    }
}

} // namespace magbat
