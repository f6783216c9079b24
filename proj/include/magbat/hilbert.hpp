// hilbert.hpp: excitation-number sectors of the charger (x) magnon (x) battery
// space, the full spin-magnon Hamiltonian, and diagonal observables.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace magbat {

using cplx = std::complex<double>;

// Physical parameters of the rotating-wave spin-magnon model (hbar = 1).
// All spins share the splitting `omega`; the magnon mode sits at `omega_m`.
struct SystemConfig {
    int n_charger{1};
    int m_battery{1};
    double omega{10.0};
    double omega_m{11.0};
    std::vector<double> g_charger;   // size n_charger
    std::vector<double> g_battery;   // size m_battery
    Eigen::MatrixXd j_charger;       // n_charger x n_charger, symmetric, zero diagonal
    Eigen::MatrixXd j_battery;       // m_battery x m_battery
    std::optional<int> fock_cutoff;  // defaults to the sector's excitation number

    // Delta = omega_m - omega. Positive in the regime the protocol uses.
    double detuning() const noexcept { return omega_m - omega; }

    // Uniform couplings: every spin couples with g to the magnon and every
    // intra-group pair with j.
    static SystemConfig uniform(int n_charger, int m_battery, double g, double j,
                                double omega = 10.0, double omega_m = 11.0);

    bool has_uniform_couplings(double rel_tol = 1e-12) const;

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

// One basis label. Spin i of the charger is bit (n_charger - 1 - i) of
// `charger`, so integer order equals lexicographic order on (c_1, ..., c_N).
struct OccupationLabel {
    std::uint64_t charger{0};
    int magnons{0};
    std::uint64_t battery{0};

    friend bool operator==(const OccupationLabel&, const OccupationLabel&) = default;
};

// Composite basis restricted to a fixed total excitation number (or, for
// enumerate_truncated_space, every excitation number up to the truncation).
// Labels are sorted in descending lexicographic order of
// (charger bits, magnon number, battery bits), which puts the fully charged
// product state |e..e, 0, g..g> first. Copies share one immutable table.
class SectorBasis {
public:
    SectorBasis() = default;

    int n_charger() const noexcept { return data_->n_charger; }
    int m_battery() const noexcept { return data_->m_battery; }
    int cutoff() const noexcept { return data_->cutoff; }
    // Empty for a truncated space spanning several sectors.
    std::optional<int> n_excitations() const noexcept { return data_->n_excitations; }

    std::size_t dimension() const noexcept { return data_->labels.size(); }
    std::span<const OccupationLabel> labels() const noexcept { return data_->labels; }
    const OccupationLabel& label(std::size_t index) const { return data_->labels.at(index); }
    std::optional<std::size_t> index_of(const OccupationLabel& label) const;

    bool charger_excited(const OccupationLabel& label, int i) const noexcept;
    bool battery_excited(const OccupationLabel& label, int k) const noexcept;
    int charger_excitations(const OccupationLabel& label) const noexcept;
    int battery_excitations(const OccupationLabel& label) const noexcept;
    int total_excitations(const OccupationLabel& label) const noexcept;

    // Ket notation, e.g. "|e,g;0;g>".
    std::string describe(std::size_t index) const;

    bool same_as(const SectorBasis& other) const noexcept { return data_ == other.data_; }

private:
    struct Data {
        int n_charger{0};
        int m_battery{0};
        int cutoff{0};
        std::optional<int> n_excitations;
        std::vector<OccupationLabel> labels;
    };

    explicit SectorBasis(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

    std::shared_ptr<const Data> data_;

    friend SectorBasis enumerate_sector_basis(int, int, int, int);
    friend SectorBasis enumerate_truncated_space(int, int, int);
};

// All labels with exactly n_excitations quanta. Throws std::invalid_argument
// when the sector is empty (n_excitations > N + M + cutoff) or arguments are
// negative.
SectorBasis enumerate_sector_basis(int n_charger, int m_battery, int cutoff, int n_excitations);

// Every label with at most `cutoff` magnons, all excitation numbers.
SectorBasis enumerate_truncated_space(int n_charger, int m_battery, int cutoff);

// Sparse Hermitian operator, optionally bound to the SectorBasis it acts on.
class HamiltonianMatrix {
public:
    using Sparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

    HamiltonianMatrix() = default;
    explicit HamiltonianMatrix(Sparse matrix, std::optional<SectorBasis> basis = std::nullopt);

    Eigen::Index dimension() const noexcept { return matrix_.rows(); }
    const Sparse& matrix() const noexcept { return matrix_; }
    const std::optional<SectorBasis>& basis() const noexcept { return basis_; }

    cplx entry(Eigen::Index row, Eigen::Index col) const { return matrix_.coeff(row, col); }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

    // Entrywise |H(p,q) - conj(H(q,p))| <= tol.
    bool is_hermitian(double tol = 0.0) const;
    bool is_real() const;
    Eigen::VectorXd real_diagonal() const;

private:
    Sparse matrix_;
    std::optional<SectorBasis> basis_;
};

// Collects Hermitian matrix elements. Each off-diagonal element is stored once
// and mirrored with its conjugate, so the result is Hermitian bit for bit.
class HermitianBuilder {
public:
    explicit HermitianBuilder(Eigen::Index dimension) : dim_(dimension) {}

    void add_diagonal(Eigen::Index p, double value);
    // Adds value at (row, col) and conj(value) at (col, row). row != col.
    void add_pair(Eigen::Index row, Eigen::Index col, cplx value);

    HamiltonianMatrix build(std::optional<SectorBasis> basis = std::nullopt) const;

private:
    Eigen::Index dim_;
    std::vector<Eigen::Triplet<cplx>> upper_;
};

// Complex amplitudes over a basis. The basis is absent for collective states.
struct StateVector {
    Eigen::VectorXcd amplitudes;
    std::optional<SectorBasis> basis;

    double norm() const { return amplitudes.norm(); }
    Eigen::Index dimension() const noexcept { return amplitudes.size(); }
};

// omega_m m^dag m + H_C + H_B + H_I restricted to `basis`. Throws
// std::invalid_argument when the basis was built for different N, M.
HamiltonianMatrix build_full_hamiltonian(const SystemConfig& config, const SectorBasis& basis);

// sum_k sigma+_Bk sigma-_Bk.
HamiltonianMatrix battery_occupation_operator(const SectorBasis& basis);
// m^dag m.
HamiltonianMatrix magnon_occupation_operator(const SectorBasis& basis);
// sum_i sigma+_Ci sigma-_Ci + m^dag m + sum_k sigma+_Bk sigma-_Bk.
HamiltonianMatrix excitation_number_operator(const SectorBasis& basis);

// Diagonals of the operators above, for cheap expectation values.
Eigen::VectorXd battery_occupation_diagonal(const SectorBasis& basis);
Eigen::VectorXd magnon_occupation_diagonal(const SectorBasis& basis);

// |label> as a normalized state. Throws if the label is not in the basis.
StateVector product_state(const SectorBasis& basis, const OccupationLabel& label);
// |e>^N |0>_m |g>^M; the basis must hold exactly N excitations.
StateVector charged_state(const SectorBasis& basis);

// Coordinate dump: "# dim=<d> nnz=<k>" then "row col re im" per stored entry,
// sorted by (row, col).
void write_matrix(std::ostream& out, const HamiltonianMatrix& h);

} // namespace magbat
