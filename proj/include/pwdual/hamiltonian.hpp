#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pwdual/fermion.hpp"
#include "pwdual/geometry.hpp"

namespace pwd {

enum class Representation { PlaneWave, Dual, FiniteDifference };

std::string to_string(Representation r);

struct FiniteDifferenceGrid {
    std::vector<int> points;  // grid points per axis
    double h = 1.0;
    bool spinful = true;

    std::size_t n_sites() const;
    std::size_t n_qubits() const { return n_sites() * (spinful ? 2 : 1); }
    std::vector<int> site(std::size_t flat) const;
    std::size_t flat_site(const std::vector<int>& x) const;
};

struct HamiltonianSet {
    Representation representation = Representation::Dual;
    std::optional<ModeGrid> grid;
    std::optional<FiniteDifferenceGrid> fd_grid;
    std::vector<Nucleus> nuclei;
    std::optional<double> truncated_D;
    FermionOperator T, U, V;
    // Stands in for the cancelled nu = 0 divergence; user supplied.
    double constant = 0.0;

    int n_qubits() const;
    FermionOperator total(bool with_constant = true) const;
};

// Coefficient tables of the dual-basis Hamiltonian over spatial sites.
// T = sum_sigma sum_pq t(p,q) a+_{p sigma} a_{q sigma},
// U = sum_{p sigma} u(p) n_{p sigma},
// V = sum over unordered pairs of distinct spin-orbitals of
//     2 v(p,q) n_{p sigma} n_{q sigma'} with pairs beyond the truncation
//     distance removed (keep(p,q) false).
struct DualCoefficients {
    Eigen::MatrixXd t;
    Eigen::VectorXd u;
    Eigen::MatrixXd v;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep;
};

DualCoefficients dual_coefficients(const ModeGrid& grid, const std::vector<Nucleus>& nuclei,
                                   std::optional<double> truncated_D);

HamiltonianSet build_plane_wave(const ModeGrid& grid, const std::vector<Nucleus>& nuclei,
                                std::optional<double> truncated_D = std::nullopt, double constant = 0.0);
HamiltonianSet build_dual(const ModeGrid& grid, const std::vector<Nucleus>& nuclei,
                          std::optional<double> truncated_D = std::nullopt, double constant = 0.0);

// Jordan-Wigner image of T + U + V plus constant times identity.
QubitOperator build_qubit(const HamiltonianSet& hs);
// Parts of the qubit Hamiltonian, without the constant.
QubitOperator build_qubit_part(const HamiltonianSet& hs, const FermionOperator& part);

struct LambdaMode {
    bool analytic = true;
    double custom = 0.0;
};

// Mean Coulomb repulsion of a uniform charge in a cube of unit side.
double analytic_lambda_unit();

HamiltonianSet build_finite_difference(const FiniteDifferenceGrid& grid, const std::vector<Nucleus>& nuclei,
                                       LambdaMode lambda = {});

// Number of distinct normal-ordered two-body terms in V.
std::size_t two_body_term_count(const HamiltonianSet& hs);

struct NormBounds {
    double maxV = 0.0;
    double maxU = 0.0;
    double maxT = 0.0;
    double maxH = 0.0;
    double triangle_T = 0.0;
    double triangle_H = 0.0;
    double lambda = 0.0;
};

NormBounds norm_bounds(const HamiltonianSet& hs, int eta);

// Sum over nu != 0 of 1 / k_nu^2.
double inverse_k2_sum(const ModeGrid& grid);

std::string serialize_hamiltonian(const HamiltonianSet& hs);
HamiltonianSet parse_hamiltonian(const std::string& text);

}  // namespace pwd
