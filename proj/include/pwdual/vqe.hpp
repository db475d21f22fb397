#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pwdual/circuit.hpp"
#include "pwdual/hamiltonian.hpp"
#include "pwdual/statevector.hpp"

namespace pwd {

enum class Sharing { Full, TranslationInvariant };

struct AnsatzSpec {
    int layers = 1;
    Sharing sharing = Sharing::Full;
    // Single layer U_V applied to the reference, no kinetic layer.
    bool minimal = false;
    Connectivity conn = Connectivity::all_to_all();
};

struct ReferenceState {
    Statevector state;
    std::vector<int> occupied_qubits;  // plane-wave modes filled before the transform
    double kinetic_energy = 0.0;       // sum of k^2/2 over filled modes
    bool degenerate_shell = false;     // the last filled shell was split by the tie-break
    std::string warning;
};

// Fills the eta lowest-k^2 plane-wave modes (ties broken by flat mode index;
// spinful grids fill ceil(eta/2) up and floor(eta/2) down) and applies the
// inverse Fourier transform circuit.
ReferenceState prepare_reference(const ModeGrid& grid, int eta);

// Parameter layout of the layered ansatz. Each layer carries kinetic phases
// theta_p (absent in minimal mode), Z phases theta_pp and ZZ phases theta_pq,
// applied as exp(i theta Z) and exp(i theta Z Z).
class Ansatz {
public:
    Ansatz(const ModeGrid& grid, AnsatzSpec spec);

    const AnsatzSpec& spec() const { return spec_; }
    int n_qubits() const { return n_; }
    std::size_t parameters_per_layer() const { return n_kin_ + n_z_ + n_zz_; }
    std::size_t parameter_count() const { return parameters_per_layer() * static_cast<std::size_t>(spec_.layers); }
    std::size_t kinetic_parameters() const { return n_kin_; }
    std::size_t z_parameters() const { return n_z_; }
    std::size_t zz_parameters() const { return n_zz_; }

    // Parameter slot used by each gate within a layer.
    const std::vector<std::size_t>& kinetic_slot() const { return kin_slot_; }      // per qubit
    const std::vector<std::size_t>& z_slot() const { return z_slot_; }              // per qubit
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }        // p < q
    const std::vector<std::size_t>& zz_slot() const { return zz_slot_; }            // per pair

    Circuit circuit(const std::vector<double>& theta) const;
    // Applies the circuit to `reference`.
    Statevector state(const Statevector& reference, const std::vector<double>& theta) const;

    // Full-sharing parameter vector equivalent to `theta` (ties expanded).
    std::vector<double> expand_to_full(const std::vector<double>& theta) const;

private:
    ModeGrid grid_;
    AnsatzSpec spec_;
    int n_;
    std::size_t n_kin_ = 0, n_z_ = 0, n_zz_ = 0;
    std::vector<std::size_t> kin_slot_, z_slot_, zz_slot_;
    std::vector<std::pair<int, int>> pairs_;
    Circuit ffft_;
};

struct OptimizerConfig {
    int max_evaluations = 4000;
    int restarts = 3;
    double initial_step = 0.3;
    double tolerance = 1e-10;  // simplex size at which a run stops
    std::uint64_t seed = 7;
};

struct OptimizeResult {
    std::vector<double> theta;
    double energy = 0.0;
    double reference_energy = 0.0;
    std::vector<double> trace;      // best energy so far after each evaluation
    std::vector<double> evaluated;  // every objective value, in order
    int evaluations = 0;
    bool budget_exhausted = false;
};

// Dense-expectation objective E(theta) = <psi(theta)|H|psi(theta)>.
class EnergyObjective {
public:
    EnergyObjective(const Ansatz& ansatz, const Statevector& reference, const QubitOperator& h);
    double operator()(const std::vector<double>& theta) const;

private:
    const Ansatz& ansatz_;
    Statevector reference_;
    SparseMatrix h_;
};

// Nelder-Mead over all parameters starting from theta0 (zeros by default),
// restarted around the incumbent with seeded perturbations.
OptimizeResult optimize(const Ansatz& ansatz, const HamiltonianSet& hs, const Statevector& reference,
                        const OptimizerConfig& cfg, std::vector<double> theta0 = {});

// Same, restricted to the parameter indices in `free`, others held at theta0.
OptimizeResult optimize_subset(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> theta0, const std::vector<std::size_t>& free,
                               const OptimizerConfig& cfg);

// Trains layer m against H(m/M) = T + U + (m/M) V with earlier layers frozen.
OptimizeResult layer_train(const Ansatz& ansatz, const HamiltonianSet& hs, const Statevector& reference,
                           const OptimizerConfig& cfg);

// H(tau) = T + U + tau V as a qubit operator (constant included).
QubitOperator scheduled_hamiltonian(const HamiltonianSet& hs, double tau);

// Ground energy of H restricted to eta particles, by dense diagonalisation.
double sector_ground_energy(const QubitOperator& h, int n_qubits, int eta);

}  // namespace pwd
