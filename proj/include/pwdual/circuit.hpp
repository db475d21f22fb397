#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pwdual/fermion.hpp"

namespace pwd {

enum class GateKind {
    H,
    X,
    RZ,         // exp(-i angle Z / 2)
    PauliExp,   // exp(-i angle P), P given by `paulis` aligned with targets
    CNOT,       // targets = {control, target}
    CZ,
    SWAP,
    FSWAP,      // fermionic swap of two adjacent orbitals
    FSWAP_POW,  // exp(i angle f_swap)
    PHASE_N,    // exp(i angle n)
    FK,         // two-mode Fourier gate, angle = 2 pi k / M
    FK_DAG,
};

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<int> targets;
    double angle = 0.0;
    std::string paulis;  // PauliExp only

    static Gate h(int q) { return {GateKind::H, {q}}; }
    static Gate x(int q) { return {GateKind::X, {q}}; }
    static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, theta}; }
    static Gate cnot(int c, int t) { return {GateKind::CNOT, {c, t}}; }
    static Gate cz(int a, int b) { return {GateKind::CZ, {a, b}}; }
    static Gate swap(int a, int b) { return {GateKind::SWAP, {a, b}}; }
    static Gate fswap(int a, int b) { return {GateKind::FSWAP, {a, b}}; }
    static Gate fswap_pow(int a, int b, double theta) { return {GateKind::FSWAP_POW, {a, b}, theta}; }
    static Gate phase_n(int q, double theta) { return {GateKind::PHASE_N, {q}, theta}; }
    static Gate fk(int p, int q, int k, int M);
    static Gate fk_dag(int p, int q, int k, int M);
    static Gate pauli_exp(const PauliString& s, double theta);

    std::size_t arity() const { return targets.size(); }
    Gate inverse() const;
    PauliString pauli_string() const;  // PauliExp only
};

std::string gate_name(const Gate& g);

// Dense local unitary of a gate in the basis |b_{t0} + 2 b_{t1} + ...>.
DenseMatrix gate_local_matrix(const Gate& g);

// Single-particle matrix g of a number-conserving two-mode gate G, defined
// by G^dagger a^dagger_x G = sum_y g_{yx} a^dagger_y on (targets[0], targets[1]).
Eigen::Matrix2cd two_mode_single_particle(const Gate& g);

struct Connectivity {
    enum class Kind { AllToAll, Planar };
    Kind kind = Kind::AllToAll;
    int rows = 0;
    int cols = 0;

    static Connectivity all_to_all() { return {}; }
    // Qubit i sits at cell snake(i) of a rows x cols lattice: row i / cols,
    // column running left to right on even rows and right to left on odd rows.
    static Connectivity planar(int rows, int cols);

    std::pair<int, int> cell_of(int qubit) const;
    int qubit_at(int row, int col) const;
    bool adjacent(int a, int b) const;
    std::string to_string() const;
};

class Circuit {
public:
    explicit Circuit(int n_qubits = 0, Connectivity conn = Connectivity::all_to_all());

    int n_qubits() const { return n_qubits_; }
    const Connectivity& connectivity() const { return conn_; }
    const std::vector<Gate>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }

    void add(Gate g);
    void append(const Circuit& other);
    Circuit inverse() const;

    // Greedy layering: a gate goes into the earliest layer after every
    // earlier gate sharing one of its qubits.
    std::size_t depth() const;
    std::vector<std::vector<std::size_t>> layers() const;
    std::size_t count(GateKind kind) const;
    std::size_t multi_qubit_count() const;

    // Throws when a multi-qubit gate acts on non-adjacent lattice cells.
    void check_connectivity() const;

    std::string to_text() const;
    static Circuit parse(const std::string& text, int n_qubits,
                         Connectivity conn = Connectivity::all_to_all());

private:
    void validate(const Gate& g) const;

    int n_qubits_;
    Connectivity conn_;
    std::vector<Gate> gates_;
};

}  // namespace pwd
