#pragma once

#include <cstdint>
#include <vector>

#include "pwdual/circuit.hpp"
#include "pwdual/fermion.hpp"

namespace pwd {

enum class Exec { Serial, Parallel };

// Dense state over n qubits. Bit q of a basis index is the occupation of
// qubit q, so qubit 0 is the least-significant bit.
class Statevector {
public:
    Statevector() = default;
    explicit Statevector(int n_qubits);  // |0...0>
    Statevector(int n_qubits, std::vector<cplx> amplitudes);
    static Statevector basis(int n_qubits, std::uint64_t index);

    int n_qubits() const { return n_; }
    std::size_t dim() const { return amp_.size(); }
    std::vector<cplx>& amplitudes() { return amp_; }
    const std::vector<cplx>& amplitudes() const { return amp_; }
    cplx operator[](std::size_t i) const { return amp_[i]; }
    cplx& operator[](std::size_t i) { return amp_[i]; }

    double norm() const;
    void normalize();
    cplx inner(const Statevector& other) const;  // <this|other>
    Eigen::VectorXcd to_eigen() const;
    static Statevector from_eigen(int n_qubits, const Eigen::VectorXcd& v);

    std::string to_csv() const;

private:
    int n_ = 0;
    std::vector<cplx> amp_;
};

void apply_gate(Statevector& state, const Gate& gate, Exec exec = Exec::Parallel);
void apply_circuit(Statevector& state, const Circuit& circuit, Exec exec = Exec::Parallel);
// Applies exp(-i theta P) for a Pauli string P.
void apply_pauli_rotation(Statevector& state, const PauliString& p, double theta, Exec exec = Exec::Parallel);
// Applies the operator (not necessarily unitary) to a copy of the state.
Statevector apply_operator(const Statevector& state, const QubitOperator& op);

// Dense unitary of a circuit, assembled column by column.
DenseMatrix circuit_matrix(const Circuit& circuit, int cap = kDenseQubitCap);

cplx expectation_complex(const Statevector& state, const QubitOperator& op, Exec exec = Exec::Parallel);
double expectation(const Statevector& state, const QubitOperator& op, Exec exec = Exec::Parallel);

Statevector exact_evolve(const QubitOperator& h, double t, const Statevector& state, int cap = kDenseQubitCap);
// exp(-i H t) of a Hermitian matrix through scaling and squaring.
DenseMatrix exact_propagator(const DenseMatrix& h, double t);

std::vector<std::uint64_t> sample_bitstrings(const Statevector& state, const Circuit* basis_rotation,
                                             std::size_t shots, std::uint64_t seed);

}  // namespace pwd
