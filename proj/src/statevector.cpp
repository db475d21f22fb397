#include "pwdual/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "pwdual/kernels.hpp"
#include "pwdual/rng.hpp"

namespace pwd {

double CounterRng::normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Statevector::Statevector(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("statevector qubit count out of range");
    amp_.assign(std::size_t{1} << n_qubits, cplx(0.0));
    amp_[0] = 1.0;
}

Statevector::Statevector(int n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
    if (amp_.size() != (std::size_t{1} << n_qubits)) throw std::invalid_argument("amplitude count mismatch");
}

Statevector Statevector::basis(int n_qubits, std::uint64_t index) {
    Statevector s(n_qubits);
    if (index >= s.dim()) throw std::out_of_range("basis index out of range");
    s.amp_[0] = 0.0;
    s.amp_[index] = 1.0;
    return s;
}

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void Statevector::normalize() {
    double nrm = norm();
    if (nrm == 0.0) throw std::domain_error("cannot normalise the zero vector");
    for (auto& a : amp_) a /= nrm;
}

cplx Statevector::inner(const Statevector& other) const {
    if (other.dim() != dim()) throw std::invalid_argument("dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * other.amp_[i];
    return s;
}

Eigen::VectorXcd Statevector::to_eigen() const {
    return Eigen::Map<const Eigen::VectorXcd>(amp_.data(), static_cast<long>(amp_.size()));
}

Statevector Statevector::from_eigen(int n_qubits, const Eigen::VectorXcd& v) {
    return Statevector(n_qubits, std::vector<cplx>(v.data(), v.data() + v.size()));
}

std::string Statevector::to_csv() const {
    std::string out = "index,re,im\n";
    for (std::size_t i = 0; i < amp_.size(); ++i)
        out += std::to_string(i) + ',' + format_double(amp_[i].real()) + ',' + format_double(amp_[i].imag()) + '\n';
    return out;
}

namespace {

void check_targets(const Statevector& s, const Gate& g) {
    for (int q : g.targets)
        if (q < 0 || q >= s.n_qubits()) throw std::out_of_range("gate target out of range");
}

}  // namespace

void apply_pauli_rotation(Statevector& state, const PauliString& p, double theta, Exec exec) {
    if (p.max_qubit() >= state.n_qubits()) throw std::out_of_range("Pauli rotation target out of range");
    auto* a = state.amplitudes().data();
    if (exec == Exec::Serial)
        kernels::serial::pauli_rotation(a, state.dim(), p.x_mask(), p.z_mask(), p.y_count(), theta);
    else
        kernels::omp::pauli_rotation(a, state.dim(), p.x_mask(), p.z_mask(), p.y_count(), theta);
}

void apply_gate(Statevector& state, const Gate& gate, Exec exec) {
    check_targets(state, gate);
    if (gate.kind == GateKind::PauliExp) {
        apply_pauli_rotation(state, gate.pauli_string(), gate.angle, exec);
        return;
    }
    DenseMatrix m = gate_local_matrix(gate);
    // Row-major copy for the kernels.
    std::vector<cplx> flat(static_cast<std::size_t>(m.size()));
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) flat[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
    auto* a = state.amplitudes().data();
    if (gate.arity() == 1) {
        if (exec == Exec::Serial)
            kernels::serial::apply_1q(a, state.dim(), gate.targets[0], flat.data());
        else
            kernels::omp::apply_1q(a, state.dim(), gate.targets[0], flat.data());
    } else if (gate.arity() == 2) {
        if (exec == Exec::Serial)
            kernels::serial::apply_2q(a, state.dim(), gate.targets[0], gate.targets[1], flat.data());
        else
            kernels::omp::apply_2q(a, state.dim(), gate.targets[0], gate.targets[1], flat.data());
    } else {
        throw std::invalid_argument("unsupported gate arity");
    }
}

void apply_circuit(Statevector& state, const Circuit& circuit, Exec exec) {
    if (circuit.n_qubits() != state.n_qubits()) throw std::invalid_argument("circuit width does not match state");
    for (const auto& g : circuit.gates()) apply_gate(state, g, exec);
}

Statevector apply_operator(const Statevector& state, const QubitOperator& op) {
    if (op.max_qubit() >= state.n_qubits()) throw std::out_of_range("operator acts outside the register");
    Statevector out(state.n_qubits(), std::vector<cplx>(state.dim(), cplx(0.0)));
    const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    for (const auto& [s, c] : op.terms()) {
        const std::uint64_t x = s.x_mask(), z = s.z_mask();
        const cplx base = c * ipow[s.y_count() % 4];
        for (std::size_t b = 0; b < state.dim(); ++b) out[b ^ x] += kernels::pauli_phase(b, z, base) * state[b];
    }
    return out;
}

DenseMatrix circuit_matrix(const Circuit& circuit, int cap) {
    const int n = circuit.n_qubits();
    if (n > cap) throw std::length_error("dense matrix cap exceeded");
    const std::size_t dim = std::size_t{1} << n;
    DenseMatrix u(static_cast<long>(dim), static_cast<long>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        Statevector s = Statevector::basis(n, col);
        apply_circuit(s, circuit);
        u.col(static_cast<long>(col)) = s.to_eigen();
    }
    return u;
}

cplx expectation_complex(const Statevector& state, const QubitOperator& op, Exec exec) {
    if (op.max_qubit() >= state.n_qubits()) throw std::out_of_range("operator acts outside the register");
    cplx total = 0.0;
    const auto* a = state.amplitudes().data();
    for (const auto& [s, c] : op.terms()) {
        cplx e = exec == Exec::Serial
                     ? kernels::serial::pauli_expectation(a, state.dim(), s.x_mask(), s.z_mask(), s.y_count())
                     : kernels::omp::pauli_expectation(a, state.dim(), s.x_mask(), s.z_mask(), s.y_count());
        total += c * e;
    }
    return total;
}

double expectation(const Statevector& state, const QubitOperator& op, Exec exec) {
    if (!op.is_hermitian()) throw std::invalid_argument("expectation requires a Hermitian operator");
    cplx e = expectation_complex(state, op, exec);
    if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real())))
        throw std::runtime_error("expectation has a non-negligible imaginary part");
    return e.real();
}

DenseMatrix exact_propagator(const DenseMatrix& h, double t) {
    DenseMatrix a = cplx(0.0, -t) * h;
    return a.exp();
}

Statevector exact_evolve(const QubitOperator& h, double t, const Statevector& state, int cap) {
    if (state.n_qubits() > cap) throw std::length_error("exact evolution unavailable above the dense cap");
    DenseMatrix hm = to_matrix(h, state.n_qubits(), cap);
    Eigen::VectorXcd v = exact_propagator(hm, t) * state.to_eigen();
    return Statevector::from_eigen(state.n_qubits(), v);
}

std::vector<std::uint64_t> sample_bitstrings(const Statevector& state, const Circuit* basis_rotation,
                                             std::size_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    Statevector rotated = state;
    if (basis_rotation) apply_circuit(rotated, *basis_rotation);
    std::vector<double> cdf(rotated.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < rotated.dim(); ++i) {
        acc += std::norm(rotated[i]);
        cdf[i] = acc;
    }
    CounterRng rng(seed);
    std::vector<std::uint64_t> out(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        double u = rng.uniform_at(s) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out[s] = static_cast<std::uint64_t>(it - cdf.begin());
    }
    return out;
}

}  // namespace pwd
