#pragma once

#include <string>
#include <vector>

#include "pwdual/hamiltonian.hpp"
#include "pwdual/statevector.hpp"

namespace pwd {

// Selection index l = (p * n + q) * 2 + b over n system qubits.
struct TermIndex {
    int p = 0;
    int q = 0;
    int b = 0;

    std::size_t encode(int n) const {
        return (static_cast<std::size_t>(p) * static_cast<std::size_t>(n) + static_cast<std::size_t>(q)) * 2 +
               static_cast<std::size_t>(b);
    }
    static TermIndex decode(std::size_t l, int n);
};

struct LcuTerm {
    TermIndex index;
    double weight = 0.0;  // signed; PREPARE uses |weight|, SELECT carries the sign
    PauliString op;       // self-inverse term; identity for the no-op branch
    bool noop = false;
};

struct LcuModel {
    int n_system = 0;
    int selection_width = 0;  // 2 log2(n) + 1
    std::vector<LcuTerm> terms;  // one per selection index, in index order
    double lambda = 0.0;         // sum of |weight| over all terms, no-op branch included
    double noop_weight = 0.0;    // part of lambda spent on the no-op branch
    bool spinful = false;

    std::string weights_csv() const;
};

struct LcuOptions {
    // Keep the weight-one identity branch for opposite-spin (p, q) with b = 1.
    bool include_noop = true;
};

LcuModel build_weights(const HamiltonianSet& hs, LcuOptions opts = {});

// Sum of weight * op over the non-identity branches; equals the qubit
// Hamiltonian without its identity term.
QubitOperator lcu_hamiltonian(const LcuModel& model);

// SELECT = sum_l |l><l| (x) sign(W_l) H_l with the selection register on the
// high bits: index = l * 2^n + system.
SparseMatrix select_matrix(const LcuModel& model, int cap = 14);

// PREPARE|0> = sum_l sqrt(|W_l| / lambda) |l>.
Statevector prepare_state(const LcuModel& model);

struct TaylorResult {
    Statevector state;
    double success_amplitude = 0.0;  // ||sum_k (-iHt)^k/k! psi|| / sum_k (lambda t)^k/k!
};

// Applies the order-K truncated Taylor series of exp(-i H t), with H from
// lcu_hamiltonian, and renormalises. Requires lambda * t <= ln 2.
TaylorResult taylor_segment(const LcuModel& model, double t, int K, const Statevector& state);

}  // namespace pwd
