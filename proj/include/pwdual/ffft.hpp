#pragma once

#include <array>
#include <string>
#include <vector>

#include "pwdual/circuit.hpp"
#include "pwdual/geometry.hpp"

namespace pwd {

// One stage of an FFFT plan; gates [gate_begin, gate_end) of the circuit.
struct FfftStage {
    std::string kind;  // "phase", "permute", "butterfly"
    int offset = 0;    // first position of the block the stage acts on
    int size = 0;      // block length
    std::vector<std::array<int, 3>> butterflies;  // (p, q, k) for butterfly stages
    std::size_t gate_begin = 0;
    std::size_t gate_end = 0;
};

struct FfftPlan {
    int n_qubits = 0;
    std::vector<FfftStage> stages;
    Circuit circuit;
};

// Two-mode Fourier gate on qubits (0, 1).
Circuit f2_gate(int k, int M);

// Circuit C with C^dagger a^dagger_j C = M^{-1/2} sum_p exp(-i k_nu r_p) a^dagger_p,
// where mode j = nu + M/2 sits on qubit j. Only adjacent-pair gates are used.
Circuit build_ffft_1d(int M, Connectivity conn = Connectivity::all_to_all());
FfftPlan plan_ffft_1d(int M, Connectivity conn = Connectivity::all_to_all());

// Axis-by-axis composition over the whole grid (both spin sectors), with
// fermionic-swap sorting networks bringing each line into a contiguous block.
Circuit build_ffft_nd(const ModeGrid& grid, Connectivity conn = Connectivity::all_to_all());
FfftPlan plan_ffft_nd(const ModeGrid& grid, Connectivity conn = Connectivity::all_to_all());

// Planar lattice shape used for an n-qubit register: as square as possible.
Connectivity planar_layout(int n_qubits);

std::string plan_to_json(const FfftPlan& plan);

// Appends an odd-even transposition network of FSWAP (or SWAP) gates that
// moves the label at position i to position target_pos[label]. `layout`
// maps positions (relative to offset) to labels and is updated in place.
void append_sorting_network(Circuit& c, std::vector<int>& layout, const std::vector<int>& target_pos, int offset,
                            GateKind swap_kind = GateKind::FSWAP);

struct FswapReport {
    double commutator_error = 0.0;    // [a+_p, f] = a+_p - a+_q and p <-> q
    double hermitian_unitary_error = 0.0;
    double conjugation_error = 0.0;   // f a+_p f = a+_q
    double rotation_error = 0.0;      // exp(i theta f) a+_p exp(-i theta f)
    double vacuum_error = 0.0;        // f |0> = |0>
    double gate_error = 0.0;          // FSWAP and FSWAP_POW gates vs the operator definition
    double max_error() const;
};

FswapReport fswap_properties_check(int n, const std::vector<double>& thetas);

}  // namespace pwd
