#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pwdual/circuit.hpp"

namespace pwd {

// Cells of a rows x cols lattice are numbered row-major: cell = row * cols + col.

enum class PairTag { Swap, InteractSwap };

struct SwapPair {
    int a = 0;
    int b = 0;
    PairTag tag = PairTag::Swap;
};

using SwapLayer = std::vector<SwapPair>;

// Where a group of layers came from in the recursive construction.
struct ScheduleStage {
    std::string kind;  // "stagger", "divide", "pair"
    int level = 0;
    int row0 = 0, col0 = 0, rows = 0, cols = 0;
    std::size_t layer_begin = 0;
    std::size_t layer_end = 0;
};

struct SwapSchedule {
    int rows = 0;
    int cols = 0;
    std::vector<SwapLayer> layers;
    std::vector<ScheduleStage> provenance;
    // Layers spent by the top-level stagger and colour division.
    std::size_t first_level_layers = 0;
    // final_token[cell] is the token (initial cell) found at `cell` at the end.
    std::vector<int> final_token;

    int n_cells() const { return rows * cols; }
    std::string to_text() const;
};

std::vector<int> hamiltonian_cycle(int rows, int cols);

// Stagger rounds on a cycle of length M, expressed as pairs of cycle
// positions: U_L on (0,1),(2,3),... then U_R on (1,2),...,(M-1,0), M/2 times.
std::vector<std::vector<std::pair<int, int>>> stagger_rounds(int M);

SwapSchedule build_full_schedule(int rows, int cols);

struct ScheduleReport {
    std::size_t pairs_covered = 0;
    std::size_t pairs_total = 0;
    std::size_t duplicate_interactions = 0;
    bool disjoint = true;
    bool adjacent = true;
    std::size_t layers = 0;
    std::size_t first_level_layers = 0;
    double depth_over_n = 0.0;
    bool ok() const { return disjoint && adjacent && pairs_covered == pairs_total && duplicate_interactions == 0; }
    std::string to_json() const;
};

ScheduleReport verify_schedule(const SwapSchedule& s);

// Qubit pair coefficient map for exp(-i phi Z_x Z_y), keyed with x < y.
using PairPhases = std::map<std::pair<int, int>, double>;

struct LoweredLayer {
    Circuit circuit;
    // final_qubit[q] is the logical qubit whose state sits on physical qubit q
    // when the circuit ends (identity if `restore` was requested).
    std::vector<int> final_qubit;
};

// Applies every exp(-i phi Z_x Z_y) once while walking the schedule. The
// circuit acts on conn = Connectivity::planar(rows, cols); logical qubit q
// starts on physical qubit q. With `restore` an odd-even transposition sort
// along the snake path undoes the accumulated permutation.
LoweredLayer lower_diagonal_layer(const PairPhases& phases, const SwapSchedule& schedule, bool restore = true);

}  // namespace pwd
