#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwdual/hamiltonian.hpp"
#include "pwdual/statevector.hpp"

namespace pwd {

enum class MeasurementStrategy { PerTerm, DiagonalGroups, DiagonalUVOnly };

std::string to_string(MeasurementStrategy s);
MeasurementStrategy parse_strategy(const std::string& s);

struct MeasurementPlan {
    MeasurementStrategy strategy = MeasurementStrategy::DiagonalGroups;
    std::size_t shots = 1000;  // per group (per term for the per-term strategy)
    std::uint64_t seed = 1;
};

// Diagonal qubit operator evaluated on computational basis strings.
class DiagonalEvaluator {
public:
    DiagonalEvaluator() = default;
    explicit DiagonalEvaluator(const QubitOperator& diag);
    double operator()(std::uint64_t bits) const;

private:
    double offset_ = 0.0;
    std::vector<std::pair<std::uint64_t, double>> terms_;  // (z mask, coefficient)
};

// The measurement groups of a Hamiltonian for a strategy. Group 0 of the
// diagonal strategies is U + V (plus the constant) read in the computational
// basis; for DiagonalGroups group 1 is T read after the Fourier transform.
// Remaining groups are single Pauli terms.
struct MeasurementGroups {
    MeasurementStrategy strategy = MeasurementStrategy::DiagonalGroups;
    int n_qubits = 0;
    double identity = 0.0;  // added to every estimate
    bool has_uv = false;
    DiagonalEvaluator uv;
    bool has_t = false;
    Circuit t_rotation;
    DiagonalEvaluator t_diag;
    std::vector<std::pair<PauliString, double>> pauli_terms;
};

MeasurementGroups measurement_groups(const HamiltonianSet& hs, MeasurementStrategy strategy);

struct EnergyEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t shots = 0;  // total over all groups
};

EnergyEstimate estimate_energy(const Statevector& state, const HamiltonianSet& hs, const MeasurementPlan& plan);

// Per-shot estimator: one sample of every group combined with its weight.
// Returns the sample variance over `shots` such rounds.
double empirical_variance(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy,
                          std::size_t shots, std::uint64_t seed);

// Exact variance of the per-shot estimator: sum over groups of
// weight^2 Var[group observable], from dense moments.
double analytic_variance(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy);

enum class ErrorMode { Absolute, Relative };

// Shot bound for target error eps (absolute) or mu (relative, eps = mu * eta).
double shot_budget(const HamiltonianSet& hs, int eta, double target, ErrorMode mode, MeasurementStrategy strategy);
// Coherent (phase-estimation style) bound: lambda / eps.
double phase_estimation_budget(const HamiltonianSet& hs, int eta, double eps);

// Smallest repetition count whose predicted standard error, using the
// per-shot variance estimated from `pilot_shots` samples, is at most eps.
// For the per-term strategy the count is the total under optimal allocation.
std::size_t empirical_shots_needed(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy,
                                   double eps, std::size_t pilot_shots, std::uint64_t seed);

}  // namespace pwd
