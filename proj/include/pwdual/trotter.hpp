#pragma once

#include <vector>

#include "pwdual/circuit.hpp"
#include "pwdual/hamiltonian.hpp"

namespace pwd {

enum class TrotterStrategy { SplitOperator, DirectJW };

struct TrotterConfig {
    TrotterStrategy strategy = TrotterStrategy::SplitOperator;
    int order = 2;
    int r = 1;
    double t = 1.0;
};

// Circuits implement evolution under the qubit Hamiltonian with its identity
// term removed; that term only contributes a global phase.
QubitOperator without_identity(const QubitOperator& h);

// Diagonal part (Z and ZZ terms) of a qubit operator; throws on other terms.
struct DiagonalTerms {
    std::vector<std::pair<int, double>> z;                    // (q, c) for c Z_q
    std::vector<std::pair<std::pair<int, int>, double>> zz;   // ((p, q), c) for c Z_p Z_q, p < q
};
DiagonalTerms diagonal_terms(const QubitOperator& diag);

// exp(-i tau D) for D = sum c_q Z_q + sum c_pq Z_p Z_q. On planar
// connectivity the ZZ phases run through the swap network.
Circuit diagonal_layer(const DiagonalTerms& d, double tau, int n_qubits, Connectivity conn);

// One step of the split-operator product on a dual-basis Hamiltonian.
// Order 2: exp(-i(U+V)tau/2) exp(-iT tau) exp(-i(U+V)tau/2); order 1 drops
// the trailing half and doubles the leading one. The kinetic exponential is
// applied diagonally between Fourier transforms.
Circuit split_operator_step(const HamiltonianSet& hs, double tau, int order = 2,
                            Connectivity conn = Connectivity::all_to_all());

// Grouped Jordan-Wigner terms in the order a direct sweep applies them.
struct JwGroups {
    std::vector<std::pair<int, double>> z;
    std::vector<std::pair<std::pair<int, int>, double>> zz;
    struct Hop {
        int p = 0, q = 0;   // p < q
        double xx = 0.0;    // coefficient of X_p Z...Z X_q
        double yy = 0.0;    // coefficient of Y_p Z...Z Y_q
    };
    std::vector<Hop> hop;
};
JwGroups group_jw_terms(const QubitOperator& h);

// exp(-i tau (xx X_p Z..Z X_q + yy Y_p Z..Z Y_q)) through the Bell-basis
// template: the pair is rotated so both strings become Z rotations on p.
void append_hopping(Circuit& c, const JwGroups::Hop& hop, double tau);

// One sweep of the grouped product (Z, then ZZ, then hopping, each in
// lexicographic order). Order 2 runs half steps forward then backward.
// The register spans max(n_qubits, highest touched qubit + 1).
Circuit direct_jw_step(const QubitOperator& h, double tau, int order = 2, int n_qubits = 0);

// Dense ordered product of exact term exponentials matching direct_jw_step.
DenseMatrix direct_jw_reference(const QubitOperator& h, double tau, int order = 2, int n_qubits = 0);

// Number of steps r sufficient for accuracy eps (up to the constant C).
int estimate_r(double eta, double N, double omega, double t, double eps, double C = 1.0);

struct ErrorPoint {
    int r = 0;
    double error = 0.0;
};

struct ErrorScaling {
    std::vector<ErrorPoint> points;
    double slope = 0.0;      // least-squares slope of log error vs log r
    double intercept = 0.0;
};

// Spectral-norm distance between (step)^r and exact evolution for t.
ErrorScaling measure_error_scaling(const HamiltonianSet& hs, double t, const std::vector<int>& r_list,
                                   TrotterStrategy strategy = TrotterStrategy::SplitOperator, int order = 2);

// Least-squares fit of log y against log x; returns (slope, intercept).
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

double spectral_norm(const DenseMatrix& m);

}  // namespace pwd
