#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pwdual/lcu.hpp"
#include "pwdual/trotter.hpp"

using namespace pwd;
using oracle::Mat;

namespace {

HamiltonianSet jellium(int d, int M, bool spinful) { return build_dual(build_grid(d, M, 5.0, spinful), {}); }

LcuModel two_term_model(double w0, double w1) {
    LcuModel m;
    m.n_system = 1;
    m.selection_width = 1;
    m.terms = {LcuTerm{{0, 0, 0}, w0, PauliString({{0, Pauli::Z}})}, LcuTerm{{0, 0, 1}, w1, PauliString({{0, Pauli::X}})}};
    m.lambda = std::abs(w0) + std::abs(w1);
    return m;
}

// Block <l| SELECT |l> over the system register.
Mat select_block(const SparseMatrix& sel, std::size_t l, int n) {
    const long sys = long{1} << n;
    return Mat(sel).block(static_cast<long>(l) * sys, static_cast<long>(l) * sys, sys, sys);
}

}  // namespace

TEST(TermIndex, EncodeDecodeRoundTrip) {
    for (int n : {2, 4, 8})
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q)
                for (int b = 0; b < 2; ++b) {
                    const TermIndex t{p, q, b};
                    const TermIndex back = TermIndex::decode(t.encode(n), n);
                    EXPECT_EQ(back.p, p);
                    EXPECT_EQ(back.q, q);
                    EXPECT_EQ(back.b, b);
                }
}

TEST(BuildWeights, ReconstructionIsCoefficientExact) {
    std::vector<HamiltonianSet> cases = {jellium(1, 2, false), jellium(1, 2, true), jellium(1, 4, true),
                                         jellium(2, 2, true), jellium(1, 8, false)};
    cases.push_back(build_dual(build_grid(1, 4, 5.0, true), {{{1.3}, 2.0}}));
    cases.push_back(build_dual(build_grid(1, 8, 8.0, false), {}, 2.5));
    for (const auto& hs : cases) {
        const LcuModel m = build_weights(hs);
        const QubitOperator want = without_identity(build_qubit(hs));
        EXPECT_LT((lcu_hamiltonian(m) - want).max_abs_coefficient(), 1e-12) << "n=" << hs.n_qubits();
        EXPECT_EQ(m.terms.size(), std::size_t{1} << m.selection_width);
        EXPECT_EQ(m.selection_width, 2 * log2_exact(static_cast<std::size_t>(hs.n_qubits())) + 1);
    }
}

TEST(BuildWeights, NoOpBranch) {
    const HamiltonianSet hs = jellium(1, 2, true);
    const LcuModel with = build_weights(hs);
    std::size_t noops = 0;
    for (const auto& t : with.terms) {
        const bool opposite_spin = (t.index.p + t.index.q) % 2 == 1;
        if (t.index.b == 1 && t.index.p != t.index.q && opposite_spin) {
            EXPECT_TRUE(t.noop);
            EXPECT_EQ(t.weight, 1.0);
            EXPECT_TRUE(t.op.is_identity());
            ++noops;
        } else {
            EXPECT_FALSE(t.noop);
        }
    }
    EXPECT_EQ(noops, 8u);  // ordered opposite-spin pairs of 4 orbitals
    EXPECT_EQ(with.noop_weight, 8.0);

    const LcuModel without = build_weights(hs, {false});
    EXPECT_NEAR(with.lambda - without.lambda, 8.0, 1e-12);
    EXPECT_EQ(without.noop_weight, 0.0);
    EXPECT_LT((lcu_hamiltonian(with) - lcu_hamiltonian(without)).max_abs_coefficient(), 1e-15);
}

TEST(BuildWeights, LambdaBounds) {
    for (const auto& hs : {jellium(1, 2, false), jellium(1, 4, true), jellium(2, 2, true)}) {
        const LcuModel m = build_weights(hs);
        const NormBounds b = norm_bounds(hs, 2);
        // Lambda covers the compiled coefficients and stays under the triangle bound.
        EXPECT_GE(m.lambda + 1e-12, b.lambda);
        EXPECT_NEAR(m.lambda - m.noop_weight, b.lambda, 1e-10);
        EXPECT_LE(m.lambda, b.triangle_H + m.noop_weight + 1e-12);
    }
}

TEST(BuildWeights, NegativeWeightsCarrySign) {
    const LcuModel m = build_weights(jellium(1, 4, false));
    bool negative = false;
    for (const auto& t : m.terms) negative |= t.weight < 0;
    EXPECT_TRUE(negative);
    double sum = 0.0;
    for (const auto& t : m.terms) sum += std::abs(t.weight);
    EXPECT_NEAR(sum, m.lambda, 1e-12);
}

TEST(BuildWeights, RejectsNonDual) {
    EXPECT_THROW(build_weights(build_plane_wave(build_grid(1, 2, 5.0, false), {})), std::invalid_argument);
}

TEST(Select, BlocksMatchTable) {
    const HamiltonianSet hs = jellium(1, 4, false);
    const int n = 4;
    const LcuModel m = build_weights(hs);
    const SparseMatrix sel = select_matrix(m);
    for (const auto& t : m.terms) {
        const Mat block = select_block(sel, t.index.encode(n), n);
        const double sign = t.weight < 0 ? -1.0 : 1.0;
        EXPECT_LT(oracle::max_abs(block - sign * oracle::pauli(t.op, n)), 1e-15);
        if (t.index.p == t.index.q) EXPECT_EQ(t.op.pattern(), "Z");
        if (t.index.p != t.index.q && t.index.b == 0) EXPECT_EQ(t.op.pattern(), "ZZ");
    }
    const Mat s(sel);
    EXPECT_LT(oracle::max_abs(s * s - Mat::Identity(s.rows(), s.cols())), 1e-14);
    EXPECT_LT(oracle::max_abs(s.adjoint() * s - Mat::Identity(s.rows(), s.cols())), 1e-14);
    EXPECT_THROW(select_matrix(build_weights(jellium(1, 8, false))), std::invalid_argument);
}

TEST(Prepare, SmallExamples) {
    const Statevector equal = prepare_state(two_term_model(0.5, -0.5));
    EXPECT_NEAR(equal[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(equal[1].real(), 1.0 / std::sqrt(2.0), 1e-15);
    const Statevector uneven = prepare_state(two_term_model(3.0, 1.0));
    EXPECT_NEAR(uneven[0].real(), std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(uneven[1].real(), std::sqrt(0.25), 1e-15);
    EXPECT_THROW(prepare_state(two_term_model(0.0, 0.0)), std::invalid_argument);
}

TEST(Prepare, JelliumAmplitudes) {
    const LcuModel m = build_weights(jellium(1, 2, true));
    const Statevector s = prepare_state(m);
    EXPECT_NEAR(s.norm(), 1.0, 1e-14);
    for (const auto& t : m.terms)
        EXPECT_NEAR(std::norm(s[t.index.encode(m.n_system)]) * m.lambda, std::abs(t.weight), 1e-12);
}

TEST(Taylor, ZeroOrderIsIdentity) {
    const LcuModel m = build_weights(jellium(1, 2, false));
    const Statevector psi = Statevector::from_eigen(2, oracle::random_state(2, 3));
    const TaylorResult r = taylor_segment(m, 0.1, 0, psi);
    EXPECT_LT((r.state.to_eigen() - psi.to_eigen()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Taylor, ConvergesFactorially) {
    const LcuModel m = build_weights(jellium(1, 2, false));
    const double t = 0.1;
    ASSERT_LT(m.lambda * t, std::log(2.0));
    const oracle::Vec psi = oracle::random_state(2, 8);
    const oracle::Vec exact = oracle::expm(oracle::qubit(lcu_hamiltonian(m), 2), t) * psi;
    std::vector<double> err;
    for (int K = 0; K <= 5; ++K)
        err.push_back((taylor_segment(m, t, K, Statevector::from_eigen(2, psi)).state.to_eigen() - exact).norm());
    EXPECT_LT(err[4] / err[2], 0.05);
    for (int K = 1; K <= 5; ++K) EXPECT_LT(err[K], err[K - 1]);
    // Successive ratios shrink, so log error falls faster than linearly.
    EXPECT_LT(err[4] / err[3], err[2] / err[1]);
    const TaylorResult r = taylor_segment(m, t, 4, Statevector::from_eigen(2, psi));
    EXPECT_GT(r.success_amplitude, 0.0);
    EXPECT_LE(r.success_amplitude, 1.0);
}

TEST(Taylor, SegmentConditionEnforced) {
    const LcuModel m = build_weights(jellium(1, 2, false));
    const double t = 1.01 * std::log(2.0) / m.lambda;
    EXPECT_THROW(taylor_segment(m, t, 2, Statevector(2)), std::invalid_argument);
}

TEST(WeightsCsv, HeaderAndRows) {
    const LcuModel m = build_weights(jellium(1, 2, false));
    const std::string csv = m.weights_csv();
    EXPECT_EQ(csv.rfind("# lambda ", 0), 0u);
    EXPECT_NE(csv.find("p,q,b,W\n"), std::string::npos);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), m.terms.size() + 3);
}
