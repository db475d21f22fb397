#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <regex>
#include <set>

#include "oracles.hpp"
#include "pwdual/hamiltonian.hpp"
#include "pwdual/trotter.hpp"

using namespace pwd;
using oracle::Mat;

namespace {

constexpr double kPi = std::numbers::pi;

// Momentum of mode index j (0..M-1) along one axis of a cell of side L.
double k_of(int j, int M, double L) { return 2.0 * kPi * (j - M / 2) / L; }
int wrap_index(int j, int M) { return ((j % M) + M) % M; }

Mat number_operator(int n) {
    const long dim = long{1} << n;
    Mat m = Mat::Zero(dim, dim);
    for (long b = 0; b < dim; ++b) m(b, b) = std::popcount(static_cast<std::uint64_t>(b));
    return m;
}

Eigen::VectorXd sorted(Eigen::VectorXd v) {
    std::sort(v.data(), v.data() + v.size());
    return v;
}

double expectation(const Mat& m, const oracle::Vec& v) { return (v.adjoint() * m * v)(0).real(); }

// Brute-force plane-wave V for a one-dimensional grid: every
// a+_p a+_q a_r a_s with p - s = r - q (mod M) and nonzero transfer.
FermionOperator plane_wave_v_1d(int M, double omega, bool spinful) {
    const int S = spinful ? 2 : 1;
    auto orb = [S](int mode, int s) { return mode * S + s; };
    FermionOperator v;
    for (int p = 0; p < M; ++p)
        for (int q = 0; q < M; ++q)
            for (int r = 0; r < M; ++r)
                for (int s = 0; s < M; ++s) {
                    if (wrap_index(p - s, M) != wrap_index(r - q, M) || wrap_index(p - s, M) == 0) continue;
                    // Transfer p - s as a wrapped mode index, offset back to a momentum.
                    const int j = wrap_index(p - s + M / 2, M);
                    const double k = k_of(j, M, omega);
                    for (int a = 0; a < S; ++a)
                        for (int b = 0; b < S; ++b)
                            v.add({{orb(p, a), true}, {orb(q, b), true}, {orb(r, b), false}, {orb(s, a), false}},
                                  2.0 * kPi / omega / (k * k));
                }
    return v;
}

// Number of distinct antisymmetrised two-body coefficients of the plane-wave V
// on a one-dimensional grid, counted over canonical keys p > q, r > s of
// spin-orbitals.
std::size_t plane_wave_v_count_1d(int M, double omega, bool spinful) {
    const int S = spinful ? 2 : 1;
    const int n = M * S;
    auto g = [&](int p, int q, int r, int s) {
        // Spin is carried by (p, s) and (q, r).
        if (p % S != s % S || q % S != r % S) return 0.0;
        const int mp = p / S, mq = q / S, mr = r / S, ms = s / S;
        if (wrap_index(mp - ms, M) != wrap_index(mr - mq, M) || wrap_index(mp - ms, M) == 0) return 0.0;
        const double k = k_of(wrap_index(mp - ms + M / 2, M), M, omega);
        return 1.0 / (k * k);
    };
    std::size_t count = 0;
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < p; ++q)
            for (int r = 0; r < n; ++r)
                for (int s = 0; s < r; ++s) {
                    const double c = g(p, q, r, s) - g(q, p, r, s) - g(p, q, s, r) + g(q, p, s, r);
                    if (std::abs(c) > 1e-12) ++count;
                }
    return count;
}

struct Config {
    int d, M;
    bool spinful;
    bool with_nucleus;
};

std::vector<Nucleus> nuclei_for(const Config& c, double omega) {
    if (!c.with_nucleus) return {};
    const double L = std::pow(omega, 1.0 / c.d);
    return {Nucleus{std::vector<double>(static_cast<std::size_t>(c.d), 0.3 * L), 1.0}};
}

}  // namespace

TEST(PlaneWave, JelliumHasNoExternalPotential) {
    const ModeGrid grid = build_grid(2, 2, 5.0, true);
    EXPECT_TRUE(build_plane_wave(grid, {}).U.empty());
    EXPECT_TRUE(build_dual(grid, {}).U.empty());
}

TEST(PlaneWave, KineticForTwoModes) {
    const ModeGrid grid = build_grid(1, 2, 2.0 * kPi, false);
    const HamiltonianSet hs = build_plane_wave(grid, {});
    // k = -1 on mode 0 and k = 0 on mode 1.
    const FermionOperator want = FermionOperator::number(0) * cplx(0.5);
    EXPECT_LT((hs.T - want).max_abs_coefficient(), 1e-15);
    EXPECT_EQ(hs.T.size(), 1u);
}

TEST(PlaneWave, PotentialMatchesBruteForce) {
    for (bool spinful : {false, true}) {
        const int M = spinful ? 2 : 4;
        const ModeGrid grid = build_grid(1, M, 5.0, spinful);
        const HamiltonianSet hs = build_plane_wave(grid, {});
        const int n = static_cast<int>(grid.n_qubits());
        EXPECT_LT(oracle::max_abs(oracle::fermion(hs.V, n) - oracle::fermion(plane_wave_v_1d(M, 5.0, spinful), n)),
                  1e-12)
            << "spinful=" << spinful;
    }
}

TEST(PlaneWave, TwoBodyTermCountsAreExact) {
    for (int M : {2, 4})
        for (bool spinful : {false, true}) {
            const HamiltonianSet hs = build_plane_wave(build_grid(1, M, 5.0, spinful), {});
            EXPECT_EQ(two_body_term_count(hs), plane_wave_v_count_1d(M, 5.0, spinful))
                << "M=" << M << " spinful=" << spinful;
        }
}

TEST(Dual, KineticCoefficientsByExplicitSum) {
    const int M = 4;
    const double omega = 7.0, L = std::sqrt(omega);
    const ModeGrid grid = build_grid(2, M, omega, false);
    const DualCoefficients dc = dual_coefficients(grid, {}, std::nullopt);
    const int N = M * M;
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
            const double dx = (q % M - p % M) * L / M, dy = (q / M - p / M) * L / M;
            double t = 0.0;
            for (int a = 0; a < M; ++a)
                for (int b = 0; b < M; ++b) {
                    const double kx = k_of(a, M, L), ky = k_of(b, M, L);
                    t += (kx * kx + ky * ky) * std::cos(kx * dx + ky * dy);
                }
            EXPECT_NEAR(dc.t(p, q), t / (2.0 * N), 1e-12) << p << "," << q;
        }
}

TEST(Dual, PotentialIsDiagonalPairs) {
    const HamiltonianSet hs = build_dual(build_grid(1, 4, 5.0, true), {});
    for (const auto& [key, c] : hs.V.terms()) {
        ASSERT_EQ(key.size(), 4u);
        EXPECT_TRUE(key[0].raise && key[1].raise && !key[2].raise && !key[3].raise);
        std::set<int> up{key[0].index, key[1].index}, down{key[2].index, key[3].index};
        EXPECT_EQ(up, down);
        EXPECT_EQ(up.size(), 2u);
    }
}

TEST(Dual, JelliumPotentialIsTranslationInvariant) {
    const int M = 4;
    const ModeGrid grid = build_grid(2, M, 5.0, false);
    const DualCoefficients dc = dual_coefficients(grid, {}, std::nullopt);
    const int N = M * M;
    for (int p = 0; p < N; ++p)
        for (int q = 0; q < N; ++q) {
            const int dx = wrap_index(p % M - q % M, M), dy = wrap_index(p / M - q / M, M);
            EXPECT_NEAR(dc.v(p, q), dc.v(dx + M * dy, 0), 1e-12);
        }
}

TEST(Dual, PotentialTermCountIsPairCount) {
    for (const Config c : {Config{1, 4, true, false}, Config{2, 2, true, false}, Config{1, 8, false, false}}) {
        const ModeGrid grid = build_grid(c.d, c.M, 5.0, c.spinful);
        const std::size_t n = grid.n_qubits();
        const HamiltonianSet hs = build_dual(grid, {});
        EXPECT_EQ(two_body_term_count(hs), n * (n - 1) / 2);
        EXPECT_EQ(hs.V.size(), n * (n - 1) / 2);
    }
}

TEST(Dual, ComponentsHermitianAndNumberConserving) {
    const ModeGrid grid = build_grid(1, 4, 5.0, true);
    const HamiltonianSet hs = build_dual(grid, {{{0.7}, 1.5}});
    const Mat num = number_operator(8);
    for (const FermionOperator* part : {&hs.T, &hs.U, &hs.V}) {
        EXPECT_TRUE(is_hermitian(*part));
        const Mat m = oracle::fermion(*part, 8);
        EXPECT_LT(oracle::max_abs(m * num - num * m), 1e-12);
    }
}

TEST(Isospectrality, PlaneWaveAndDualAgree) {
    const std::vector<Config> configs = {
        {1, 2, false, false}, {1, 2, true, false}, {1, 4, false, false}, {1, 4, true, false}, {1, 4, true, true},
        {2, 2, false, false}, {2, 2, true, false}, {2, 2, true, true},   {3, 2, false, false}, {3, 2, false, true},
    };
    for (const Config& c : configs) {
        const double omega = 5.0;
        const ModeGrid grid = build_grid(c.d, c.M, omega, c.spinful);
        const auto nuclei = nuclei_for(c, omega);
        const int n = static_cast<int>(grid.n_qubits());
        const Eigen::VectorXd pw = oracle::eigenvalues(oracle::fermion(build_plane_wave(grid, nuclei).total(), n));
        const Eigen::VectorXd du = oracle::eigenvalues(oracle::fermion(build_dual(grid, nuclei).total(), n));
        EXPECT_LT((pw - du).cwiseAbs().maxCoeff(), 1e-9)
            << "d=" << c.d << " M=" << c.M << " spinful=" << c.spinful << " nucleus=" << c.with_nucleus;
    }
}

TEST(Isospectrality, ParticleNumberBlocksReproduceSpectrum) {
    const ModeGrid grid = build_grid(1, 4, 5.0, false);
    const Mat h = oracle::fermion(build_dual(grid, {}).total(), 4);
    std::vector<double> blocks;
    for (int eta = 0; eta <= 4; ++eta) {
        std::vector<long> idx;
        for (long b = 0; b < 16; ++b)
            if (std::popcount(static_cast<std::uint64_t>(b)) == eta) idx.push_back(b);
        Mat sub(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<long>(i), static_cast<long>(j)) = h(idx[i], idx[j]);
        const Eigen::VectorXd ev = oracle::eigenvalues(sub);
        blocks.insert(blocks.end(), ev.data(), ev.data() + ev.size());
    }
    std::sort(blocks.begin(), blocks.end());
    const Eigen::VectorXd full = oracle::eigenvalues(h);
    for (long i = 0; i < full.size(); ++i) EXPECT_NEAR(blocks[static_cast<std::size_t>(i)], full(i), 1e-10);
}

TEST(Qubit, StringCensusForDualJellium) {
    const HamiltonianSet hs = build_dual(build_grid(1, 4, 5.0, false), {});
    const std::regex allowed("^(|Z|ZZ|XZ*X|YZ*Y)$");
    const QubitOperator h = build_qubit(hs);
    for (const auto& [s, c] : h.terms()) EXPECT_TRUE(std::regex_match(s.pattern(), allowed)) << s.to_string();
}

TEST(Qubit, IdentityCoefficientFormula) {
    for (bool spinful : {true, false}) {
        const int M = 4;
        const double omega = 5.0;
        const ModeGrid grid = build_grid(1, M, omega, spinful);
        const QubitOperator q = build_qubit(build_dual(grid, {}));
        double want = 0.0;
        for (int j = 0; j < M; ++j) {
            if (j == M / 2) continue;
            const double k2 = std::pow(k_of(j, M, omega), 2);
            want += k2 / 2.0 - kPi * M / (omega * k2);
        }
        // The closed form counts both spin sectors; a spinless grid carries half.
        if (!spinful) want /= 2.0;
        EXPECT_NEAR(q.coefficient(PauliString()).real(), want, 1e-12) << "spinful=" << spinful;
    }
}

TEST(Qubit, MatchesJordanWignerOfComponents) {
    const ModeGrid grid = build_grid(1, 4, 5.0, true);
    const HamiltonianSet hs = build_dual(grid, {{{1.1}, 2.0}}, std::nullopt, 0.7);
    const Mat want = oracle::fermion(hs.T + hs.U + hs.V, 8) + 0.7 * Mat::Identity(256, 256);
    EXPECT_LT(oracle::max_abs(oracle::qubit(build_qubit(hs), 8) - want), 1e-12);
}

TEST(Truncation, LargeDistanceMatchesUntruncated) {
    const ModeGrid grid = build_grid(2, 4, 5.0, true);
    const HamiltonianSet full = build_dual(grid, {});
    const HamiltonianSet cut = build_dual(grid, {}, grid.cell_diameter() * 1.0001);
    EXPECT_EQ(full.V.size(), cut.V.size());
    EXPECT_EQ((full.V - cut.V).max_abs_coefficient(), 0.0);
}

TEST(Truncation, DropsDistantPairs) {
    const ModeGrid grid = build_grid(1, 8, 8.0, false);
    const double D = 1.5;  // spacing 1: keeps pairs at distance 1
    const HamiltonianSet cut = build_dual(grid, {}, D);
    for (const auto& [key, c] : cut.V.terms())
        EXPECT_LE(grid.min_image_distance(static_cast<std::size_t>(key[0].index), static_cast<std::size_t>(key[1].index)), D);
    EXPECT_EQ(cut.V.size(), 8u);
    EXPECT_THROW(build_dual(grid, {}, -1.0), std::invalid_argument);
}

TEST(FiniteDifference, AnalyticLambda) {
    EXPECT_NEAR(analytic_lambda_unit(), 0.941156, 1e-6);
    FiniteDifferenceGrid g{{1, 1, 1}, 0.5, true};
    const HamiltonianSet hs = build_finite_difference(g, {});
    ASSERT_EQ(hs.V.size(), 1u);
    const Mat want = (0.941156 / 0.5) * oracle::fermion(FermionOperator::number(0) * FermionOperator::number(1), 2);
    EXPECT_LT(oracle::max_abs(oracle::fermion(hs.V, 2) - want), 2e-6);
}

TEST(FiniteDifference, SingleSpinlessSiteHasNoTwoBodyTerm) {
    const HamiltonianSet hs = build_finite_difference(FiniteDifferenceGrid{{1}, 1.0, false}, {});
    EXPECT_TRUE(hs.V.empty());
    EXPECT_EQ(two_body_term_count(hs), 0u);
}

TEST(FiniteDifference, TwoSiteSpinfulHandCount) {
    const HamiltonianSet hs = build_finite_difference(FiniteDifferenceGrid{{2, 1, 1}, 1.0, true}, {});
    EXPECT_TRUE(is_hermitian(hs.total()));
    // Two on-site opposite-spin pairs plus four cross-site pairs.
    EXPECT_EQ(two_body_term_count(hs), 6u);
    // Kinetic: 3 on the diagonal of every orbital, -1/2 hop each way per spin.
    const Mat t = oracle::fermion(hs.T, 4);
    const Mat want = oracle::fermion(3.0 * (FermionOperator::number(0) + FermionOperator::number(1) +
                                            FermionOperator::number(2) + FermionOperator::number(3)) -
                                         0.5 * (FermionOperator::term({{2, true}, {0, false}}) +
                                                FermionOperator::term({{0, true}, {2, false}}) +
                                                FermionOperator::term({{3, true}, {1, false}}) +
                                                FermionOperator::term({{1, true}, {3, false}})),
                                     4);
    EXPECT_LT(oracle::max_abs(t - want), 1e-14);
    EXPECT_THROW(build_finite_difference(FiniteDifferenceGrid{{2}, 0.0, true}, {}), std::invalid_argument);
}

TEST(NormBounds, ClosedFormExamples) {
    const double omega = 5.0;
    const ModeGrid grid = build_grid(1, 2, omega, true);
    const NormBounds b = norm_bounds(build_dual(grid, {}), 2);
    EXPECT_EQ(b.maxU, 0.0);
    const double kmax = 2.0 * kPi / omega;  // mode nu = -1
    EXPECT_NEAR(b.maxT, 2 * 0.5 * kmax * kmax, 1e-12);
    EXPECT_NEAR(b.maxV, 2.0 * kPi * 4 / omega / (kmax * kmax), 1e-12);
    EXPECT_NEAR(b.maxH, b.maxT + b.maxU + b.maxV, 1e-12);
    EXPECT_THROW(norm_bounds(build_dual(grid, {}), 0), std::invalid_argument);
}

TEST(NormBounds, HoldOnRandomStates) {
    const double omega = 5.0;
    const ModeGrid grid = build_grid(1, 4, omega, true);
    const int eta = 2;
    const HamiltonianSet hs = build_dual(grid, {{{0.9}, 1.0}, {{3.1}, 1.0}});
    const NormBounds b = norm_bounds(hs, eta);
    const Mat T = oracle::fermion(hs.T, 8), U = oracle::fermion(hs.U, 8), V = oracle::fermion(hs.V, 8);
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const oracle::Vec v = oracle::random_state(8, 1000 + seed, eta);
        EXPECT_LE(std::abs(expectation(V, v)), b.maxV);
        EXPECT_LE(std::abs(expectation(U, v)), b.maxU);
        EXPECT_LE(std::abs(expectation(T, v)), b.maxT);
    }
    EXPECT_NEAR(b.lambda, self_inverse_decompose(without_identity(build_qubit(hs))).lambda, 1e-9);
}

TEST(Serialization, RoundTrip) {
    const ModeGrid grid = build_grid(2, 2, 5.0, true);
    for (const HamiltonianSet& hs :
         {build_dual(grid, {{{0.5, 1.0}, 1.5}}, 1.4, 0.25), build_plane_wave(grid, {}, std::nullopt, -1.0)}) {
        const std::string text = serialize_hamiltonian(hs);
        const HamiltonianSet back = parse_hamiltonian(text);
        EXPECT_EQ(serialize_hamiltonian(back), text);
        EXPECT_EQ(back.representation, hs.representation);
        EXPECT_EQ(back.constant, hs.constant);
        EXPECT_EQ(back.truncated_D, hs.truncated_D);
        EXPECT_EQ(back.nuclei.size(), hs.nuclei.size());
        EXPECT_EQ((back.total() - hs.total()).max_abs_coefficient(), 0.0);
    }
}
