// Serial reference kernels against their OpenMP counterparts on random states.

#include <benchmark/benchmark.h>

#include <vector>

#include "pwdual/kernels.hpp"
#include "pwdual/rng.hpp"

namespace {

using pwd::kernels::cplx;

std::vector<cplx> random_state(int n) {
    pwd::CounterRng rng(42);
    std::vector<cplx> a(std::size_t{1} << n);
    for (auto& x : a) x = cplx(rng.normal(), rng.normal());
    return a;
}

const cplx kHadamard[4] = {M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2};

// A dense two-qubit unitary: Hadamard on both qubits.
const cplx kHH[16] = {0.5, 0.5, 0.5, 0.5, 0.5, -0.5, 0.5, -0.5, 0.5, 0.5, -0.5, -0.5, 0.5, -0.5, -0.5, 0.5};

template <void (*F)(cplx*, std::size_t, int, const cplx*)>
void bm_apply_1q(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto a = random_state(n);
    for (auto _ : st) {
        F(a.data(), a.size(), n / 2, kHadamard);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(a.size()));
}

template <void (*F)(cplx*, std::size_t, int, int, const cplx*)>
void bm_apply_2q(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto a = random_state(n);
    for (auto _ : st) {
        F(a.data(), a.size(), 1, n - 2, kHH);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(a.size()));
}

template <void (*F)(cplx*, std::size_t, std::uint64_t, std::uint64_t, int, double)>
void bm_pauli_rotation(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    auto a = random_state(n);
    // X0 Z1 ... Z(n-2) X(n-1): a long Jordan-Wigner hopping string.
    const std::uint64_t x = 1ULL | (1ULL << (n - 1));
    const std::uint64_t z = ((1ULL << (n - 1)) - 1) & ~1ULL;
    for (auto _ : st) {
        F(a.data(), a.size(), x, z, 0, 0.1);
        benchmark::ClobberMemory();
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long>(a.size()));
}

template <cplx (*F)(const cplx*, std::size_t, std::uint64_t, std::uint64_t, int)>
void bm_pauli_expectation(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto a = random_state(n);
    const std::uint64_t x = 1ULL | (1ULL << (n - 1));
    const std::uint64_t z = ((1ULL << (n - 1)) - 1) & ~1ULL;
    for (auto _ : st) benchmark::DoNotOptimize(F(a.data(), a.size(), x, z, 0));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(a.size()));
}

namespace ks = pwd::kernels::serial;
namespace ko = pwd::kernels::omp;

}  // namespace

BENCHMARK(bm_apply_1q<ks::apply_1q>)->Name("apply_1q/serial")->DenseRange(12, 22, 5);
BENCHMARK(bm_apply_1q<ko::apply_1q>)->Name("apply_1q/omp")->DenseRange(12, 22, 5)->UseRealTime();
BENCHMARK(bm_apply_2q<ks::apply_2q>)->Name("apply_2q/serial")->DenseRange(12, 22, 5);
BENCHMARK(bm_apply_2q<ko::apply_2q>)->Name("apply_2q/omp")->DenseRange(12, 22, 5)->UseRealTime();
BENCHMARK(bm_pauli_rotation<ks::pauli_rotation>)->Name("pauli_rotation/serial")->DenseRange(12, 22, 5);
BENCHMARK(bm_pauli_rotation<ko::pauli_rotation>)->Name("pauli_rotation/omp")->DenseRange(12, 22, 5)->UseRealTime();
BENCHMARK(bm_pauli_expectation<ks::pauli_expectation>)->Name("pauli_expectation/serial")->DenseRange(12, 22, 5);
BENCHMARK(bm_pauli_expectation<ko::pauli_expectation>)->Name("pauli_expectation/omp")->DenseRange(12, 22, 5)->UseRealTime();

BENCHMARK_MAIN();
