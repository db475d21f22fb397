#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

// Amplitude-level kernels behind apply_gate and expectation. The serial
// namespace is the reference implementation; the omp namespace splits the
// same loops across threads. Both produce bitwise identical results: each
// output amplitude is written by exactly one iteration, and reductions sum
// fixed-size chunks in index order.

namespace pwd::kernels {

using cplx = std::complex<double>;

// Phase of a Pauli string on basis state b: i^{ny} (-1)^{|b & z|}.
inline cplx pauli_phase(std::uint64_t b, std::uint64_t z, cplx base) {
    return (__builtin_popcountll(b & z) & 1) ? -base : base;
}

namespace serial {
void apply_1q(cplx* a, std::size_t dim, int q, const cplx* m);
void apply_2q(cplx* a, std::size_t dim, int q0, int q1, const cplx* m);
void pauli_rotation(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny, double theta);
cplx pauli_expectation(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny);
}  // namespace serial

namespace omp {
void apply_1q(cplx* a, std::size_t dim, int q, const cplx* m);
void apply_2q(cplx* a, std::size_t dim, int q0, int q1, const cplx* m);
void pauli_rotation(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny, double theta);
cplx pauli_expectation(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny);
}  // namespace omp

}  // namespace pwd::kernels
