#include <algorithm>
#include <cmath>
#include <vector>

#include <omp.h>

#include "pwdual/kernels.hpp"

namespace pwd::kernels::omp {

namespace {

constexpr std::size_t kChunk = 4096;
// Below this size thread start-up costs more than the loop itself.
constexpr std::size_t kParallelThreshold = std::size_t{1} << 12;

const cplx kIPow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};

inline std::size_t insert_zero(std::size_t i, int bit) {
    const std::size_t low = i & ((std::size_t{1} << bit) - 1);
    return ((i >> bit) << (bit + 1)) | low;
}

}  // namespace

void apply_1q(cplx* a, std::size_t dim, int q, const cplx* m) {
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(dim / 2);
    const std::size_t bit = std::size_t{1} << q;
    const cplx m0 = m[0], m1 = m[1], m2 = m[2], m3 = m[3];
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < half; ++i) {
        const std::size_t i0 = insert_zero(static_cast<std::size_t>(i), q);
        const std::size_t i1 = i0 | bit;
        const cplx x0 = a[i0], x1 = a[i1];
        a[i0] = m0 * x0 + m1 * x1;
        a[i1] = m2 * x0 + m3 * x1;
    }
}

void apply_2q(cplx* a, std::size_t dim, int q0, int q1, const cplx* m) {
    const int lo = q0 < q1 ? q0 : q1;
    const int hi = q0 < q1 ? q1 : q0;
    const std::size_t b0 = std::size_t{1} << q0, b1 = std::size_t{1} << q1;
    const std::ptrdiff_t quarter = static_cast<std::ptrdiff_t>(dim / 4);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < quarter; ++i) {
        const std::size_t base = insert_zero(insert_zero(static_cast<std::size_t>(i), lo), hi);
        const std::size_t idx[4] = {base, base | b0, base | b1, base | b0 | b1};
        const cplx x[4] = {a[idx[0]], a[idx[1]], a[idx[2]], a[idx[3]]};
        for (int r = 0; r < 4; ++r)
            a[idx[r]] = m[4 * r] * x[0] + m[4 * r + 1] * x[1] + m[4 * r + 2] * x[2] + m[4 * r + 3] * x[3];
    }
}

void pauli_rotation(cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const cplx base = kIPow[ny % 4];
    const cplx mis(0.0, -s);
    if (x == 0) {
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
        for (std::ptrdiff_t b = 0; b < n; ++b)
            a[b] *= c + mis * pauli_phase(static_cast<std::size_t>(b), z, base);
        return;
    }
    const int low = __builtin_ctzll(x);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(dim / 2);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::ptrdiff_t i = 0; i < half; ++i) {
        const std::size_t b = insert_zero(static_cast<std::size_t>(i), low);
        const std::size_t bp = b ^ x;
        const cplx vb = a[b], vp = a[bp];
        a[bp] = c * vp + mis * pauli_phase(b, z, base) * vb;
        a[b] = c * vb + mis * pauli_phase(bp, z, base) * vp;
    }
}

cplx pauli_expectation(const cplx* a, std::size_t dim, std::uint64_t x, std::uint64_t z, int ny) {
    const cplx base = kIPow[ny % 4];
    const std::ptrdiff_t n_chunks = static_cast<std::ptrdiff_t>((dim + kChunk - 1) / kChunk);
    std::vector<cplx> partial(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(static) if (n_chunks > 1)
    for (std::ptrdiff_t ch = 0; ch < n_chunks; ++ch) {
        cplx acc = 0.0;
        const std::size_t start = static_cast<std::size_t>(ch) * kChunk;
        const std::size_t end = std::min(dim, start + kChunk);
        for (std::size_t b = start; b < end; ++b) acc += std::conj(a[b ^ x]) * pauli_phase(b, z, base) * a[b];
        partial[static_cast<std::size_t>(ch)] = acc;
    }
    cplx total = 0.0;
    for (const auto& p : partial) total += p;
    return total;
}

}  // namespace pwd::kernels::omp
