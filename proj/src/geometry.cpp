#include "pwdual/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pwd {

namespace {

int floor_mod(int a, int m) {
    int r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

ModeGrid::ModeGrid(Cell cell, int modes_per_axis) : cell_(cell), M_(modes_per_axis) {
    if (cell_.d < 1 || cell_.d > 3) {
        throw std::invalid_argument("dimension must be 1, 2 or 3 (got " + std::to_string(cell_.d) + ")");
    }
    if (!(cell_.omega > 0.0) || !std::isfinite(cell_.omega)) {
        throw std::invalid_argument("cell volume must be positive and finite");
    }
    if (M_ < 2 || M_ % 2 != 0) {
        throw std::invalid_argument("modes per axis must be an even integer >= 2 (radix-2 transform), got " +
                                    std::to_string(M_));
    }
    n_spatial_ = 1;
    for (int a = 0; a < cell_.d; ++a) n_spatial_ *= static_cast<std::size_t>(M_);
    length_ = std::pow(cell_.omega, 1.0 / cell_.d);

    nu_list_.reserve(n_spatial_);
    for (std::size_t f = 0; f < n_spatial_; ++f) {
        IVec nu(cell_.d);
        std::size_t rest = f;
        for (int a = 0; a < cell_.d; ++a) {
            nu[a] = static_cast<int>(rest % M_) - M_ / 2;
            rest /= M_;
        }
        nu_list_.push_back(std::move(nu));
    }
}

std::size_t ModeGrid::flat_nu(const IVec& nu) const {
    std::size_t f = 0, stride = 1;
    for (int a = 0; a < cell_.d; ++a) {
        int idx = nu[a] + M_ / 2;
        if (idx < 0 || idx >= M_) throw std::out_of_range("mode index out of range");
        f += static_cast<std::size_t>(idx) * stride;
        stride *= M_;
    }
    return f;
}

IVec ModeGrid::site(std::size_t flat) const {
    IVec p(cell_.d);
    for (int a = 0; a < cell_.d; ++a) {
        p[a] = static_cast<int>(flat % M_);
        flat /= M_;
    }
    return p;
}

std::size_t ModeGrid::flat_site(const IVec& p) const {
    std::size_t f = 0, stride = 1;
    for (int a = 0; a < cell_.d; ++a) {
        f += static_cast<std::size_t>(floor_mod(p[a], M_)) * stride;
        stride *= M_;
    }
    return f;
}

RVec ModeGrid::k_vec(const IVec& nu) const {
    RVec k{0.0, 0.0, 0.0};
    for (int a = 0; a < cell_.d; ++a) k[a] = 2.0 * std::numbers::pi * nu[a] / length_;
    return k;
}

double ModeGrid::k_squared(const IVec& nu) const {
    RVec k = k_vec(nu);
    return dot(k, k);
}

RVec ModeGrid::r_vec(const IVec& p) const {
    RVec r{0.0, 0.0, 0.0};
    for (int a = 0; a < cell_.d; ++a) r[a] = p[a] * spacing();
    return r;
}

IVec ModeGrid::wrap(IVec nu) const {
    for (auto& v : nu) v = floor_mod(v + M_ / 2, M_) - M_ / 2;
    return nu;
}

IVec ModeGrid::wrap_site(IVec p) const {
    for (auto& v : p) v = floor_mod(v, M_);
    return p;
}

std::size_t ModeGrid::qubit_index(std::size_t site, Spin s) const {
    if (site >= n_spatial_) throw std::out_of_range("site index out of range");
    if (!cell_.spinful) {
        if (s != Spin::None) throw std::invalid_argument("spinless grid takes no spin label");
        return site;
    }
    if (s == Spin::None) throw std::invalid_argument("spinful grid requires a spin label");
    return 2 * site + static_cast<std::size_t>(s);
}

Spin ModeGrid::spin_of_qubit(std::size_t q) const {
    if (!cell_.spinful) return Spin::None;
    return (q % 2 == 0) ? Spin::Up : Spin::Down;
}

double ModeGrid::min_image_distance(std::size_t p, std::size_t q) const {
    IVec a = site(p), b = site(q);
    double s = 0.0;
    for (int ax = 0; ax < cell_.d; ++ax) {
        int delta = floor_mod(a[ax] - b[ax], M_);
        int img = std::min(delta, M_ - delta);
        double x = img * spacing();
        s += x * x;
    }
    return std::sqrt(s);
}

double ModeGrid::cell_diameter() const {
    double half = (M_ / 2) * spacing();
    return std::sqrt(cell_.d * half * half);
}

ModeGrid build_grid(int d, int M, double omega, bool spinful) {
    return ModeGrid(Cell{d, omega, spinful}, M);
}

IVec wrap_mode(const ModeGrid& grid, const IVec& nu) { return grid.wrap(nu); }

double k_squared(const ModeGrid& grid, const IVec& nu) { return grid.k_squared(nu); }

double dot(const RVec& a, const RVec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

int log2_exact(std::size_t x) {
    if (!is_power_of_two(x)) throw std::invalid_argument("value is not a power of two");
    int k = 0;
    while ((std::size_t{1} << k) < x) ++k;
    return k;
}

}  // namespace pwd
