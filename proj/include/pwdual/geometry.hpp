#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace pwd {

using IVec = std::vector<int>;
using RVec = std::array<double, 3>;

struct Cell {
    int d = 1;
    double omega = 1.0;
    bool spinful = false;
};

// Spin label of an orbital. None is used for spinless grids.
enum class Spin { Up = 0, Down = 1, None = -1 };

struct Nucleus {
    std::vector<double> position;
    double charge = 1.0;
};

// Momentum grid and dual-basis lattice for a cubic cell.
//
// Modes run over {-M/2, ..., M/2-1} per axis. Both modes and sites are
// flattened with axis 0 varying fastest, so flat = sum_a idx_a * M^a where
// idx_a = nu_a + M/2 for modes and idx_a = p_a for sites. Qubit indices are
// 2*site + spin when spinful (spin-up even) and site otherwise.
class ModeGrid {
public:
    ModeGrid(Cell cell, int modes_per_axis);

    int dim() const { return cell_.d; }
    int modes_per_axis() const { return M_; }
    double volume() const { return cell_.omega; }
    bool spinful() const { return cell_.spinful; }
    const Cell& cell() const { return cell_; }

    std::size_t n_spatial() const { return n_spatial_; }
    std::size_t n_qubits() const { return n_spatial_ * (cell_.spinful ? 2 : 1); }
    int spin_count() const { return cell_.spinful ? 2 : 1; }

    // Side length of the cell.
    double length() const { return length_; }
    // Lattice spacing between neighbouring dual-basis sites.
    double spacing() const { return length_ / M_; }

    const std::vector<IVec>& nu_list() const { return nu_list_; }
    const IVec& nu(std::size_t flat) const { return nu_list_[flat]; }
    std::size_t flat_nu(const IVec& nu) const;

    IVec site(std::size_t flat) const;
    std::size_t flat_site(const IVec& p) const;

    RVec k_vec(const IVec& nu) const;
    double k_squared(const IVec& nu) const;
    RVec r_vec(const IVec& p) const;
    RVec r_vec(std::size_t flat_site) const { return r_vec(site(flat_site)); }

    // Componentwise wrap into {-M/2, ..., M/2-1}.
    IVec wrap(IVec nu) const;
    // Componentwise wrap of a site displacement into {0, ..., M-1}.
    IVec wrap_site(IVec p) const;

    std::size_t qubit_index(std::size_t site, Spin s) const;
    std::size_t site_of_qubit(std::size_t q) const { return cell_.spinful ? q / 2 : q; }
    Spin spin_of_qubit(std::size_t q) const;

    // Minimum-image distance between two sites of the periodic cell.
    double min_image_distance(std::size_t p, std::size_t q) const;

    // Largest minimum-image distance realisable in the cell.
    double cell_diameter() const;

private:
    Cell cell_;
    int M_;
    std::size_t n_spatial_;
    double length_;
    std::vector<IVec> nu_list_;
};

ModeGrid build_grid(int d, int M, double omega, bool spinful);
IVec wrap_mode(const ModeGrid& grid, const IVec& nu);
double k_squared(const ModeGrid& grid, const IVec& nu);

double dot(const RVec& a, const RVec& b);

bool is_power_of_two(std::size_t x);
int log2_exact(std::size_t x);

}  // namespace pwd
