#include "pwdual/lcu.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pwdual/geometry.hpp"

namespace pwd {

namespace {

PauliString hopping_string(int lo, int hi, Pauli end) {
    std::vector<std::pair<int, Pauli>> f;
    f.emplace_back(lo, end);
    for (int s = lo + 1; s < hi; ++s) f.emplace_back(s, Pauli::Z);
    f.emplace_back(hi, end);
    return PauliString(std::move(f));
}

}  // namespace

TermIndex TermIndex::decode(std::size_t l, int n) {
    TermIndex t;
    t.b = static_cast<int>(l % 2);
    const std::size_t pq = l / 2;
    t.p = static_cast<int>(pq / static_cast<std::size_t>(n));
    t.q = static_cast<int>(pq % static_cast<std::size_t>(n));
    return t;
}

LcuModel build_weights(const HamiltonianSet& hs, LcuOptions opts) {
    if (hs.representation != Representation::Dual || !hs.grid)
        throw std::invalid_argument("LCU weights are defined for the dual-basis Hamiltonian");
    const ModeGrid& grid = *hs.grid;
    const int n = static_cast<int>(grid.n_qubits());
    if (!is_power_of_two(static_cast<std::size_t>(n)))
        throw std::invalid_argument("the selection register needs a power-of-two orbital count");
    const DualCoefficients c = dual_coefficients(grid, hs.nuclei, hs.truncated_D);

    auto site = [&](int a) { return static_cast<long>(grid.site_of_qubit(static_cast<std::size_t>(a))); };
    auto same_spin = [&](int a, int b) { return !grid.spinful() || (a % 2) == (b % 2); };
    auto pair_v = [&](int a, int b) { return c.keep(site(a), site(b)) ? c.v(site(a), site(b)) : 0.0; };

    // Z coefficient of orbital a: -(t_pp + u_p + sum_b v_ab) / 2.
    std::vector<double> zc(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
        double s = c.t(site(a), site(a)) + c.u(site(a));
        for (int b = 0; b < n; ++b)
            if (b != a) s += pair_v(a, b);
        zc[static_cast<std::size_t>(a)] = -0.5 * s;
    }

    LcuModel m;
    m.n_system = n;
    m.spinful = grid.spinful();
    m.selection_width = 2 * log2_exact(static_cast<std::size_t>(n)) + 1;
    m.terms.reserve(std::size_t{1} << m.selection_width);
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            for (int b = 0; b < 2; ++b) {
                LcuTerm t;
                t.index = {p, q, b};
                if (p == q) {
                    // Split evenly over b = 0, 1.
                    t.op = PauliString({{p, Pauli::Z}});
                    t.weight = 0.5 * zc[static_cast<std::size_t>(p)];
                } else if (b == 0) {
                    // ZZ coefficient v/2 split over the ordered pairs (p, q), (q, p).
                    t.op = PauliString({{std::min(p, q), Pauli::Z}, {std::max(p, q), Pauli::Z}});
                    t.weight = 0.25 * pair_v(p, q);
                } else if (!same_spin(p, q)) {
                    t.noop = true;
                    t.weight = opts.include_noop ? 1.0 : 0.0;
                } else {
                    // Hopping coefficient t/2 on both strings: XZX from p > q, YZY from p < q.
                    t.op = hopping_string(std::min(p, q), std::max(p, q), p > q ? Pauli::X : Pauli::Y);
                    t.weight = 0.5 * c.t(site(p), site(q));
                }
                m.lambda += std::abs(t.weight);
                if (t.noop) m.noop_weight += std::abs(t.weight);
                m.terms.push_back(std::move(t));
            }
        }
    }
    return m;
}

QubitOperator lcu_hamiltonian(const LcuModel& model) {
    QubitOperator h;
    for (const auto& t : model.terms)
        if (!t.noop && t.weight != 0.0) h.add(t.op, t.weight);
    h.simplify(0.0);
    return h;
}

std::string LcuModel::weights_csv() const {
    std::ostringstream os;
    os << "# lambda " << format_double(lambda) << "\n# noop_weight " << format_double(noop_weight) << "\np,q,b,W\n";
    for (const auto& t : terms)
        os << t.index.p << ',' << t.index.q << ',' << t.index.b << ',' << format_double(t.weight) << '\n';
    return os.str();
}

SparseMatrix select_matrix(const LcuModel& model, int cap) {
    const int total = model.n_system + model.selection_width;
    if (total > cap) throw std::invalid_argument("SELECT matrix width exceeds the dense cap");
    const std::size_t sys_dim = std::size_t{1} << model.n_system;
    const std::size_t dim = std::size_t{1} << total;
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(dim);
    for (const auto& t : model.terms) {
        const std::size_t l = t.index.encode(model.n_system);
        const double sign = t.weight < 0.0 ? -1.0 : 1.0;
        const std::uint64_t xm = t.op.x_mask(), zm = t.op.z_mask();
        const int ny = t.op.y_count();
        for (std::size_t col = 0; col < sys_dim; ++col) {
            const std::size_t row = col ^ xm;
            // <row| P |col> = i^ny (-1)^{popcount(col & z)} for P with Y = iXZ.
            cplx ph = std::pow(cplx(0.0, 1.0), ny) * (std::popcount(col & zm) % 2 ? -1.0 : 1.0);
            trips.emplace_back(static_cast<long>(l * sys_dim + row), static_cast<long>(l * sys_dim + col), sign * ph);
        }
    }
    // Unused selection indices act as identity.
    for (std::size_t l = model.terms.size(); l < (std::size_t{1} << model.selection_width); ++l)
        for (std::size_t col = 0; col < sys_dim; ++col)
            trips.emplace_back(static_cast<long>(l * sys_dim + col), static_cast<long>(l * sys_dim + col), 1.0);
    SparseMatrix m(static_cast<long>(dim), static_cast<long>(dim));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

Statevector prepare_state(const LcuModel& model) {
    if (!(model.lambda > 0.0)) throw std::invalid_argument("PREPARE needs a positive lambda");
    Statevector s(model.selection_width);
    auto& a = s.amplitudes();
    std::fill(a.begin(), a.end(), cplx(0.0));
    for (const auto& t : model.terms)
        a[t.index.encode(model.n_system)] = std::sqrt(std::abs(t.weight) / model.lambda);
    return s;
}

TaylorResult taylor_segment(const LcuModel& model, double t, int K, const Statevector& state) {
    if (K < 0) throw std::invalid_argument("truncation order must be non-negative");
    if (model.lambda * std::abs(t) > std::numbers::ln2 + 1e-12)
        throw std::invalid_argument("segment condition lambda * t <= ln 2 violated");
    if (state.n_qubits() != model.n_system) throw std::invalid_argument("state width does not match the model");
    const SparseMatrix h = to_sparse(lcu_hamiltonian(model), model.n_system);
    const Eigen::VectorXcd psi = state.to_eigen();
    Eigen::VectorXcd term = psi, acc = psi;
    double norm_sum = 1.0, lt_pow = 1.0;
    for (int k = 1; k <= K; ++k) {
        term = (h * term).eval() * (cplx(0.0, -t) / static_cast<double>(k));
        acc += term;
        lt_pow *= model.lambda * std::abs(t) / k;
        norm_sum += lt_pow;
    }
    TaylorResult r;
    r.success_amplitude = acc.norm() / norm_sum;
    acc.normalize();
    r.state = Statevector::from_eigen(model.n_system, acc);
    return r;
}

}  // namespace pwd
