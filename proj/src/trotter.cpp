#include "pwdual/trotter.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <stdexcept>

#include "pwdual/ffft.hpp"
#include "pwdual/statevector.hpp"
#include "pwdual/swapnet.hpp"

namespace pwd {

namespace {

bool is_hopping_string(const PauliString& s, Pauli end) {
    if (s.weight() < 2) return false;
    const int p = s.ops.front().first, q = s.ops.back().first;
    if (static_cast<int>(s.weight()) != q - p + 1) return false;
    if (s.ops.front().second != end || s.ops.back().second != end) return false;
    for (std::size_t i = 1; i + 1 < s.ops.size(); ++i)
        if (s.ops[i].second != Pauli::Z) return false;
    return true;
}

double real_coefficient(const PauliString& s, cplx c) {
    if (std::abs(c.imag()) > 1e-12)
        throw std::invalid_argument("non-Hermitian coefficient on " + s.to_string());
    return c.real();
}

DenseMatrix matrix_power(DenseMatrix base, int r) {
    DenseMatrix out = DenseMatrix::Identity(base.rows(), base.cols());
    while (r > 0) {
        if (r & 1) out = out * base;
        r >>= 1;
        if (r > 0) base = base * base;
    }
    return out;
}

}  // namespace

QubitOperator without_identity(const QubitOperator& h) {
    QubitOperator out;
    for (const auto& [s, c] : h.terms())
        if (!s.is_identity()) out.add(s, c);
    return out;
}

DiagonalTerms diagonal_terms(const QubitOperator& diag) {
    DiagonalTerms d;
    for (const auto& [s, c] : diag.terms()) {
        if (s.is_identity()) continue;
        const double v = real_coefficient(s, c);
        if (s.pattern() == "Z")
            d.z.emplace_back(s.ops[0].first, v);
        else if (s.pattern() == "ZZ")
            d.zz.push_back({{s.ops[0].first, s.ops[1].first}, v});
        else
            throw std::invalid_argument("term " + s.to_string() + " is not a Z or ZZ term");
    }
    return d;
}

Circuit diagonal_layer(const DiagonalTerms& d, double tau, int n_qubits, Connectivity conn) {
    Circuit c(n_qubits, conn);
    for (const auto& [q, v] : d.z) c.add(Gate::rz(q, 2.0 * v * tau));
    if (conn.kind == Connectivity::Kind::Planar && n_qubits > 1) {
        PairPhases phases;
        for (const auto& [pq, v] : d.zz) phases[pq] = v * tau;
        const SwapSchedule schedule = build_full_schedule(conn.rows, conn.cols);
        c.append(lower_diagonal_layer(phases, schedule, true).circuit);
    } else {
        for (const auto& [pq, v] : d.zz)
            c.add(Gate::pauli_exp(PauliString({{pq.first, Pauli::Z}, {pq.second, Pauli::Z}}), v * tau));
    }
    return c;
}

namespace {

// Plane-wave energies of a one-body operator T = sum t_ij a+_i a_j: with
// C^dagger a+_q C = sum_p w_p a+_p, T = C^dagger (sum_q e_q n_q) C requires
// e_q = sum_pp' conj(w_p) t_pp' w_p'. Throws when T has other structure.
std::vector<double> kinetic_phases(const HamiltonianSet& hs) {
    const ModeGrid& grid = *hs.grid;
    const int n = hs.n_qubits();
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [key, c] : hs.T.terms()) {
        if (key.size() != 2 || !key[0].raise || key[1].raise)
            throw std::invalid_argument("the split-operator step needs a one-body kinetic operator");
        t(key[0].index, key[1].index) += c;
    }
    const std::size_t N = grid.n_spatial();
    const double norm = 1.0 / std::sqrt(static_cast<double>(N));
    std::vector<double> eps(static_cast<std::size_t>(n));
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(n, n);
    for (int q = 0; q < n; ++q) {
        const std::size_t j = grid.site_of_qubit(static_cast<std::size_t>(q));
        const Spin spin = grid.spin_of_qubit(static_cast<std::size_t>(q));
        const RVec k = grid.k_vec(grid.nu(j));
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(n);
        for (std::size_t p = 0; p < N; ++p)
            w(static_cast<long>(grid.qubit_index(p, spin))) = norm * std::exp(cplx(0.0, -dot(k, grid.r_vec(p))));
        eps[static_cast<std::size_t>(q)] = w.dot(t * w).real();
        rebuilt += eps[static_cast<std::size_t>(q)] * w * w.adjoint();
    }
    if ((rebuilt - t).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("the kinetic operator is not diagonal in the plane-wave basis");
    return eps;
}

}  // namespace

Circuit split_operator_step(const HamiltonianSet& hs, double tau, int order, Connectivity conn) {
    if (hs.representation != Representation::Dual || !hs.grid)
        throw std::invalid_argument("the split-operator step needs a dual-basis Hamiltonian");
    if (order != 1 && order != 2) throw std::invalid_argument("Trotter order must be 1 or 2");
    const ModeGrid& grid = *hs.grid;
    const int n = hs.n_qubits();
    const DiagonalTerms diag = diagonal_terms(without_identity(build_qubit_part(hs, hs.U + hs.V)));
    const std::vector<double> eps = kinetic_phases(hs);

    Circuit c(n, conn);
    c.append(diagonal_layer(diag, order == 2 ? tau / 2.0 : tau, n, conn));
    if (std::any_of(eps.begin(), eps.end(), [](double e) { return std::abs(e) > 1e-14; })) {
        const Circuit ffft = build_ffft_nd(grid, conn);
        c.append(ffft);
        for (int q = 0; q < n; ++q)
            if (std::abs(eps[static_cast<std::size_t>(q)]) > 1e-14) c.add(Gate::rz(q, -tau * eps[static_cast<std::size_t>(q)]));
        c.append(ffft.inverse());
    }
    if (order == 2) c.append(diagonal_layer(diag, tau / 2.0, n, conn));
    return c;
}

JwGroups group_jw_terms(const QubitOperator& h) {
    JwGroups g;
    std::map<std::pair<int, int>, JwGroups::Hop> hops;
    for (const auto& [s, c] : h.terms()) {
        if (s.is_identity()) continue;
        const double v = real_coefficient(s, c);
        const std::string pat = s.pattern();
        if (pat == "Z") {
            g.z.emplace_back(s.ops[0].first, v);
        } else if (pat == "ZZ") {
            g.zz.push_back({{s.ops[0].first, s.ops[1].first}, v});
        } else if (is_hopping_string(s, Pauli::X) || is_hopping_string(s, Pauli::Y)) {
            const int p = s.ops.front().first, q = s.ops.back().first;
            auto& hop = hops[{p, q}];
            hop.p = p;
            hop.q = q;
            (s.ops.front().second == Pauli::X ? hop.xx : hop.yy) += v;
        } else {
            throw std::invalid_argument("unsupported Pauli pattern " + s.to_string() + " for the direct sweep");
        }
    }
    for (const auto& [key, hop] : hops) g.hop.push_back(hop);
    return g;
}

void append_hopping(Circuit& c, const JwGroups::Hop& hop, double tau) {
    const int p = hop.p, q = hop.q;
    Circuit basis(c.n_qubits());
    basis.add(Gate::cnot(p, q));
    basis.add(Gate::h(p));
    for (int s = p + 1; s < q; ++s) basis.add(Gate::cnot(s, p));
    c.append(basis);
    // The pair is now xx Z_p - yy Z_p Z_q.
    if (hop.xx != 0.0) c.add(Gate::rz(p, 2.0 * hop.xx * tau));
    if (hop.yy != 0.0) {
        c.add(Gate::cnot(q, p));
        c.add(Gate::rz(p, -2.0 * hop.yy * tau));
        c.add(Gate::cnot(q, p));
    }
    c.append(basis.inverse());
}

namespace {

// Applies `unit(i, tau)` over the sweep in product-formula order.
template <typename F>
void sweep(std::size_t units, double tau, int order, F&& unit) {
    if (order != 1 && order != 2) throw std::invalid_argument("Trotter order must be 1 or 2");
    if (order == 1) {
        for (std::size_t i = 0; i < units; ++i) unit(i, tau);
        return;
    }
    for (std::size_t i = 0; i < units; ++i) unit(i, tau / 2.0);
    for (std::size_t i = units; i-- > 0;) unit(i, tau / 2.0);
}

}  // namespace

Circuit direct_jw_step(const QubitOperator& h, double tau, int order, int n_qubits) {
    const JwGroups g = group_jw_terms(h);
    const int n = std::max({1, h.max_qubit() + 1, n_qubits});
    Circuit c(n);
    const std::size_t nz = g.z.size(), nzz = g.zz.size();
    sweep(nz + nzz + g.hop.size(), tau, order, [&](std::size_t i, double t) {
        if (i < nz) {
            c.add(Gate::rz(g.z[i].first, 2.0 * g.z[i].second * t));
        } else if (i < nz + nzz) {
            const auto& [pq, v] = g.zz[i - nz];
            c.add(Gate::cnot(pq.first, pq.second));
            c.add(Gate::rz(pq.second, 2.0 * v * t));
            c.add(Gate::cnot(pq.first, pq.second));
        } else {
            append_hopping(c, g.hop[i - nz - nzz], t);
        }
    });
    return c;
}

DenseMatrix direct_jw_reference(const QubitOperator& h, double tau, int order, int n_qubits) {
    const JwGroups g = group_jw_terms(h);
    const int n = std::max({1, h.max_qubit() + 1, n_qubits});
    const std::size_t nz = g.z.size(), nzz = g.zz.size();
    auto unit_op = [&](std::size_t i) {
        if (i < nz) return QubitOperator::term(PauliString({{g.z[i].first, Pauli::Z}}), g.z[i].second);
        if (i < nz + nzz) {
            const auto& [pq, v] = g.zz[i - nz];
            return QubitOperator::term(PauliString({{pq.first, Pauli::Z}, {pq.second, Pauli::Z}}), v);
        }
        const auto& hop = g.hop[i - nz - nzz];
        std::vector<std::pair<int, Pauli>> xs, ys;
        xs.emplace_back(hop.p, Pauli::X);
        ys.emplace_back(hop.p, Pauli::Y);
        for (int s = hop.p + 1; s < hop.q; ++s) {
            xs.emplace_back(s, Pauli::Z);
            ys.emplace_back(s, Pauli::Z);
        }
        xs.emplace_back(hop.q, Pauli::X);
        ys.emplace_back(hop.q, Pauli::Y);
        return QubitOperator::term(PauliString(xs), hop.xx) + QubitOperator::term(PauliString(ys), hop.yy);
    };
    DenseMatrix out = DenseMatrix::Identity(std::size_t{1} << n, std::size_t{1} << n);
    sweep(nz + nzz + g.hop.size(), tau, order,
          [&](std::size_t i, double t) { out = exact_propagator(to_matrix(unit_op(i), n), t) * out; });
    return out;
}

int estimate_r(double eta, double N, double omega, double t, double eps, double C) {
    if (eta <= 0 || N <= 0 || omega <= 0 || t <= 0 || eps <= 0 || C <= 0)
        throw std::invalid_argument("estimate_r needs positive arguments");
    const double base = C * eta * eta * std::pow(N, 5.0 / 6.0) * std::pow(t, 1.5) /
                        (std::pow(omega, 5.0 / 6.0) * std::sqrt(eps));
    const double corr = std::sqrt(1.0 + eta * std::cbrt(omega) / std::cbrt(N));
    return static_cast<int>(std::ceil(base * corr));
}

double spectral_norm(const DenseMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<DenseMatrix> svd(m);
    return svd.singularValues()(0);
}

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log-log fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {slope, (sy - slope * sx) / n};
}

ErrorScaling measure_error_scaling(const HamiltonianSet& hs, double t, const std::vector<int>& r_list,
                                   TrotterStrategy strategy, int order) {
    const int n = hs.n_qubits();
    if (n > 12) throw std::invalid_argument("error scaling needs a dense exact propagator (at most 12 qubits)");
    const QubitOperator h = without_identity(build_qubit(hs));
    const DenseMatrix exact = exact_propagator(to_matrix(h, n), t);
    ErrorScaling out;
    out.points.resize(r_list.size());
    for (int r : r_list)
        if (r < 1) throw std::invalid_argument("r must be at least 1");
    // Each r is an independent dense evaluation.
    for (std::size_t i = 0; i < r_list.size(); ++i) {
        const int r = r_list[i];
        const double tau = t / r;
        const Circuit step = strategy == TrotterStrategy::SplitOperator ? split_operator_step(hs, tau, order)
                                                                        : direct_jw_step(h, tau, order, n);
        out.points[i] = {r, spectral_norm(matrix_power(circuit_matrix(step), r) - exact)};
    }
    std::vector<double> xs, ys;
    for (const auto& p : out.points) {
        if (p.error > 1e-14) {
            xs.push_back(p.r);
            ys.push_back(p.error);
        }
    }
    if (xs.size() >= 2) std::tie(out.slope, out.intercept) = loglog_fit(xs, ys);
    return out;
}

}  // namespace pwd
