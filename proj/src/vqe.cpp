#include "pwdual/vqe.hpp"

#include <gsl/gsl_multimin.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "pwdual/ffft.hpp"
#include "pwdual/rng.hpp"
#include "pwdual/trotter.hpp"

namespace pwd {

ReferenceState prepare_reference(const ModeGrid& grid, int eta) {
    const int n = static_cast<int>(grid.n_qubits());
    if (eta < 0 || eta > n) throw std::invalid_argument("eta must lie in [0, number of orbitals]");
    const std::size_t N = grid.n_spatial();
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> k2(N);
    for (std::size_t j = 0; j < N; ++j) k2[j] = grid.k_squared(grid.nu(j));
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return k2[a] < k2[b]; });

    ReferenceState ref;
    std::uint64_t bits = 0;
    auto fill = [&](int count, Spin s) {
        for (int i = 0; i < count; ++i) {
            const std::size_t j = order[static_cast<std::size_t>(i)];
            const int q = static_cast<int>(grid.qubit_index(j, s));
            bits |= std::uint64_t{1} << q;
            ref.occupied_qubits.push_back(q);
            ref.kinetic_energy += 0.5 * k2[j];
        }
        if (count > 0 && static_cast<std::size_t>(count) < N) {
            const double last = k2[order[static_cast<std::size_t>(count) - 1]];
            const double next = k2[order[static_cast<std::size_t>(count)]];
            if (std::abs(next - last) <= 1e-12 * std::max(1.0, last)) ref.degenerate_shell = true;
        }
    };
    if (grid.spinful()) {
        fill((eta + 1) / 2, Spin::Up);
        fill(eta / 2, Spin::Down);
    } else {
        fill(eta, Spin::None);
    }
    std::sort(ref.occupied_qubits.begin(), ref.occupied_qubits.end());
    if (ref.degenerate_shell)
        ref.warning = "open plane-wave shell at the Fermi level; filled by lowest flat mode index";
    ref.state = Statevector::basis(n, bits);
    apply_circuit(ref.state, build_ffft_nd(grid).inverse());
    return ref;
}

Ansatz::Ansatz(const ModeGrid& grid, AnsatzSpec spec)
    : grid_(grid), spec_(spec), n_(static_cast<int>(grid.n_qubits())) {
    if (spec_.layers < 1) throw std::invalid_argument("the ansatz needs at least one layer");
    if (spec_.minimal && spec_.layers != 1) throw std::invalid_argument("the minimal ansatz has exactly one layer");
    for (int p = 0; p < n_; ++p)
        for (int q = p + 1; q < n_; ++q) pairs_.emplace_back(p, q);
    kin_slot_.resize(static_cast<std::size_t>(n_));
    z_slot_.resize(static_cast<std::size_t>(n_));
    zz_slot_.resize(pairs_.size());

    auto spin_of = [&](int q) { return grid_.spinful() ? q % 2 : 0; };
    auto site_of = [&](int q) { return grid_.site_of_qubit(static_cast<std::size_t>(q)); };
    if (spec_.sharing == Sharing::Full) {
        n_kin_ = spec_.minimal ? 0 : static_cast<std::size_t>(n_);
        n_z_ = static_cast<std::size_t>(n_);
        n_zz_ = pairs_.size();
        for (int q = 0; q < n_; ++q) {
            kin_slot_[static_cast<std::size_t>(q)] = static_cast<std::size_t>(q);
            z_slot_[static_cast<std::size_t>(q)] = n_kin_ + static_cast<std::size_t>(q);
        }
        for (std::size_t i = 0; i < pairs_.size(); ++i) zz_slot_[i] = n_kin_ + n_z_ + i;
    } else {
        // Kinetic phases per plane-wave mode shared over spin, Z phases per
        // spin, ZZ phases per (displacement class, same-spin flag).
        n_kin_ = spec_.minimal ? 0 : grid_.n_spatial();
        n_z_ = static_cast<std::size_t>(grid_.spin_count());
        for (int q = 0; q < n_; ++q) {
            kin_slot_[static_cast<std::size_t>(q)] = site_of(q);
            z_slot_[static_cast<std::size_t>(q)] = n_kin_ + static_cast<std::size_t>(spin_of(q));
        }
        std::map<std::pair<IVec, int>, std::size_t> classes;
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            const auto [p, q] = pairs_[i];
            const IVec a = grid_.site(site_of(p)), b = grid_.site(site_of(q));
            IVec d(a.size()), m(a.size());
            for (std::size_t k = 0; k < a.size(); ++k) {
                d[k] = b[k] - a[k];
                m[k] = -d[k];
            }
            d = grid_.wrap_site(d);
            m = grid_.wrap_site(m);
            const auto key = std::make_pair(std::min(d, m), spin_of(p) == spin_of(q) ? 1 : 0);
            auto it = classes.find(key);
            if (it == classes.end()) it = classes.emplace(key, classes.size()).first;
            zz_slot_[i] = it->second;
        }
        n_zz_ = classes.size();
        for (auto& s : zz_slot_) s += n_kin_ + n_z_;
    }
    if (!spec_.minimal) ffft_ = build_ffft_nd(grid_, spec_.conn);
}

Circuit Ansatz::circuit(const std::vector<double>& theta) const {
    if (theta.size() != parameter_count()) throw std::invalid_argument("wrong number of ansatz parameters");
    Circuit c(n_, spec_.conn);
    const std::size_t per = parameters_per_layer();
    for (int m = 0; m < spec_.layers; ++m) {
        const std::size_t base = per * static_cast<std::size_t>(m);
        DiagonalTerms d;
        for (int q = 0; q < n_; ++q) d.z.emplace_back(q, -theta[base + z_slot_[static_cast<std::size_t>(q)]]);
        for (std::size_t i = 0; i < pairs_.size(); ++i) d.zz.push_back({pairs_[i], -theta[base + zz_slot_[i]]});
        c.append(diagonal_layer(d, 1.0, n_, spec_.conn));
        if (spec_.minimal) continue;
        c.append(ffft_);
        for (int q = 0; q < n_; ++q) c.add(Gate::rz(q, -2.0 * theta[base + kin_slot_[static_cast<std::size_t>(q)]]));
        c.append(ffft_.inverse());
    }
    return c;
}

Statevector Ansatz::state(const Statevector& reference, const std::vector<double>& theta) const {
    Statevector s = reference;
    apply_circuit(s, circuit(theta));
    return s;
}

std::vector<double> Ansatz::expand_to_full(const std::vector<double>& theta) const {
    if (theta.size() != parameter_count()) throw std::invalid_argument("wrong number of ansatz parameters");
    AnsatzSpec full_spec = spec_;
    full_spec.sharing = Sharing::Full;
    const Ansatz full(grid_, full_spec);
    std::vector<double> out(full.parameter_count());
    const std::size_t per = parameters_per_layer(), fper = full.parameters_per_layer();
    for (int m = 0; m < spec_.layers; ++m) {
        const std::size_t b = per * static_cast<std::size_t>(m), fb = fper * static_cast<std::size_t>(m);
        for (int q = 0; q < n_; ++q) {
            const auto uq = static_cast<std::size_t>(q);
            if (!spec_.minimal) out[fb + full.kin_slot_[uq]] = theta[b + kin_slot_[uq]];
            out[fb + full.z_slot_[uq]] = theta[b + z_slot_[uq]];
        }
        for (std::size_t i = 0; i < pairs_.size(); ++i) out[fb + full.zz_slot_[i]] = theta[b + zz_slot_[i]];
    }
    return out;
}

EnergyObjective::EnergyObjective(const Ansatz& ansatz, const Statevector& reference, const QubitOperator& h)
    : ansatz_(ansatz), reference_(reference), h_(to_sparse(h, ansatz.n_qubits())) {}

double EnergyObjective::operator()(const std::vector<double>& theta) const {
    const Eigen::VectorXcd psi = ansatz_.state(reference_, theta).to_eigen();
    return psi.dot(h_ * psi).real();
}

namespace {

struct RunState {
    const std::function<double(const std::vector<double>&)>* f;
    std::vector<double> point;  // full parameter vector, free entries overwritten
    const std::vector<std::size_t>* free;
    OptimizeResult* result;
    int budget;
};

double gsl_objective(const gsl_vector* x, void* params) {
    auto* rs = static_cast<RunState*>(params);
    OptimizeResult& r = *rs->result;
    if (r.evaluations >= rs->budget) {
        r.budget_exhausted = true;
        return r.trace.empty() ? 0.0 : r.trace.back();
    }
    for (std::size_t i = 0; i < rs->free->size(); ++i) rs->point[(*rs->free)[i]] = gsl_vector_get(x, i);
    const double e = (*rs->f)(rs->point);
    ++r.evaluations;
    r.evaluated.push_back(e);
    if (r.trace.empty() || e < r.trace.back()) {
        r.trace.push_back(e);
        r.theta = rs->point;
        r.energy = e;
    } else {
        r.trace.push_back(r.trace.back());
    }
    return e;
}

}  // namespace

OptimizeResult optimize_subset(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> theta0, const std::vector<std::size_t>& free,
                               const OptimizerConfig& cfg) {
    OptimizeResult r;
    RunState rs{&f, theta0, &free, &r, cfg.max_evaluations};
    // The starting point is always evaluated, so E* never exceeds E(theta0).
    gsl_vector* x = gsl_vector_alloc(std::max<std::size_t>(free.size(), 1));
    for (std::size_t i = 0; i < free.size(); ++i) gsl_vector_set(x, i, theta0[free[i]]);
    gsl_objective(x, &rs);
    r.reference_energy = r.energy;
    if (free.empty()) {
        gsl_vector_free(x);
        return r;
    }
    const std::size_t n = free.size();
    gsl_vector* step = gsl_vector_alloc(n);
    gsl_multimin_function fn{&gsl_objective, n, &rs};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    const CounterRng rng(cfg.seed);
    for (int run = 0; run <= cfg.restarts && !r.budget_exhausted; ++run) {
        const double scale = cfg.initial_step / (1.0 + run);
        for (std::size_t i = 0; i < n; ++i) {
            double xi = r.theta[free[i]];
            if (run > 0) xi += scale * (2.0 * rng.child(static_cast<std::uint64_t>(run)).uniform_at(i) - 1.0);
            gsl_vector_set(x, i, xi);
        }
        gsl_vector_set_all(step, scale);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        int status = GSL_CONTINUE;
        while (status == GSL_CONTINUE && !r.budget_exhausted) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), cfg.tolerance);
        }
    }
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return r;
}

OptimizeResult optimize(const Ansatz& ansatz, const HamiltonianSet& hs, const Statevector& reference,
                        const OptimizerConfig& cfg, std::vector<double> theta0) {
    if (ansatz.n_qubits() > kDenseQubitCap) throw std::invalid_argument("exact objective limited to 14 qubits");
    if (theta0.empty()) theta0.assign(ansatz.parameter_count(), 0.0);
    const EnergyObjective obj(ansatz, reference, build_qubit(hs));
    std::vector<std::size_t> free(ansatz.parameter_count());
    std::iota(free.begin(), free.end(), std::size_t{0});
    const std::function<double(const std::vector<double>&)> f = [&](const std::vector<double>& t) { return obj(t); };
    OptimizeResult r = optimize_subset(f, theta0, free, cfg);
    r.reference_energy = obj(std::vector<double>(ansatz.parameter_count(), 0.0));
    return r;
}

QubitOperator scheduled_hamiltonian(const HamiltonianSet& hs, double tau) {
    QubitOperator h = build_qubit_part(hs, hs.T + hs.U + hs.V * cplx(tau));
    h.add(PauliString(), hs.constant);
    h.simplify();
    return h;
}

OptimizeResult layer_train(const Ansatz& ansatz, const HamiltonianSet& hs, const Statevector& reference,
                           const OptimizerConfig& cfg) {
    const int L = ansatz.spec().layers;
    const std::size_t per = ansatz.parameters_per_layer();
    std::vector<double> theta(ansatz.parameter_count(), 0.0);
    OptimizeResult total;
    for (int m = 0; m < L; ++m) {
        const EnergyObjective obj(ansatz, reference, scheduled_hamiltonian(hs, static_cast<double>(m + 1) / L));
        std::vector<std::size_t> free(per);
        std::iota(free.begin(), free.end(), per * static_cast<std::size_t>(m));
        const std::function<double(const std::vector<double>&)> f = [&](const std::vector<double>& t) {
            return obj(t);
        };
        OptimizeResult r = optimize_subset(f, theta, free, cfg);
        theta = r.theta;
        total.evaluations += r.evaluations;
        total.budget_exhausted = total.budget_exhausted || r.budget_exhausted;
        total.trace.insert(total.trace.end(), r.trace.begin(), r.trace.end());
        total.evaluated.insert(total.evaluated.end(), r.evaluated.begin(), r.evaluated.end());
    }
    const EnergyObjective full(ansatz, reference, build_qubit(hs));
    total.theta = theta;
    total.energy = full(theta);
    total.reference_energy = full(std::vector<double>(ansatz.parameter_count(), 0.0));
    return total;
}

double sector_ground_energy(const QubitOperator& h, int n_qubits, int eta) {
    if (n_qubits > kDenseQubitCap) throw std::invalid_argument("sector diagonalisation limited to 14 qubits");
    std::vector<std::uint64_t> basis;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n_qubits); ++b)
        if (std::popcount(b) == eta) basis.push_back(b);
    if (basis.empty()) throw std::invalid_argument("empty particle-number sector");
    std::vector<long> pos(std::size_t{1} << n_qubits, -1);
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = static_cast<long>(i);
    const SparseMatrix m = to_sparse(h, n_qubits);
    Eigen::MatrixXcd sub = Eigen::MatrixXcd::Zero(static_cast<long>(basis.size()), static_cast<long>(basis.size()));
    for (long k = 0; k < m.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            const long r = pos[static_cast<std::size_t>(it.row())], c = pos[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) sub(r, c) = it.value();
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace pwd
