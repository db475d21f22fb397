#include "pwdual/measurement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "pwdual/ffft.hpp"
#include "pwdual/rng.hpp"

namespace pwd {

std::string to_string(MeasurementStrategy s) {
    switch (s) {
        case MeasurementStrategy::PerTerm: return "per_term";
        case MeasurementStrategy::DiagonalGroups: return "diagonal_groups";
        case MeasurementStrategy::DiagonalUVOnly: return "diagonal_UV_only";
    }
    return "unknown";
}

MeasurementStrategy parse_strategy(const std::string& s) {
    if (s == "per_term") return MeasurementStrategy::PerTerm;
    if (s == "diagonal_groups") return MeasurementStrategy::DiagonalGroups;
    if (s == "diagonal_UV_only") return MeasurementStrategy::DiagonalUVOnly;
    throw std::invalid_argument("unknown measurement strategy '" + s +
                                "' (expected per_term, diagonal_groups or diagonal_UV_only)");
}

DiagonalEvaluator::DiagonalEvaluator(const QubitOperator& diag) {
    for (const auto& [s, c] : diag.terms()) {
        if (s.x_mask() != 0) throw std::invalid_argument("term " + s.to_string() + " is not diagonal");
        if (s.is_identity())
            offset_ += c.real();
        else
            terms_.emplace_back(s.z_mask(), c.real());
    }
}

double DiagonalEvaluator::operator()(std::uint64_t bits) const {
    double e = offset_;
    for (const auto& [z, c] : terms_) e += (std::popcount(bits & z) & 1) ? -c : c;
    return e;
}

MeasurementGroups measurement_groups(const HamiltonianSet& hs, MeasurementStrategy strategy) {
    MeasurementGroups g;
    g.strategy = strategy;
    g.n_qubits = hs.n_qubits();
    auto add_paulis = [&](const QubitOperator& op) {
        for (const auto& [s, c] : op.terms()) {
            if (s.is_identity())
                g.identity += c.real();
            else
                g.pauli_terms.emplace_back(s, c.real());
        }
    };
    if (strategy == MeasurementStrategy::PerTerm) {
        add_paulis(build_qubit(hs));
        return g;
    }
    if (hs.representation != Representation::Dual || !hs.grid)
        throw std::invalid_argument("diagonal measurement groups need the dual-basis Hamiltonian");
    g.identity = hs.constant;
    g.has_uv = true;
    g.uv = DiagonalEvaluator(build_qubit_part(hs, hs.U + hs.V));
    if (strategy == MeasurementStrategy::DiagonalGroups && !hs.T.empty()) {
        const ModeGrid& grid = *hs.grid;
        g.has_t = true;
        g.t_rotation = build_ffft_nd(grid);
        QubitOperator d;
        for (int q = 0; q < g.n_qubits; ++q) {
            const double eps = 0.5 * grid.k_squared(grid.nu(grid.site_of_qubit(static_cast<std::size_t>(q))));
            d.add(PauliString(), 0.5 * eps);
            d.add(PauliString({{q, Pauli::Z}}), -0.5 * eps);
        }
        g.t_diag = DiagonalEvaluator(d);
    } else {
        add_paulis(build_qubit_part(hs, hs.T));
    }
    return g;
}

namespace {

// Per-shot estimator values over `shots` rounds; each group draws from its
// own child stream of the master seed (child 0 = U+V, 1 = T, 2 + j = term j).
std::vector<double> shot_values(const Statevector& state, const MeasurementGroups& g, std::size_t shots,
                                std::uint64_t seed) {
    if (shots < 2) throw std::invalid_argument("at least two shots are needed for a standard error");
    if (state.n_qubits() != g.n_qubits) throw std::invalid_argument("state width does not match the Hamiltonian");
    const CounterRng master(seed);
    std::vector<double> e(shots, g.identity);
    if (g.has_uv) {
        const auto bits = sample_bitstrings(state, nullptr, shots, master.child(0).key());
        for (std::size_t s = 0; s < shots; ++s) e[s] += g.uv(bits[s]);
    }
    if (g.has_t) {
        const auto bits = sample_bitstrings(state, &g.t_rotation, shots, master.child(1).key());
        for (std::size_t s = 0; s < shots; ++s) e[s] += g.t_diag(bits[s]);
    }
    for (std::size_t j = 0; j < g.pauli_terms.size(); ++j) {
        const auto& [p, c] = g.pauli_terms[j];
        // Reading P in its eigenbasis gives +1 with probability (1 + <P>) / 2.
        const double mean = expectation(state, QubitOperator::term(p));
        const double prob_plus = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
        const CounterRng rng = master.child(2 + j);
        for (std::size_t s = 0; s < shots; ++s) e[s] += rng.uniform_at(s) < prob_plus ? c : -c;
    }
    return e;
}

std::pair<double, double> mean_and_variance(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - m) * (v - m);
    var /= static_cast<double>(x.size() - 1);
    return {m, var};
}

std::size_t groups_count(const MeasurementGroups& g) {
    return (g.has_uv ? 1 : 0) + (g.has_t ? 1 : 0) + g.pauli_terms.size();
}

double diagonal_variance(const Statevector& state, const Circuit* rotation, const DiagonalEvaluator& f) {
    Statevector s = state;
    if (rotation) apply_circuit(s, *rotation);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double p = std::norm(s[i]);
        const double v = f(i);
        m1 += p * v;
        m2 += p * v * v;
    }
    return std::max(0.0, m2 - m1 * m1);
}

}  // namespace

EnergyEstimate estimate_energy(const Statevector& state, const HamiltonianSet& hs, const MeasurementPlan& plan) {
    const MeasurementGroups g = measurement_groups(hs, plan.strategy);
    const auto e = shot_values(state, g, plan.shots, plan.seed);
    const auto [m, var] = mean_and_variance(e);
    return {m, std::sqrt(var / static_cast<double>(plan.shots)), plan.shots * groups_count(g)};
}

double empirical_variance(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy,
                          std::size_t shots, std::uint64_t seed) {
    return mean_and_variance(shot_values(state, measurement_groups(hs, strategy), shots, seed)).second;
}

double analytic_variance(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy) {
    const MeasurementGroups g = measurement_groups(hs, strategy);
    double var = 0.0;
    if (g.has_uv) var += diagonal_variance(state, nullptr, g.uv);
    if (g.has_t) var += diagonal_variance(state, &g.t_rotation, g.t_diag);
    for (const auto& [p, c] : g.pauli_terms) {
        const double mean = expectation(state, QubitOperator::term(p));
        var += c * c * (1.0 - mean * mean);
    }
    return var;
}

double shot_budget(const HamiltonianSet& hs, int eta, double target, ErrorMode mode, MeasurementStrategy strategy) {
    if (!(target > 0.0)) throw std::invalid_argument("target error must be positive");
    const double eps = mode == ErrorMode::Relative ? target * eta : target;
    const NormBounds b = norm_bounds(hs, eta);
    const double uv = b.maxU + b.maxV;
    switch (strategy) {
        case MeasurementStrategy::PerTerm: return (b.lambda / eps) * (b.lambda / eps);
        case MeasurementStrategy::DiagonalGroups: return (b.maxT * b.maxT + uv * uv) / (eps * eps);
        case MeasurementStrategy::DiagonalUVOnly: return (b.triangle_T * b.triangle_T + uv * uv) / (eps * eps);
    }
    return 0.0;
}

double phase_estimation_budget(const HamiltonianSet& hs, int eta, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("target error must be positive");
    return norm_bounds(hs, eta).lambda / eps;
}

std::size_t empirical_shots_needed(const Statevector& state, const HamiltonianSet& hs, MeasurementStrategy strategy,
                                   double eps, std::size_t pilot_shots, std::uint64_t seed) {
    if (!(eps > 0.0)) throw std::invalid_argument("target error must be positive");
    const MeasurementGroups g = measurement_groups(hs, strategy);
    double var = 0.0;
    if (strategy == MeasurementStrategy::PerTerm) {
        // Optimal allocation over terms: total shots (sum |c_j| sigma_j)^2 / eps^2.
        const CounterRng master(seed);
        double s = 0.0;
        for (std::size_t j = 0; j < g.pauli_terms.size(); ++j) {
            const auto& [p, c] = g.pauli_terms[j];
            const double prob_plus = std::clamp(0.5 * (1.0 + expectation(state, QubitOperator::term(p))), 0.0, 1.0);
            const CounterRng rng = master.child(2 + j);
            std::vector<double> o(pilot_shots);
            for (std::size_t k = 0; k < pilot_shots; ++k) o[k] = rng.uniform_at(k) < prob_plus ? 1.0 : -1.0;
            s += std::abs(c) * std::sqrt(mean_and_variance(o).second);
        }
        var = s * s;
    } else {
        var = mean_and_variance(shot_values(state, g, pilot_shots, seed)).second;
    }
    auto enough = [&](std::size_t m) { return std::sqrt(var / static_cast<double>(m)) <= eps; };
    std::size_t hi = 1;
    while (!enough(hi)) hi *= 2;
    std::size_t lo = hi / 2;  // enough(lo) is false unless lo == 0
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (enough(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace pwd
