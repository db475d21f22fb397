#include "pwdual/ffft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "pwdual/fermion.hpp"
#include "pwdual/statevector.hpp"

namespace pwd {

namespace {

void require_power_of_two(int M) {
    if (M < 1 || !is_power_of_two(static_cast<std::size_t>(M)))
        throw std::invalid_argument("FFFT needs a power-of-two mode count per axis, got " + std::to_string(M));
}

void begin_stage(FfftPlan& plan, const std::string& kind, int offset, int size) {
    FfftStage st;
    st.kind = kind;
    st.offset = offset;
    st.size = size;
    st.gate_begin = plan.circuit.size();
    plan.stages.push_back(std::move(st));
}

void end_stage(FfftPlan& plan) {
    plan.stages.back().gate_end = plan.circuit.size();
    if (plan.stages.back().gate_begin == plan.stages.back().gate_end && plan.stages.back().butterflies.empty())
        plan.stages.pop_back();
}

// Moves the element at local position i to local position dest[i].
void permute_block(FfftPlan& plan, int offset, const std::vector<int>& dest) {
    begin_stage(plan, "permute", offset, static_cast<int>(dest.size()));
    std::vector<int> layout(dest.size());
    for (std::size_t i = 0; i < dest.size(); ++i) layout[i] = static_cast<int>(i);
    append_sorting_network(plan.circuit, layout, dest, offset);
    end_stage(plan);
}

// Radix-2 decimation in time on positions [offset, offset + M). On return
// position offset + j holds sum_p exp(-2 pi i j p / M) x_p / sqrt(M).
void ffft_recursive(FfftPlan& plan, int offset, int M) {
    if (M == 1) return;
    if (M == 2) {
        begin_stage(plan, "butterfly", offset, 2);
        plan.circuit.add(Gate::fk(offset, offset + 1, 0, 2));
        plan.stages.back().butterflies.push_back({offset, offset + 1, 0});
        end_stage(plan);
        return;
    }
    const int half = M / 2;
    std::vector<int> split(static_cast<std::size_t>(M)), merge(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        split[static_cast<std::size_t>(i)] = (i % 2 == 0) ? i / 2 : half + i / 2;
        merge[static_cast<std::size_t>(i)] = (i < half) ? 2 * i : 2 * (i - half) + 1;
    }
    permute_block(plan, offset, split);
    ffft_recursive(plan, offset, half);
    ffft_recursive(plan, offset + half, half);
    permute_block(plan, offset, merge);
    begin_stage(plan, "butterfly", offset, M);
    for (int k = 0; k < half; ++k) {
        plan.circuit.add(Gate::fk(offset + 2 * k, offset + 2 * k + 1, k, M));
        plan.stages.back().butterflies.push_back({offset + 2 * k, offset + 2 * k + 1, k});
    }
    end_stage(plan);
    // Outputs X_k and X_{k + M/2} leave the butterfly at 2k and 2k + 1.
    permute_block(plan, offset, split);
}

// Full 1D transform on a block, including the (-1)^p factor from the
// asymmetric mode range.
void ffft_block(FfftPlan& plan, int offset, int M) {
    begin_stage(plan, "phase", offset, M);
    for (int p = 1; p < M; p += 2) plan.circuit.add(Gate::phase_n(offset + p, std::numbers::pi));
    end_stage(plan);
    ffft_recursive(plan, offset, M);
}

}  // namespace

void append_sorting_network(Circuit& c, std::vector<int>& layout, const std::vector<int>& target_pos, int offset,
                            GateKind swap_kind) {
    const std::size_t n = layout.size();
    auto rank = [&](std::size_t pos) { return target_pos[static_cast<std::size_t>(layout[pos])]; };
    auto sorted = [&]() {
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (rank(i) > rank(i + 1)) return false;
        return true;
    };
    // Choose the starting parity that finishes in fewer rounds.
    auto rounds_needed = [&](std::size_t start) {
        std::vector<int> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = rank(i);
        std::size_t rounds = 0;
        for (std::size_t parity = start;; parity ^= 1) {
            if (std::is_sorted(r.begin(), r.end())) return rounds;
            for (std::size_t i = parity; i + 1 < n; i += 2)
                if (r[i] > r[i + 1]) std::swap(r[i], r[i + 1]);
            ++rounds;
        }
    };
    std::size_t parity = rounds_needed(0) <= rounds_needed(1) ? 0 : 1;
    while (!sorted()) {
        for (std::size_t i = parity; i + 1 < n; i += 2) {
            if (rank(i) > rank(i + 1)) {
                c.add(Gate{swap_kind, {offset + static_cast<int>(i), offset + static_cast<int>(i) + 1}});
                std::swap(layout[i], layout[i + 1]);
            }
        }
        parity ^= 1;
    }
}

Circuit f2_gate(int k, int M) {
    if (M < 1 || k < 0 || k >= M) throw std::invalid_argument("f2_gate needs 0 <= k < M");
    Circuit c(2);
    c.add(Gate::fk(0, 1, k, M));
    return c;
}

Connectivity planar_layout(int n_qubits) {
    int rows = 1;
    for (int r = 1; r * r <= n_qubits; ++r)
        if (n_qubits % r == 0) rows = r;
    return Connectivity::planar(rows, n_qubits / rows);
}

FfftPlan plan_ffft_1d(int M, Connectivity conn) {
    require_power_of_two(M);
    FfftPlan plan;
    plan.n_qubits = M;
    plan.circuit = Circuit(M, conn);
    ffft_block(plan, 0, M);
    return plan;
}

Circuit build_ffft_1d(int M, Connectivity conn) { return plan_ffft_1d(M, conn).circuit; }

FfftPlan plan_ffft_nd(const ModeGrid& grid, Connectivity conn) {
    const int M = grid.modes_per_axis();
    require_power_of_two(M);
    const int n = static_cast<int>(grid.n_qubits());
    FfftPlan plan;
    plan.n_qubits = n;
    plan.circuit = Circuit(n, conn);

    std::vector<int> layout(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) layout[static_cast<std::size_t>(i)] = i;
    const int d = grid.dim();
    const int n_spin = grid.spin_count();

    for (int axis = 0; axis < d; ++axis) {
        // Lines along `axis`, one per (spin, remaining coordinates), laid out
        // as consecutive blocks of length M ordered by the axis coordinate.
        std::vector<int> target(static_cast<std::size_t>(n));
        for (int label = 0; label < n; ++label) {
            const std::size_t site = grid.site_of_qubit(static_cast<std::size_t>(label));
            const int spin = grid.spinful() ? label % 2 : 0;
            IVec x = grid.site(site);
            int other = 0, stride = 1;
            for (int a = 0; a < d; ++a) {
                if (a == axis) continue;
                other += x[a] * stride;
                stride *= M;
            }
            const int block = spin * (static_cast<int>(grid.n_spatial()) / M) + other;
            target[static_cast<std::size_t>(label)] = block * M + x[axis];
        }
        begin_stage(plan, "permute", 0, n);
        append_sorting_network(plan.circuit, layout, target, 0);
        end_stage(plan);
        for (int block = 0; block < n / M; ++block) ffft_block(plan, block * M, M);
    }
    std::vector<int> canonical(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) canonical[static_cast<std::size_t>(i)] = i;
    begin_stage(plan, "permute", 0, n);
    append_sorting_network(plan.circuit, layout, canonical, 0);
    end_stage(plan);
    (void)n_spin;
    return plan;
}

Circuit build_ffft_nd(const ModeGrid& grid, Connectivity conn) { return plan_ffft_nd(grid, conn).circuit; }

std::string plan_to_json(const FfftPlan& plan) {
    nlohmann::ordered_json j;
    j["n_qubits"] = plan.n_qubits;
    j["connectivity"] = plan.circuit.connectivity().to_string();
    j["gate_count"] = plan.circuit.size();
    j["two_qubit_gates"] = plan.circuit.multi_qubit_count();
    j["depth"] = plan.circuit.depth();
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& st : plan.stages) {
        nlohmann::ordered_json s;
        s["kind"] = st.kind;
        s["offset"] = st.offset;
        s["size"] = st.size;
        s["gates"] = st.gate_end - st.gate_begin;
        if (!st.butterflies.empty()) s["butterflies"] = st.butterflies;
        stages.push_back(s);
    }
    j["stages"] = stages;
    return j.dump(2);
}

double FswapReport::max_error() const {
    return std::max({commutator_error, hermitian_unitary_error, conjugation_error, rotation_error, vacuum_error,
                     gate_error});
}

FswapReport fswap_properties_check(int n, const std::vector<double>& thetas) {
    if (n < 2) throw std::invalid_argument("fermionic swap check needs at least two modes");
    FswapReport r;
    auto maxabs = [](const DenseMatrix& m) { return m.cwiseAbs().maxCoeff(); };
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            FermionOperator fop = FermionOperator::identity() + FermionOperator::term({{p, true}, {q, false}}) +
                                  FermionOperator::term({{q, true}, {p, false}}) - FermionOperator::number(p) -
                                  FermionOperator::number(q);
            const DenseMatrix f = to_matrix(fop, n);
            const DenseMatrix ap = to_matrix(FermionOperator::raise(p), n);
            const DenseMatrix aq = to_matrix(FermionOperator::raise(q), n);
            const DenseMatrix id = DenseMatrix::Identity(f.rows(), f.cols());

            r.commutator_error = std::max(r.commutator_error, maxabs(ap * f - f * ap - (ap - aq)));
            r.commutator_error = std::max(r.commutator_error, maxabs(aq * f - f * aq - (aq - ap)));
            r.hermitian_unitary_error = std::max(r.hermitian_unitary_error, maxabs(f - f.adjoint()));
            r.hermitian_unitary_error = std::max(r.hermitian_unitary_error, maxabs(f * f.adjoint() - id));
            r.conjugation_error = std::max(r.conjugation_error, maxabs(f * ap * f - aq));
            r.conjugation_error = std::max(r.conjugation_error, maxabs(f * aq * f - ap));
            r.vacuum_error = std::max(r.vacuum_error, (f.col(0) - id.col(0)).cwiseAbs().maxCoeff());

            for (double th : thetas) {
                const DenseMatrix u = exact_propagator(f, -th);  // exp(i theta f)
                const cplx e = std::exp(cplx(0.0, -2.0 * th));
                const DenseMatrix want_p = 0.5 * (e * (ap - aq) + (ap + aq));
                const DenseMatrix want_q = 0.5 * (e * (aq - ap) + (ap + aq));
                r.rotation_error = std::max(r.rotation_error, maxabs(u * ap * u.adjoint() - want_p));
                r.rotation_error = std::max(r.rotation_error, maxabs(u * aq * u.adjoint() - want_q));
                if (q == p + 1) {
                    Circuit c(n);
                    c.add(Gate::fswap_pow(p, q, th));
                    r.gate_error = std::max(r.gate_error, maxabs(circuit_matrix(c) - u));
                }
            }
            if (q == p + 1) {
                Circuit c(n);
                c.add(Gate::fswap(p, q));
                r.gate_error = std::max(r.gate_error, maxabs(circuit_matrix(c) - f));
            }
        }
    }
    return r;
}

}  // namespace pwd
