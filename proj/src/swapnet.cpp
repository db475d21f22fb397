#include "pwdual/swapnet.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pwdual/ffft.hpp"
#include "pwdual/geometry.hpp"

namespace pwd {

namespace {

using PairSet = std::set<std::pair<int, int>>;

std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

bool lattice_adjacent(int a, int b, int cols) {
    const int dr = std::abs(a / cols - b / cols);
    const int dc = std::abs(a % cols - b % cols);
    return dr + dc == 1;
}

// Odd-even transposition sort of one line of cells by a 0/1 key carried by
// the tokens. Returns the swap layers (global cell pairs); ties never swap,
// so the sort is stable. Tries both starting parities and keeps the shorter.
std::vector<std::vector<std::pair<int, int>>> sort_line(const std::vector<int>& cells, std::vector<int> keys) {
    std::vector<std::vector<std::pair<int, int>>> best;
    bool have = false;
    for (std::size_t start = 0; start < 2; ++start) {
        std::vector<int> k = keys;
        std::vector<std::vector<std::pair<int, int>>> layers;
        std::size_t parity = start;
        while (!std::is_sorted(k.begin(), k.end())) {
            std::vector<std::pair<int, int>> layer;
            for (std::size_t i = parity; i + 1 < k.size(); i += 2) {
                if (k[i] > k[i + 1]) {
                    std::swap(k[i], k[i + 1]);
                    layer.emplace_back(cells[i], cells[i + 1]);
                }
            }
            layers.push_back(std::move(layer));
            parity ^= 1;
        }
        // Drop a leading empty round so a wasted parity does not cost a layer.
        while (!layers.empty() && layers.front().empty()) layers.erase(layers.begin());
        if (!have || layers.size() < best.size()) {
            best = std::move(layers);
            have = true;
        }
    }
    return best;
}

class ScheduleBuilder {
public:
    ScheduleBuilder(int rows, int cols) : rows_(rows), cols_(cols), token_(static_cast<std::size_t>(rows * cols)) {
        for (int c = 0; c < rows * cols; ++c) token_[static_cast<std::size_t>(c)] = c;
    }

    std::size_t build(int r0, int c0, int R, int C, int level, std::size_t start) {
        const int n = R * C;
        if (n == 1) return start;
        if (n == 2) {
            const int a = global(r0, c0, C, 0), b = global(r0, c0, C, 1);
            std::size_t end = start;
            if (met_.insert(ordered(token_at(a), token_at(b))).second) {
                emit(start, {a, b, PairTag::InteractSwap});
                end = start + 1;
            }
            record("pair", level, r0, c0, R, C, start, end);
            return end;
        }

        const std::vector<int> cycle = hamiltonian_cycle(R, C);
        std::vector<int> color(static_cast<std::size_t>(rows_ * cols_), 0);
        for (int pos = 0; pos < n; ++pos) {
            const int cell = global(r0, c0, C, cycle[static_cast<std::size_t>(pos)]);
            color[static_cast<std::size_t>(token_at(cell))] = pos % 2;
        }

        // Step 2: every opposite-colour pair becomes adjacent at least once.
        const auto rounds = stagger_rounds(n);
        for (std::size_t i = 0; i < rounds.size(); ++i) {
            for (const auto& [pa, pb] : rounds[i]) {
                const int a = global(r0, c0, C, cycle[static_cast<std::size_t>(pa)]);
                const int b = global(r0, c0, C, cycle[static_cast<std::size_t>(pb)]);
                const bool fresh = met_.insert(ordered(token_at(a), token_at(b))).second;
                emit(start + i, {a, b, fresh ? PairTag::InteractSwap : PairTag::Swap});
            }
        }
        std::size_t cursor = start + rounds.size();
        record("stagger", level, r0, c0, R, C, start, cursor);

        // Step 3: move one colour into each half of the longer dimension.
        const bool split_cols = C >= R;
        const int lines = split_cols ? R : C;
        const int len = split_cols ? C : R;
        std::vector<std::vector<std::vector<std::pair<int, int>>>> plan;
        for (int first_color = 0; first_color < 2; ++first_color) {
            std::vector<std::vector<std::pair<int, int>>> merged;
            for (int l = 0; l < lines; ++l) {
                std::vector<int> cells, keys;
                for (int i = 0; i < len; ++i) {
                    const int lr = split_cols ? l : i, lc = split_cols ? i : l;
                    const int cell = (r0 + lr) * cols_ + (c0 + lc);
                    cells.push_back(cell);
                    keys.push_back(color[static_cast<std::size_t>(token_at(cell))] == first_color ? 0 : 1);
                }
                const auto layers = sort_line(cells, keys);
                if (merged.size() < layers.size()) merged.resize(layers.size());
                for (std::size_t j = 0; j < layers.size(); ++j)
                    merged[j].insert(merged[j].end(), layers[j].begin(), layers[j].end());
            }
            plan.push_back(std::move(merged));
        }
        const auto& chosen = plan[1].size() < plan[0].size() ? plan[1] : plan[0];
        for (std::size_t j = 0; j < chosen.size(); ++j)
            for (const auto& [a, b] : chosen[j]) emit(cursor + j, {a, b, PairTag::Swap});
        record("divide", level, r0, c0, R, C, cursor, cursor + chosen.size());
        cursor += chosen.size();
        if (level == 0) first_level_ = cursor - start;

        // Step 4: the halves now hold same-colour tokens; recurse in parallel.
        std::size_t end = cursor;
        if (split_cols) {
            end = std::max(end, build(r0, c0, R, C / 2, level + 1, cursor));
            end = std::max(end, build(r0, c0 + C / 2, R, C / 2, level + 1, cursor));
        } else {
            end = std::max(end, build(r0, c0, R / 2, C, level + 1, cursor));
            end = std::max(end, build(r0 + R / 2, c0, R / 2, C, level + 1, cursor));
        }
        return end;
    }

    SwapSchedule finish() {
        SwapSchedule s;
        s.rows = rows_;
        s.cols = cols_;
        s.layers = std::move(layers_);
        s.provenance = std::move(provenance_);
        s.first_level_layers = first_level_;
        s.final_token = token_;
        return s;
    }

private:
    int global(int r0, int c0, int C, int local) const { return (r0 + local / C) * cols_ + (c0 + local % C); }
    int token_at(int cell) const { return token_[static_cast<std::size_t>(cell)]; }

    void emit(std::size_t layer, SwapPair p) {
        if (layers_.size() <= layer) layers_.resize(layer + 1);
        layers_[layer].push_back(p);
        std::swap(token_[static_cast<std::size_t>(p.a)], token_[static_cast<std::size_t>(p.b)]);
    }

    void record(const char* kind, int level, int r0, int c0, int R, int C, std::size_t b, std::size_t e) {
        provenance_.push_back({kind, level, r0, c0, R, C, b, e});
    }

    int rows_, cols_;
    std::vector<int> token_;
    PairSet met_;
    std::vector<SwapLayer> layers_;
    std::vector<ScheduleStage> provenance_;
    std::size_t first_level_ = 0;
};

}  // namespace

std::vector<int> hamiltonian_cycle(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("lattice dimensions must be positive");
    if ((rows * cols) % 2 != 0)
        throw std::invalid_argument("a closed Hamiltonian cycle needs an even number of lattice cells");
    if (rows * cols == 2) return {0, 1};
    if (rows == 1 || cols == 1)
        throw std::invalid_argument("a 1 x n lattice with n > 2 has no Hamiltonian cycle");
    if (rows % 2 != 0) {
        // Build on the transpose and map back.
        std::vector<int> t = hamiltonian_cycle(cols, rows);
        for (int& cell : t) {
            const int r = cell / rows, c = cell % rows;  // (r, c) in the cols x rows lattice
            cell = c * cols + r;
        }
        return t;
    }
    std::vector<int> cycle;
    for (int c = 0; c < cols; ++c) cycle.push_back(c);
    for (int r = 1; r < rows; ++r) {
        if (r % 2 == 1)
            for (int c = cols - 1; c >= 1; --c) cycle.push_back(r * cols + c);
        else
            for (int c = 1; c < cols; ++c) cycle.push_back(r * cols + c);
    }
    for (int r = rows - 1; r >= 1; --r) cycle.push_back(r * cols);
    return cycle;
}

std::vector<std::vector<std::pair<int, int>>> stagger_rounds(int M) {
    if (M < 2 || M % 2 != 0) throw std::invalid_argument("stagger rounds need an even cycle length");
    std::vector<std::pair<int, int>> left, right;
    for (int i = 0; i + 1 < M; i += 2) left.emplace_back(i, i + 1);
    for (int i = 1; i < M; i += 2) right.emplace_back(i, (i + 1) % M);
    std::vector<std::vector<std::pair<int, int>>> layers;
    for (int round = 0; round < M / 2; ++round) {
        layers.push_back(left);
        layers.push_back(right);
    }
    return layers;
}

SwapSchedule build_full_schedule(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("lattice dimensions must be positive");
    const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (!is_power_of_two(n))
        throw std::invalid_argument("the recursive swap network needs a power-of-two qubit count (" +
                                    std::to_string(rows) + "x" + std::to_string(cols) +
                                    " given); pad the lattice to the next power of two");
    if (!is_power_of_two(static_cast<std::size_t>(rows)) || !is_power_of_two(static_cast<std::size_t>(cols)))
        throw std::invalid_argument("lattice sides must be powers of two");
    if (n > 2 && (rows == 1 || cols == 1))
        throw std::invalid_argument("the swap network needs a two-dimensional lattice for more than two qubits");
    ScheduleBuilder b(rows, cols);
    b.build(0, 0, rows, cols, 0, 0);
    return b.finish();
}

std::string SwapSchedule::to_text() const {
    std::ostringstream os;
    for (const auto& layer : layers) {
        bool first = true;
        for (const auto& p : layer) {
            if (!first) os << ' ';
            first = false;
            os << '(' << p.a << ',' << p.b << ')';
            if (p.tag == PairTag::InteractSwap) os << ":phase";
        }
        os << '\n';
    }
    return os.str();
}

ScheduleReport verify_schedule(const SwapSchedule& s) {
    ScheduleReport r;
    const int n = s.n_cells();
    std::vector<int> token(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) token[static_cast<std::size_t>(c)] = c;
    PairSet met;
    for (const auto& layer : s.layers) {
        std::vector<char> used(static_cast<std::size_t>(n), 0);
        for (const auto& p : layer) {
            if (p.a < 0 || p.b < 0 || p.a >= n || p.b >= n) {
                r.adjacent = false;
                continue;
            }
            if (used[static_cast<std::size_t>(p.a)] || used[static_cast<std::size_t>(p.b)]) r.disjoint = false;
            used[static_cast<std::size_t>(p.a)] = used[static_cast<std::size_t>(p.b)] = 1;
            if (!lattice_adjacent(p.a, p.b, s.cols)) r.adjacent = false;
            if (p.tag == PairTag::InteractSwap) {
                if (!met.insert(ordered(token[static_cast<std::size_t>(p.a)], token[static_cast<std::size_t>(p.b)]))
                         .second)
                    ++r.duplicate_interactions;
            }
            std::swap(token[static_cast<std::size_t>(p.a)], token[static_cast<std::size_t>(p.b)]);
        }
    }
    r.pairs_covered = met.size();
    r.pairs_total = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    r.layers = s.layers.size();
    r.first_level_layers = s.first_level_layers;
    r.depth_over_n = n > 0 ? static_cast<double>(r.layers) / n : 0.0;
    return r;
}

std::string ScheduleReport::to_json() const {
    nlohmann::ordered_json j;
    j["pairs_covered"] = pairs_covered;
    j["pairs_total"] = pairs_total;
    j["duplicate_interactions"] = duplicate_interactions;
    j["disjoint"] = disjoint;
    j["adjacent"] = adjacent;
    j["layers"] = layers;
    j["first_level_layers"] = first_level_layers;
    j["depth_over_n"] = depth_over_n;
    j["ok"] = ok();
    return j.dump(2);
}

LoweredLayer lower_diagonal_layer(const PairPhases& phases, const SwapSchedule& schedule, bool restore) {
    const int n = schedule.n_cells();
    const Connectivity conn = n > 1 ? Connectivity::planar(schedule.rows, schedule.cols) : Connectivity::all_to_all();
    LoweredLayer out{Circuit(n, conn), {}};
    for (const auto& [key, phi] : phases) {
        if (key.first >= key.second || key.first < 0 || key.second >= n)
            throw std::invalid_argument("pair phases must be keyed (x, y) with 0 <= x < y < n");
        (void)phi;
    }
    std::vector<int> occ(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) occ[static_cast<std::size_t>(q)] = q;
    PairSet applied;
    for (const auto& layer : schedule.layers) {
        for (const auto& p : layer) {
            const int qa = conn.kind == Connectivity::Kind::Planar ? conn.qubit_at(p.a / schedule.cols, p.a % schedule.cols) : p.a;
            const int qb = conn.kind == Connectivity::Kind::Planar ? conn.qubit_at(p.b / schedule.cols, p.b % schedule.cols) : p.b;
            if (p.tag == PairTag::InteractSwap) {
                const auto key = ordered(occ[static_cast<std::size_t>(qa)], occ[static_cast<std::size_t>(qb)]);
                const auto it = phases.find(key);
                if (it != phases.end() && it->second != 0.0 && applied.insert(key).second)
                    out.circuit.add(Gate::pauli_exp(PauliString({{std::min(qa, qb), Pauli::Z}, {std::max(qa, qb), Pauli::Z}}),
                                                    it->second));
            }
            out.circuit.add(Gate::swap(qa, qb));
            std::swap(occ[static_cast<std::size_t>(qa)], occ[static_cast<std::size_t>(qb)]);
        }
    }
    for (const auto& [key, phi] : phases)
        if (phi != 0.0 && !applied.count(key))
            throw std::invalid_argument("schedule never brings qubits " + std::to_string(key.first) + " and " +
                                        std::to_string(key.second) + " together");
    if (restore) {
        std::vector<int> target(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) target[static_cast<std::size_t>(q)] = q;
        append_sorting_network(out.circuit, occ, target, 0, GateKind::SWAP);
    }
    out.final_qubit = occ;
    return out;
}

}  // namespace pwd
