#include "pwdual/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pwd {

namespace {

bool has_angle(GateKind k) {
    switch (k) {
        case GateKind::RZ:
        case GateKind::PauliExp:
        case GateKind::FSWAP_POW:
        case GateKind::PHASE_N:
        case GateKind::FK:
        case GateKind::FK_DAG:
            return true;
        default:
            return false;
    }
}

std::size_t expected_arity(GateKind k) {
    switch (k) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::RZ:
        case GateKind::PHASE_N:
            return 1;
        case GateKind::PauliExp:
            return 0;
        default:
            return 2;
    }
}

Eigen::Matrix2cd fk_single_particle(double phi) {
    const cplx w = std::polar(1.0, -phi);
    const double s = 1.0 / std::numbers::sqrt2;
    Eigen::Matrix2cd g;
    g << s, s, s * w, -s * w;
    return g;
}

// Embed a two-mode single-particle matrix g into the 4x4 gate acting on
// (vacuum, p, q, pq): 1 + g^dagger + conj(det g).
DenseMatrix embed_two_mode(const Eigen::Matrix2cd& g) {
    DenseMatrix m = DenseMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m.block(1, 1, 2, 2) = g.adjoint();
    m(3, 3) = std::conj(g.determinant());
    return m;
}

}  // namespace

Gate Gate::fk(int p, int q, int k, int M) {
    return {GateKind::FK, {p, q}, 2.0 * std::numbers::pi * k / M};
}

Gate Gate::fk_dag(int p, int q, int k, int M) {
    return {GateKind::FK_DAG, {p, q}, 2.0 * std::numbers::pi * k / M};
}

Gate Gate::pauli_exp(const PauliString& s, double theta) {
    Gate g{GateKind::PauliExp, {}, theta};
    for (const auto& [q, p] : s.ops) {
        g.targets.push_back(q);
        g.paulis += static_cast<char>(p);
    }
    return g;
}

PauliString Gate::pauli_string() const {
    std::vector<std::pair<int, Pauli>> f;
    for (std::size_t i = 0; i < targets.size(); ++i) f.emplace_back(targets[i], static_cast<Pauli>(paulis[i]));
    return PauliString(std::move(f));
}

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
        case GateKind::RZ:
        case GateKind::PauliExp:
        case GateKind::FSWAP_POW:
        case GateKind::PHASE_N:
            g.angle = -angle;
            break;
        case GateKind::FK:
            g.kind = GateKind::FK_DAG;
            break;
        case GateKind::FK_DAG:
            g.kind = GateKind::FK;
            break;
        default:
            break;
    }
    return g;
}

std::string gate_name(const Gate& g) {
    switch (g.kind) {
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::RZ: return "RZ";
        case GateKind::PauliExp: return "PEXP:" + g.paulis;
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
        case GateKind::SWAP: return "SWAP";
        case GateKind::FSWAP: return "FSWAP";
        case GateKind::FSWAP_POW: return "FSWAP_POW";
        case GateKind::PHASE_N: return "PHASEN";
        case GateKind::FK: return "FK";
        case GateKind::FK_DAG: return "FKDAG";
    }
    return "?";
}

DenseMatrix gate_local_matrix(const Gate& g) {
    const cplx i(0.0, 1.0);
    switch (g.kind) {
        case GateKind::H: {
            DenseMatrix m(2, 2);
            const double s = 1.0 / std::numbers::sqrt2;
            m << s, s, s, -s;
            return m;
        }
        case GateKind::X: {
            DenseMatrix m(2, 2);
            m << 0, 1, 1, 0;
            return m;
        }
        case GateKind::RZ: {
            DenseMatrix m = DenseMatrix::Zero(2, 2);
            m(0, 0) = std::polar(1.0, -g.angle / 2);
            m(1, 1) = std::polar(1.0, g.angle / 2);
            return m;
        }
        case GateKind::PHASE_N: {
            DenseMatrix m = DenseMatrix::Identity(2, 2);
            m(1, 1) = std::polar(1.0, g.angle);
            return m;
        }
        case GateKind::PauliExp: {
            // exp(-i theta P) = cos(theta) I - i sin(theta) P
            PauliString local;
            for (std::size_t j = 0; j < g.paulis.size(); ++j)
                local.ops.emplace_back(static_cast<int>(j), static_cast<Pauli>(g.paulis[j]));
            DenseMatrix p = to_matrix(QubitOperator::term(local), static_cast<int>(g.paulis.size()));
            DenseMatrix id = DenseMatrix::Identity(p.rows(), p.cols());
            return std::cos(g.angle) * id - i * std::sin(g.angle) * p;
        }
        case GateKind::CNOT: {
            DenseMatrix m = DenseMatrix::Zero(4, 4);
            m(0, 0) = m(2, 2) = 1.0;
            m(3, 1) = m(1, 3) = 1.0;
            return m;
        }
        case GateKind::CZ: {
            DenseMatrix m = DenseMatrix::Identity(4, 4);
            m(3, 3) = -1.0;
            return m;
        }
        case GateKind::SWAP: {
            DenseMatrix m = DenseMatrix::Zero(4, 4);
            m(0, 0) = m(3, 3) = 1.0;
            m(1, 2) = m(2, 1) = 1.0;
            return m;
        }
        case GateKind::FSWAP: {
            DenseMatrix m = DenseMatrix::Zero(4, 4);
            m(0, 0) = 1.0;
            m(3, 3) = -1.0;
            m(1, 2) = m(2, 1) = 1.0;
            return m;
        }
        case GateKind::FSWAP_POW: {
            DenseMatrix f = gate_local_matrix(Gate::fswap(0, 1));
            return std::cos(g.angle) * DenseMatrix::Identity(4, 4) + i * std::sin(g.angle) * f;
        }
        case GateKind::FK:
            return embed_two_mode(fk_single_particle(g.angle));
        case GateKind::FK_DAG:
            return embed_two_mode(fk_single_particle(g.angle)).adjoint();
    }
    throw std::logic_error("unknown gate kind");
}

Eigen::Matrix2cd two_mode_single_particle(const Gate& g) {
    if (g.arity() != 2) throw std::invalid_argument("two-mode gate expected");
    DenseMatrix m = gate_local_matrix(g);
    return m.block(1, 1, 2, 2).adjoint();
}

Connectivity Connectivity::planar(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("planar lattice needs positive dimensions");
    return {Kind::Planar, rows, cols};
}

std::pair<int, int> Connectivity::cell_of(int qubit) const {
    int r = qubit / cols;
    int c = qubit % cols;
    if (r % 2 == 1) c = cols - 1 - c;
    return {r, c};
}

int Connectivity::qubit_at(int row, int col) const {
    int c = (row % 2 == 1) ? cols - 1 - col : col;
    return row * cols + c;
}

bool Connectivity::adjacent(int a, int b) const {
    if (kind == Kind::AllToAll) return true;
    auto [ra, ca] = cell_of(a);
    auto [rb, cb] = cell_of(b);
    return std::abs(ra - rb) + std::abs(ca - cb) == 1;
}

std::string Connectivity::to_string() const {
    if (kind == Kind::AllToAll) return "all_to_all";
    return "planar(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

Circuit::Circuit(int n_qubits, Connectivity conn) : n_qubits_(n_qubits), conn_(conn) {
    if (n_qubits < 0) throw std::invalid_argument("negative qubit count");
    if (conn_.kind == Connectivity::Kind::Planar && conn_.rows * conn_.cols != n_qubits)
        throw std::invalid_argument("planar lattice size does not match qubit count");
}

void Circuit::validate(const Gate& g) const {
    std::size_t want = expected_arity(g.kind);
    if (want != 0 && g.targets.size() != want) throw std::invalid_argument("gate " + gate_name(g) + " has wrong arity");
    if (g.kind == GateKind::PauliExp && (g.paulis.size() != g.targets.size() || g.targets.empty()))
        throw std::invalid_argument("PauliExp needs one Pauli letter per target");
    for (std::size_t a = 0; a < g.targets.size(); ++a) {
        if (g.targets[a] < 0 || g.targets[a] >= n_qubits_)
            throw std::out_of_range("gate " + gate_name(g) + " target " + std::to_string(g.targets[a]) + " out of range");
        for (std::size_t b = a + 1; b < g.targets.size(); ++b)
            if (g.targets[a] == g.targets[b]) throw std::invalid_argument("gate targets must be distinct");
    }
    if (conn_.kind == Connectivity::Kind::Planar && g.targets.size() > 1) {
        if (g.targets.size() > 2 || !conn_.adjacent(g.targets[0], g.targets[1]))
            throw std::invalid_argument("planar violation: gate " + gate_name(g) + " on non-adjacent qubits " +
                                        std::to_string(g.targets[0]) + "," + std::to_string(g.targets[1]));
    }
}

void Circuit::add(Gate g) {
    validate(g);
    gates_.push_back(std::move(g));
}

void Circuit::append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_) throw std::invalid_argument("circuit width mismatch");
    for (const auto& g : other.gates_) add(g);
}

Circuit Circuit::inverse() const {
    Circuit out(n_qubits_, conn_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) out.gates_.push_back(it->inverse());
    return out;
}

std::vector<std::vector<std::size_t>> Circuit::layers() const {
    std::vector<std::size_t> ready(static_cast<std::size_t>(n_qubits_), 0);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        std::size_t layer = 0;
        for (int q : gates_[i].targets) layer = std::max(layer, ready[static_cast<std::size_t>(q)]);
        if (layer >= out.size()) out.resize(layer + 1);
        out[layer].push_back(i);
        for (int q : gates_[i].targets) ready[static_cast<std::size_t>(q)] = layer + 1;
    }
    return out;
}

std::size_t Circuit::depth() const {
    std::vector<std::size_t> ready(static_cast<std::size_t>(n_qubits_), 0);
    std::size_t d = 0;
    for (const auto& g : gates_) {
        std::size_t layer = 0;
        for (int q : g.targets) layer = std::max(layer, ready[static_cast<std::size_t>(q)]);
        for (int q : g.targets) ready[static_cast<std::size_t>(q)] = layer + 1;
        d = std::max(d, layer + 1);
    }
    return d;
}

std::size_t Circuit::count(GateKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

std::size_t Circuit::multi_qubit_count() const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.arity() > 1; }));
}

void Circuit::check_connectivity() const {
    for (const auto& g : gates_) validate(g);
}

std::string Circuit::to_text() const {
    std::string out;
    for (const auto& g : gates_) {
        out += gate_name(g) + ' ';
        for (std::size_t j = 0; j < g.targets.size(); ++j) {
            if (j) out += ',';
            out += std::to_string(g.targets[j]);
        }
        if (has_angle(g.kind)) out += ' ' + format_double(g.angle);
        out += '\n';
    }
    return out;
}

Circuit Circuit::parse(const std::string& text, int n_qubits, Connectivity conn) {
    Circuit c(n_qubits, conn);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name, tgt, ang;
        if (!(ls >> name)) continue;
        if (name[0] == '#') continue;
        if (!(ls >> tgt)) throw std::invalid_argument("gate line without targets: " + line);
        Gate g;
        if (name.rfind("PEXP:", 0) == 0) {
            g.kind = GateKind::PauliExp;
            g.paulis = name.substr(5);
        } else {
            static const std::pair<const char*, GateKind> table[] = {
                {"H", GateKind::H},       {"X", GateKind::X},         {"RZ", GateKind::RZ},
                {"CNOT", GateKind::CNOT}, {"CZ", GateKind::CZ},       {"SWAP", GateKind::SWAP},
                {"FSWAP", GateKind::FSWAP}, {"FSWAP_POW", GateKind::FSWAP_POW}, {"PHASEN", GateKind::PHASE_N},
                {"FK", GateKind::FK},     {"FKDAG", GateKind::FK_DAG}};
            bool found = false;
            for (const auto& [n, k] : table) {
                if (name == n) {
                    g.kind = k;
                    found = true;
                }
            }
            if (!found) throw std::invalid_argument("unknown gate '" + name + "'");
        }
        std::istringstream ts(tgt);
        std::string q;
        while (std::getline(ts, q, ',')) g.targets.push_back(std::stoi(q));
        if (has_angle(g.kind)) {
            if (!(ls >> ang)) throw std::invalid_argument("gate " + name + " needs an angle");
            g.angle = std::stod(ang);
        }
        c.add(std::move(g));
    }
    return c;
}

}  // namespace pwd
