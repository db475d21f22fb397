#include "pwdual/fermion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace pwd {

// ---------------------------------------------------------------- fermions

FermionOperator FermionOperator::identity(cplx c) {
    FermionOperator op;
    op.add({}, c);
    return op;
}

FermionOperator FermionOperator::term(LadderKey key, cplx c) {
    FermionOperator op;
    op.add(key, c);
    return op;
}

void FermionOperator::add(const LadderKey& key, cplx c) {
    if (c == cplx(0.0)) return;
    terms_[key] += c;
}

FermionOperator& FermionOperator::operator+=(const FermionOperator& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

FermionOperator& FermionOperator::operator-=(const FermionOperator& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
}

FermionOperator& FermionOperator::operator*=(cplx s) {
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

FermionOperator operator*(const FermionOperator& a, const FermionOperator& b) {
    FermionOperator out;
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            LadderKey k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            out.add(k, ca * cb);
        }
    }
    return out;
}

FermionOperator FermionOperator::adjoint() const {
    FermionOperator out;
    for (const auto& [k, c] : terms_) {
        LadderKey r(k.rbegin(), k.rend());
        for (auto& f : r) f.raise = !f.raise;
        out.add(r, std::conj(c));
    }
    return out;
}

void FermionOperator::simplify(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
}

double FermionOperator::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

int FermionOperator::max_index() const {
    int m = -1;
    for (const auto& [k, c] : terms_)
        for (const auto& f : k) m = std::max(m, f.index);
    return m;
}

namespace {

// Bubble the term into canonical order. Swapping a lowering factor past a
// raising factor on the same orbital spawns the contraction term.
void normal_order_term(LadderKey term, cplx coeff, FermionOperator& out) {
    for (std::size_t i = 1; i < term.size(); ++i) {
        for (std::size_t j = i; j > 0; --j) {
            Ladder left = term[j - 1];
            Ladder right = term[j];
            if (right.raise && !left.raise) {
                term[j - 1] = right;
                term[j] = left;
                coeff = -coeff;
                if (right.index == left.index) {
                    LadderKey contracted(term.begin(), term.begin() + static_cast<long>(j) - 1);
                    contracted.insert(contracted.end(), term.begin() + static_cast<long>(j) + 1, term.end());
                    normal_order_term(std::move(contracted), -coeff, out);
                }
            } else if (right.raise == left.raise) {
                if (right.index == left.index) return;  // a_p a_p = 0
                if (right.index > left.index) {
                    term[j - 1] = right;
                    term[j] = left;
                    coeff = -coeff;
                }
            }
        }
    }
    out.add(term, coeff);
}

}  // namespace

FermionOperator normal_order(const FermionOperator& op) {
    FermionOperator out;
    for (const auto& [k, c] : op.terms()) normal_order_term(k, c, out);
    out.simplify();
    return out;
}

bool is_hermitian(const FermionOperator& op, double tol) {
    FermionOperator diff = normal_order(op - op.adjoint());
    return diff.max_abs_coefficient() < tol;
}

// ------------------------------------------------------------------ paulis

PauliString::PauliString(std::vector<std::pair<int, Pauli>> factors) : ops(std::move(factors)) {
    std::sort(ops.begin(), ops.end());
    for (std::size_t i = 1; i < ops.size(); ++i) {
        if (ops[i].first == ops[i - 1].first) throw std::invalid_argument("repeated qubit in Pauli string");
    }
    for (const auto& [q, p] : ops)
        if (q < 0) throw std::invalid_argument("negative qubit index in Pauli string");
}

PauliString PauliString::parse_compact(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    std::vector<std::pair<int, Pauli>> f;
    while (in >> tok) {
        if (tok.size() < 2 || (tok[0] != 'X' && tok[0] != 'Y' && tok[0] != 'Z'))
            throw std::invalid_argument("bad Pauli factor '" + tok + "'");
        f.emplace_back(std::stoi(tok.substr(1)), static_cast<Pauli>(tok[0]));
    }
    return PauliString(std::move(f));
}

std::uint64_t PauliString::x_mask() const {
    std::uint64_t m = 0;
    for (const auto& [q, p] : ops)
        if (p != Pauli::Z) m |= std::uint64_t{1} << q;
    return m;
}

std::uint64_t PauliString::z_mask() const {
    std::uint64_t m = 0;
    for (const auto& [q, p] : ops)
        if (p != Pauli::X) m |= std::uint64_t{1} << q;
    return m;
}

int PauliString::y_count() const {
    return static_cast<int>(std::count_if(ops.begin(), ops.end(), [](const auto& f) { return f.second == Pauli::Y; }));
}

int PauliString::max_qubit() const { return ops.empty() ? -1 : ops.back().first; }

std::string PauliString::to_string() const {
    std::string s;
    for (const auto& [q, p] : ops) {
        if (!s.empty()) s += ' ';
        s += static_cast<char>(p);
        s += std::to_string(q);
    }
    return s;
}

std::string PauliString::pattern() const {
    std::string s;
    for (const auto& f : ops) s += static_cast<char>(f.second);
    return s;
}

namespace {

// Single-qubit product a*b = phase * c, with identity encoded as 0.
std::pair<cplx, char> mul1(char a, char b) {
    if (a == 0) return {1.0, b};
    if (b == 0) return {1.0, a};
    if (a == b) return {1.0, 0};
    const cplx i(0.0, 1.0);
    if (a == 'X' && b == 'Y') return {i, 'Z'};
    if (a == 'Y' && b == 'Z') return {i, 'X'};
    if (a == 'Z' && b == 'X') return {i, 'Y'};
    if (a == 'Y' && b == 'X') return {-i, 'Z'};
    if (a == 'Z' && b == 'Y') return {-i, 'X'};
    return {-i, 'Y'};  // X*Z
}

}  // namespace

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
    cplx phase = 1.0;
    PauliString out;
    std::size_t i = 0, j = 0;
    while (i < a.ops.size() || j < b.ops.size()) {
        if (j >= b.ops.size() || (i < a.ops.size() && a.ops[i].first < b.ops[j].first)) {
            out.ops.push_back(a.ops[i++]);
        } else if (i >= a.ops.size() || b.ops[j].first < a.ops[i].first) {
            out.ops.push_back(b.ops[j++]);
        } else {
            auto [ph, c] = mul1(static_cast<char>(a.ops[i].second), static_cast<char>(b.ops[j].second));
            phase *= ph;
            if (c != 0) out.ops.emplace_back(a.ops[i].first, static_cast<Pauli>(c));
            ++i;
            ++j;
        }
    }
    return {phase, out};
}

QubitOperator QubitOperator::identity(cplx c) {
    QubitOperator op;
    op.add(PauliString{}, c);
    return op;
}

QubitOperator QubitOperator::term(PauliString s, cplx c) {
    QubitOperator op;
    op.add(s, c);
    return op;
}

void QubitOperator::add(const PauliString& s, cplx c) {
    if (c == cplx(0.0)) return;
    terms_[s] += c;
}

cplx QubitOperator::coefficient(const PauliString& s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? cplx(0.0) : it->second;
}

QubitOperator& QubitOperator::operator+=(const QubitOperator& o) {
    for (const auto& [k, c] : o.terms_) add(k, c);
    return *this;
}

QubitOperator& QubitOperator::operator-=(const QubitOperator& o) {
    for (const auto& [k, c] : o.terms_) add(k, -c);
    return *this;
}

QubitOperator& QubitOperator::operator*=(cplx s) {
    for (auto& [k, c] : terms_) c *= s;
    return *this;
}

QubitOperator operator*(const QubitOperator& a, const QubitOperator& b) {
    QubitOperator out;
    for (const auto& [sa, ca] : a.terms()) {
        for (const auto& [sb, cb] : b.terms()) {
            auto [ph, s] = multiply(sa, sb);
            out.add(s, ph * ca * cb);
        }
    }
    return out;
}

void QubitOperator::simplify(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) < tol; });
}

bool QubitOperator::is_hermitian(double tol) const {
    return std::all_of(terms_.begin(), terms_.end(), [tol](const auto& kv) { return std::abs(kv.second.imag()) < tol; });
}

double QubitOperator::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

int QubitOperator::max_qubit() const {
    int m = -1;
    for (const auto& [k, c] : terms_) m = std::max(m, k.max_qubit());
    return m;
}

// ----------------------------------------------------------- Jordan-Wigner

namespace {

QubitOperator jw_factor(const Ladder& f) {
    std::vector<std::pair<int, Pauli>> zs;
    for (int i = 0; i < f.index; ++i) zs.emplace_back(i, Pauli::Z);
    auto xs = zs;
    auto ys = zs;
    xs.emplace_back(f.index, Pauli::X);
    ys.emplace_back(f.index, Pauli::Y);
    QubitOperator op;
    op.add(PauliString(xs), 0.5);
    op.add(PauliString(ys), f.raise ? cplx(0.0, -0.5) : cplx(0.0, 0.5));
    return op;
}

}  // namespace

QubitOperator jordan_wigner(const FermionOperator& op, int n_qubits) {
    if (op.max_index() >= n_qubits) throw std::out_of_range("orbital index exceeds qubit count");
    QubitOperator out;
    for (const auto& [key, c] : op.terms()) {
        QubitOperator prod = QubitOperator::identity(c);
        for (const auto& f : key) prod = prod * jw_factor(f);
        out += prod;
    }
    out.simplify();
    return out;
}

// ---------------------------------------------------------------- matrices

SparseMatrix to_sparse(const QubitOperator& op, int n_qubits) {
    if (op.max_qubit() >= n_qubits) throw std::out_of_range("Pauli string exceeds qubit count");
    if (n_qubits > 24) throw std::length_error("sparse operator matrix cap exceeded");
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(op.size() * dim);
    const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    for (const auto& [s, c] : op.terms()) {
        const std::uint64_t xm = s.x_mask(), zm = s.z_mask();
        const cplx base = c * ipow[s.y_count() % 4];
        for (std::uint64_t b = 0; b < dim; ++b) {
            double sign = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
            trip.emplace_back(static_cast<int>(b ^ xm), static_cast<int>(b), base * sign);
        }
    }
    SparseMatrix m(static_cast<long>(dim), static_cast<long>(dim));
    m.setFromTriplets(trip.begin(), trip.end());
    m.prune(cplx(0.0), 0.0);
    return m;
}

SparseMatrix to_sparse(const FermionOperator& op, int n_qubits) {
    if (op.max_index() >= n_qubits) throw std::out_of_range("orbital index exceeds qubit count");
    if (n_qubits > 24) throw std::length_error("sparse operator matrix cap exceeded");
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    std::vector<Eigen::Triplet<cplx>> trip;
    for (const auto& [key, c] : op.terms()) {
        for (std::uint64_t b = 0; b < dim; ++b) {
            std::uint64_t state = b;
            double sign = 1.0;
            bool alive = true;
            for (auto it = key.rbegin(); it != key.rend() && alive; ++it) {
                const std::uint64_t bit = std::uint64_t{1} << it->index;
                const bool occ = (state & bit) != 0;
                if (occ == it->raise) {
                    alive = false;
                    break;
                }
                if (std::popcount(state & (bit - 1)) & 1) sign = -sign;
                state ^= bit;
            }
            if (alive) trip.emplace_back(static_cast<int>(state), static_cast<int>(b), c * sign);
        }
    }
    SparseMatrix m(static_cast<long>(dim), static_cast<long>(dim));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

DenseMatrix to_matrix(const QubitOperator& op, int n_qubits, int cap) {
    if (n_qubits > cap) throw std::length_error("dense matrix cap exceeded (" + std::to_string(n_qubits) + " qubits)");
    return DenseMatrix(to_sparse(op, n_qubits));
}

DenseMatrix to_matrix(const FermionOperator& op, int n_qubits, int cap) {
    if (n_qubits > cap) throw std::length_error("dense matrix cap exceeded (" + std::to_string(n_qubits) + " qubits)");
    return DenseMatrix(to_sparse(op, n_qubits));
}

// ------------------------------------------------------ LCU decomposition

SelfInverseDecomposition self_inverse_decompose(const QubitOperator& op) {
    if (!op.is_hermitian()) throw std::invalid_argument("self-inverse decomposition needs a Hermitian operator");
    SelfInverseDecomposition out;
    for (const auto& [s, c] : op.terms()) {
        double w = c.real();
        if (std::abs(w) < kPruneTol) continue;
        out.terms.push_back({std::abs(w), w < 0 ? -1 : 1, s});
        out.lambda += std::abs(w);
    }
    return out;
}

// ----------------------------------------------------------- serialization

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string to_text(const FermionOperator& op) {
    std::string out;
    for (const auto& [key, c] : op.terms()) {
        out += format_double(c.real()) + ' ' + format_double(c.imag());
        for (const auto& f : key) out += ' ' + std::to_string(f.index) + (f.raise ? "^" : "");
        out += '\n';
    }
    return out;
}

std::string to_text(const QubitOperator& op) {
    std::string out;
    for (const auto& [s, c] : op.terms()) {
        out += format_double(c.real()) + ' ' + format_double(c.imag());
        if (!s.is_identity()) out += ' ' + s.to_string();
        out += '\n';
    }
    return out;
}

namespace {

template <typename Fn>
void for_each_term_line(const std::string& text, Fn&& fn) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::string re_s, im_s;
        if (!(ls >> re_s >> im_s)) throw std::invalid_argument("line " + std::to_string(lineno) + ": missing coefficient");
        cplx c(std::stod(re_s), std::stod(im_s));
        std::vector<std::string> factors;
        std::string tok;
        while (ls >> tok) factors.push_back(tok);
        fn(c, factors, lineno);
    }
}

}  // namespace

FermionOperator parse_fermion_operator(const std::string& text) {
    FermionOperator op;
    for_each_term_line(text, [&](cplx c, const std::vector<std::string>& factors, int lineno) {
        LadderKey key;
        for (const auto& f : factors) {
            bool raise = !f.empty() && f.back() == '^';
            std::string digits = raise ? f.substr(0, f.size() - 1) : f;
            if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
                throw std::invalid_argument("line " + std::to_string(lineno) + ": bad ladder factor '" + f + "'");
            key.push_back({std::stoi(digits), raise});
        }
        op.add(key, c);
    });
    return op;
}

QubitOperator parse_qubit_operator(const std::string& text) {
    QubitOperator op;
    for_each_term_line(text, [&](cplx c, const std::vector<std::string>& factors, int) {
        std::string joined;
        for (const auto& f : factors) joined += f + ' ';
        op.add(PauliString::parse_compact(joined), c);
    });
    return op;
}

}  // namespace pwd
