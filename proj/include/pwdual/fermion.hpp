#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pwd {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr double kPruneTol = 1e-12;

// One ladder factor: a^dagger_index when raise is set, a_index otherwise.
struct Ladder {
    int index = 0;
    bool raise = false;
    auto operator<=>(const Ladder&) const = default;
};

using LadderKey = std::vector<Ladder>;

class FermionOperator {
public:
    using TermMap = std::map<LadderKey, cplx>;

    FermionOperator() = default;

    static FermionOperator identity(cplx c = 1.0);
    static FermionOperator term(LadderKey key, cplx c = 1.0);
    static FermionOperator raise(int p) { return term({{p, true}}); }
    static FermionOperator lower(int p) { return term({{p, false}}); }
    // n_p = a^dagger_p a_p
    static FermionOperator number(int p) { return term({{p, true}, {p, false}}); }

    void add(const LadderKey& key, cplx c);
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    FermionOperator& operator+=(const FermionOperator& o);
    FermionOperator& operator-=(const FermionOperator& o);
    FermionOperator& operator*=(cplx s);
    friend FermionOperator operator+(FermionOperator a, const FermionOperator& b) { return a += b; }
    friend FermionOperator operator-(FermionOperator a, const FermionOperator& b) { return a -= b; }
    friend FermionOperator operator*(FermionOperator a, cplx s) { return a *= s; }
    friend FermionOperator operator*(cplx s, FermionOperator a) { return a *= s; }
    // Concatenation product; call normal_order to canonicalise.
    friend FermionOperator operator*(const FermionOperator& a, const FermionOperator& b);

    FermionOperator adjoint() const;
    void simplify(double tol = kPruneTol);
    double max_abs_coefficient() const;
    int max_index() const;

private:
    TermMap terms_;
};

// Canonical form: raising factors before lowering ones, indices strictly
// descending inside each block, anticommutation signs tracked.
FermionOperator normal_order(const FermionOperator& op);
bool is_hermitian(const FermionOperator& op, double tol = kPruneTol);

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

// Tensor product of single-qubit Paulis, identity factors omitted and
// factors sorted by qubit index.
struct PauliString {
    std::vector<std::pair<int, Pauli>> ops;

    PauliString() = default;
    explicit PauliString(std::vector<std::pair<int, Pauli>> factors);
    static PauliString parse_compact(const std::string& text);  // e.g. "X0 Z1 X2"

    bool is_identity() const { return ops.empty(); }
    std::size_t weight() const { return ops.size(); }
    // Bit masks: x has X or Y, z has Z or Y.
    std::uint64_t x_mask() const;
    std::uint64_t z_mask() const;
    int y_count() const;
    int max_qubit() const;
    std::string to_string() const;
    // Letters only, e.g. "XZX" for a hopping string.
    std::string pattern() const;

    auto operator<=>(const PauliString&) const = default;
};

// Product a*b = phase * result.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

class QubitOperator {
public:
    using TermMap = std::map<PauliString, cplx>;

    QubitOperator() = default;
    static QubitOperator identity(cplx c = 1.0);
    static QubitOperator term(PauliString s, cplx c = 1.0);

    void add(const PauliString& s, cplx c);
    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    cplx coefficient(const PauliString& s) const;

    QubitOperator& operator+=(const QubitOperator& o);
    QubitOperator& operator-=(const QubitOperator& o);
    QubitOperator& operator*=(cplx s);
    friend QubitOperator operator+(QubitOperator a, const QubitOperator& b) { return a += b; }
    friend QubitOperator operator-(QubitOperator a, const QubitOperator& b) { return a -= b; }
    friend QubitOperator operator*(QubitOperator a, cplx s) { return a *= s; }
    friend QubitOperator operator*(cplx s, QubitOperator a) { return a *= s; }
    friend QubitOperator operator*(const QubitOperator& a, const QubitOperator& b);

    void simplify(double tol = kPruneTol);
    bool is_hermitian(double tol = kPruneTol) const;
    double max_abs_coefficient() const;
    int max_qubit() const;

private:
    TermMap terms_;
};

QubitOperator jordan_wigner(const FermionOperator& op, int n_qubits);

// Matrix builders. Dense builders refuse n above the cap.
inline constexpr int kDenseQubitCap = 14;
SparseMatrix to_sparse(const QubitOperator& op, int n_qubits);
SparseMatrix to_sparse(const FermionOperator& op, int n_qubits);
DenseMatrix to_matrix(const QubitOperator& op, int n_qubits, int cap = kDenseQubitCap);
DenseMatrix to_matrix(const FermionOperator& op, int n_qubits, int cap = kDenseQubitCap);

struct SelfInverseTerm {
    double weight = 0.0;
    int sign = 1;
    PauliString string;
};

struct SelfInverseDecomposition {
    std::vector<SelfInverseTerm> terms;
    double lambda = 0.0;
};

SelfInverseDecomposition self_inverse_decompose(const QubitOperator& op);

// Text format: one term per line, "<re> <im> <factor>...".
std::string to_text(const FermionOperator& op);
std::string to_text(const QubitOperator& op);
FermionOperator parse_fermion_operator(const std::string& text);
QubitOperator parse_qubit_operator(const std::string& text);

std::string format_double(double x);

}  // namespace pwd
