#include "pwdual/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pwd {

namespace {

constexpr double kPi = std::numbers::pi;

RVec to_rvec(const std::vector<double>& x) {
    RVec r{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < x.size() && a < 3; ++a) r[a] = x[a];
    return r;
}

void check_nuclei(const ModeGrid& grid, const std::vector<Nucleus>& nuclei) {
    for (const auto& nuc : nuclei) {
        if (static_cast<int>(nuc.position.size()) != grid.dim())
            throw std::invalid_argument("nucleus position has the wrong dimension");
        if (!(nuc.charge > 0.0)) throw std::invalid_argument("nuclear charge must be positive");
        for (double x : nuc.position)
            if (x < 0.0 || x >= grid.length()) throw std::invalid_argument("nucleus lies outside the cell");
    }
}

void check_truncation(std::optional<double> D) {
    if (D && !(*D > 0.0)) throw std::invalid_argument("truncation distance must be positive");
}

// Factor multiplying 1/k^2 in the truncated Coulomb kernel.
double truncation_factor(double k2, std::optional<double> D) {
    if (!D) return 1.0;
    return 1.0 - std::cos(std::sqrt(k2) * *D);
}

bool is_zero_mode(const IVec& nu) {
    return std::all_of(nu.begin(), nu.end(), [](int v) { return v == 0; });
}

std::vector<Spin> spins_of(const ModeGrid& grid) {
    if (grid.spinful()) return {Spin::Up, Spin::Down};
    return {Spin::None};
}

IVec add(const IVec& a, const IVec& b, int sign) {
    IVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + sign * b[i];
    return out;
}

}  // namespace

std::string to_string(Representation r) {
    switch (r) {
        case Representation::PlaneWave: return "plane_wave";
        case Representation::Dual: return "dual";
        case Representation::FiniteDifference: return "finite_difference";
    }
    return "?";
}

std::size_t FiniteDifferenceGrid::n_sites() const {
    std::size_t n = 1;
    for (int p : points) n *= static_cast<std::size_t>(p);
    return n;
}

std::vector<int> FiniteDifferenceGrid::site(std::size_t flat) const {
    std::vector<int> x(points.size());
    for (std::size_t a = 0; a < points.size(); ++a) {
        x[a] = static_cast<int>(flat % static_cast<std::size_t>(points[a]));
        flat /= static_cast<std::size_t>(points[a]);
    }
    return x;
}

std::size_t FiniteDifferenceGrid::flat_site(const std::vector<int>& x) const {
    std::size_t f = 0, stride = 1;
    for (std::size_t a = 0; a < points.size(); ++a) {
        f += static_cast<std::size_t>(x[a]) * stride;
        stride *= static_cast<std::size_t>(points[a]);
    }
    return f;
}

int HamiltonianSet::n_qubits() const {
    if (grid) return static_cast<int>(grid->n_qubits());
    if (fd_grid) return static_cast<int>(fd_grid->n_qubits());
    return 0;
}

FermionOperator HamiltonianSet::total(bool with_constant) const {
    FermionOperator h = T + U + V;
    if (with_constant && constant != 0.0) h += FermionOperator::identity(constant);
    return h;
}

double inverse_k2_sum(const ModeGrid& grid) {
    double s = 0.0;
    for (const auto& nu : grid.nu_list())
        if (!is_zero_mode(nu)) s += 1.0 / grid.k_squared(nu);
    return s;
}

DualCoefficients dual_coefficients(const ModeGrid& grid, const std::vector<Nucleus>& nuclei,
                                   std::optional<double> truncated_D) {
    check_nuclei(grid, nuclei);
    check_truncation(truncated_D);
    const std::size_t N = grid.n_spatial();
    const double omega = grid.volume();
    DualCoefficients c;
    c.t = Eigen::MatrixXd::Zero(static_cast<long>(N), static_cast<long>(N));
    c.u = Eigen::VectorXd::Zero(static_cast<long>(N));
    c.v = Eigen::MatrixXd::Zero(static_cast<long>(N), static_cast<long>(N));
    c.keep.resize(static_cast<long>(N), static_cast<long>(N));

    for (std::size_t p = 0; p < N; ++p) {
        const RVec rp = grid.r_vec(p);
        for (std::size_t q = 0; q < N; ++q) {
            const RVec rq = grid.r_vec(q);
            const RVec dq{rq[0] - rp[0], rq[1] - rp[1], rq[2] - rp[2]};
            double tsum = 0.0, vsum = 0.0;
            for (const auto& nu : grid.nu_list()) {
                const RVec k = grid.k_vec(nu);
                const double k2 = dot(k, k);
                tsum += k2 * std::cos(dot(k, dq));
                if (k2 > 0.0) vsum += std::cos(dot(k, dq)) / k2;
            }
            c.t(static_cast<long>(p), static_cast<long>(q)) = tsum / (2.0 * static_cast<double>(N));
            c.v(static_cast<long>(p), static_cast<long>(q)) = 2.0 * kPi / omega * vsum;
            c.keep(static_cast<long>(p), static_cast<long>(q)) =
                !truncated_D || grid.min_image_distance(p, q) <= *truncated_D;
        }
        double usum = 0.0;
        for (const auto& nuc : nuclei) {
            const RVec R = to_rvec(nuc.position);
            const RVec d{R[0] - rp[0], R[1] - rp[1], R[2] - rp[2]};
            for (const auto& nu : grid.nu_list()) {
                const RVec k = grid.k_vec(nu);
                const double k2 = dot(k, k);
                if (k2 == 0.0) continue;
                usum += nuc.charge * std::cos(dot(k, d)) / k2 * truncation_factor(k2, truncated_D);
            }
        }
        c.u(static_cast<long>(p)) = -4.0 * kPi / omega * usum;
    }
    return c;
}

HamiltonianSet build_dual(const ModeGrid& grid, const std::vector<Nucleus>& nuclei, std::optional<double> truncated_D,
                          double constant) {
    DualCoefficients c = dual_coefficients(grid, nuclei, truncated_D);
    HamiltonianSet hs;
    hs.representation = Representation::Dual;
    hs.grid = grid;
    hs.nuclei = nuclei;
    hs.truncated_D = truncated_D;
    hs.constant = constant;

    const std::size_t N = grid.n_spatial();
    for (Spin s : spins_of(grid)) {
        for (std::size_t p = 0; p < N; ++p) {
            const int qp = static_cast<int>(grid.qubit_index(p, s));
            for (std::size_t q = 0; q < N; ++q) {
                const int qq = static_cast<int>(grid.qubit_index(q, s));
                hs.T.add({{qp, true}, {qq, false}}, c.t(static_cast<long>(p), static_cast<long>(q)));
            }
            hs.U.add({{qp, true}, {qp, false}}, c.u(static_cast<long>(p)));
        }
    }
    const int n = static_cast<int>(grid.n_qubits());
    FermionOperator v;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const long si = static_cast<long>(grid.site_of_qubit(static_cast<std::size_t>(i)));
            const long sj = static_cast<long>(grid.site_of_qubit(static_cast<std::size_t>(j)));
            if (!c.keep(si, sj)) continue;
            v += FermionOperator::number(i) * FermionOperator::number(j) * cplx(2.0 * c.v(si, sj));
        }
    }
    hs.V = normal_order(v);
    hs.T.simplify();
    hs.U.simplify();
    return hs;
}

HamiltonianSet build_plane_wave(const ModeGrid& grid, const std::vector<Nucleus>& nuclei,
                                std::optional<double> truncated_D, double constant) {
    check_nuclei(grid, nuclei);
    check_truncation(truncated_D);
    HamiltonianSet hs;
    hs.representation = Representation::PlaneWave;
    hs.grid = grid;
    hs.nuclei = nuclei;
    hs.truncated_D = truncated_D;
    hs.constant = constant;

    const double omega = grid.volume();
    const auto& modes = grid.nu_list();
    const auto spins = spins_of(grid);
    auto orb = [&](const IVec& nu, Spin s) {
        return static_cast<int>(grid.qubit_index(grid.flat_nu(grid.wrap(nu)), s));
    };

    for (Spin s : spins)
        for (const auto& nu : modes) hs.T.add({{orb(nu, s), true}, {orb(nu, s), false}}, grid.k_squared(nu) / 2.0);

    // Potential kernel 1/k^2 (with truncation) for a wrapped momentum transfer.
    auto kernel = [&](const IVec& nu) {
        const double k2 = grid.k_squared(nu);
        return truncation_factor(k2, truncated_D) / k2;
    };

    for (const auto& p : modes) {
        for (const auto& q : modes) {
            if (p == q) continue;
            const IVec dpq = grid.wrap(add(p, q, -1));
            const IVec dqp = grid.wrap(add(q, p, -1));
            cplx coeff = 0.0;
            for (const auto& nuc : nuclei) {
                const RVec R = to_rvec(nuc.position);
                const double ph1 = dot(grid.k_vec(dpq), R);
                const double ph2 = dot(grid.k_vec(dqp), R);
                coeff += nuc.charge * 0.5 * (std::polar(1.0, ph1) * kernel(dpq) + std::polar(1.0, -ph2) * kernel(dqp));
            }
            coeff *= -4.0 * kPi / omega;
            for (Spin s : spins) hs.U.add({{orb(p, s), true}, {orb(q, s), false}}, coeff);
        }
    }

    FermionOperator v;
    for (const auto& nu : modes) {
        if (is_zero_mode(nu)) continue;
        const double w = 2.0 * kPi / omega * kernel(nu);
        for (const auto& p : modes) {
            for (const auto& q : modes) {
                const IVec qn = grid.wrap(add(q, nu, +1));
                const IVec pn = grid.wrap(add(p, nu, -1));
                for (Spin s : spins) {
                    for (Spin s2 : spins) {
                        v.add({{orb(p, s), true}, {orb(q, s2), true}, {orb(qn, s2), false}, {orb(pn, s), false}}, w);
                    }
                }
            }
        }
    }
    hs.V = normal_order(v);
    hs.T.simplify();
    hs.U.simplify();
    return hs;
}

QubitOperator build_qubit_part(const HamiltonianSet& hs, const FermionOperator& part) {
    return jordan_wigner(part, hs.n_qubits());
}

QubitOperator build_qubit(const HamiltonianSet& hs) {
    QubitOperator q = jordan_wigner(hs.total(false), hs.n_qubits());
    if (hs.constant != 0.0) q += QubitOperator::identity(hs.constant);
    q.simplify();
    return q;
}

double analytic_lambda_unit() {
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
    return (1.0 + s2 - 2.0 * s3) / 5.0 - kPi / 3.0 + std::log((1.0 + s2) * (2.0 + s3));
}

HamiltonianSet build_finite_difference(const FiniteDifferenceGrid& g, const std::vector<Nucleus>& nuclei,
                                       LambdaMode lambda) {
    if (!(g.h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
    if (g.points.empty() || g.points.size() > 3) throw std::invalid_argument("finite-difference grid needs 1 to 3 axes");
    for (int p : g.points)
        if (p < 1) throw std::invalid_argument("grid point counts must be positive");

    HamiltonianSet hs;
    hs.representation = Representation::FiniteDifference;
    hs.fd_grid = g;
    hs.nuclei = nuclei;

    const std::size_t n_sites = g.n_sites();
    const int d = static_cast<int>(g.points.size());
    const int n_spin = g.spinful ? 2 : 1;
    auto orb = [&](std::size_t site, int s) { return static_cast<int>(site * n_spin + s); };
    const double h = g.h;
    const double lam = lambda.analytic ? analytic_lambda_unit() / h : lambda.custom;

    for (std::size_t p = 0; p < n_sites; ++p) {
        const auto x = g.site(p);
        double upot = 0.0;
        for (const auto& nuc : nuclei) {
            if (nuc.position.size() != g.points.size()) throw std::invalid_argument("nucleus position has the wrong dimension");
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) {
                const double dx = x[a] * h - nuc.position[a];
                r2 += dx * dx;
            }
            if (r2 == 0.0) throw std::invalid_argument("nucleus coincides with a grid point");
            upot -= nuc.charge / std::sqrt(r2);
        }
        for (int s = 0; s < n_spin; ++s) {
            const int op = orb(p, s);
            hs.T.add({{op, true}, {op, false}}, h / 2.0 * 2.0 * d);
            for (int a = 0; a < d; ++a) {
                for (int step : {-1, +1}) {
                    auto y = x;
                    y[a] += step;
                    if (y[a] < 0 || y[a] >= g.points[a]) continue;  // open boundary
                    hs.T.add({{orb(g.flat_site(y), s), true}, {op, false}}, -h / 2.0);
                }
            }
            if (!nuclei.empty()) hs.U.add({{op, true}, {op, false}}, h * h * h * upot);
        }
    }

    FermionOperator v;
    if (g.spinful) {
        for (std::size_t p = 0; p < n_sites; ++p)
            v += FermionOperator::number(orb(p, 0)) * FermionOperator::number(orb(p, 1)) * cplx(lam);
    }
    for (std::size_t p = 0; p < n_sites; ++p) {
        for (std::size_t q = p + 1; q < n_sites; ++q) {
            const auto xp = g.site(p), xq = g.site(q);
            double r2 = 0.0;
            for (int a = 0; a < d; ++a) r2 += static_cast<double>((xp[a] - xq[a]) * (xp[a] - xq[a]));
            const double w = h * h * h / std::sqrt(r2);
            for (int s = 0; s < n_spin; ++s)
                for (int s2 = 0; s2 < n_spin; ++s2)
                    v += FermionOperator::number(orb(p, s)) * FermionOperator::number(orb(q, s2)) * cplx(w);
        }
    }
    hs.V = normal_order(v);
    hs.T.simplify();
    return hs;
}

std::size_t two_body_term_count(const HamiltonianSet& hs) {
    std::size_t count = 0;
    const FermionOperator v = normal_order(hs.V);
    for (const auto& [key, c] : v.terms())
        if (key.size() == 4) ++count;
    return count;
}

NormBounds norm_bounds(const HamiltonianSet& hs, int eta) {
    if (eta < 1) throw std::invalid_argument("eta must be at least 1");
    if (!hs.grid) throw std::invalid_argument("norm bounds need a plane-wave grid");
    const ModeGrid& grid = *hs.grid;
    const double omega = grid.volume();
    const double inv_k2 = inverse_k2_sum(grid);
    double zeta = 0.0;
    for (const auto& nuc : hs.nuclei) zeta += nuc.charge;
    double kmax2 = 0.0;
    for (const auto& nu : grid.nu_list()) kmax2 = std::max(kmax2, grid.k_squared(nu));

    NormBounds b;
    b.maxV = 2.0 * kPi * eta * eta / omega * inv_k2;
    b.maxU = 4.0 * kPi * eta / omega * zeta * inv_k2;
    b.maxT = eta * kmax2 / 2.0;
    b.maxH = b.maxT + b.maxU + b.maxV;

    double tri_t = 0.0;
    for (std::size_t p = 0; p < grid.n_spatial(); ++p) {
        const RVec rp = grid.r_vec(p);
        double s = 0.0;
        for (const auto& nu : grid.nu_list()) {
            const RVec k = grid.k_vec(nu);
            s += dot(k, k) * std::cos(dot(k, rp));
        }
        tri_t += std::abs(s);
    }
    b.triangle_T = 0.5 * tri_t * grid.spin_count();

    auto one_norm = [](const FermionOperator& op) {
        double s = 0.0;
        const FermionOperator ordered = normal_order(op);
        for (const auto& [k, c] : ordered.terms()) s += std::abs(c);
        return s;
    };
    b.triangle_H = b.triangle_T + one_norm(hs.U) + one_norm(hs.V);

    QubitOperator q = build_qubit(hs);
    for (const auto& [s, c] : q.terms())
        if (!s.is_identity()) b.lambda += std::abs(c);
    return b;
}

// --------------------------------------------------------------- text I/O

std::string serialize_hamiltonian(const HamiltonianSet& hs) {
    std::ostringstream out;
    out << "# pwdual-hamiltonian 1\n";
    out << "# representation " << to_string(hs.representation) << "\n";
    if (hs.grid) {
        out << "# d " << hs.grid->dim() << "\n";
        out << "# M " << hs.grid->modes_per_axis() << "\n";
        out << "# omega " << format_double(hs.grid->volume()) << "\n";
        out << "# spinful " << (hs.grid->spinful() ? 1 : 0) << "\n";
    }
    if (hs.fd_grid) {
        out << "# fd_points";
        for (int p : hs.fd_grid->points) out << ' ' << p;
        out << "\n# fd_h " << format_double(hs.fd_grid->h) << "\n";
        out << "# spinful " << (hs.fd_grid->spinful ? 1 : 0) << "\n";
    }
    out << "# constant " << format_double(hs.constant) << "\n";
    out << "# truncated_D " << (hs.truncated_D ? format_double(*hs.truncated_D) : std::string("none")) << "\n";
    for (const auto& nuc : hs.nuclei) {
        out << "# nucleus " << format_double(nuc.charge);
        for (double x : nuc.position) out << ' ' << format_double(x);
        out << "\n";
    }
    out << "[T]\n" << to_text(hs.T);
    out << "[U]\n" << to_text(hs.U);
    out << "[V]\n" << to_text(hs.V);
    return out.str();
}

HamiltonianSet parse_hamiltonian(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    HamiltonianSet hs;
    int d = 0, M = 0;
    double omega = 0.0;
    bool spinful = false;
    std::vector<int> fd_points;
    double fd_h = 0.0;
    std::string section;
    std::string sections[3];
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            std::string key;
            ls >> key;
            if (key == "representation") {
                std::string r;
                ls >> r;
                if (r == "plane_wave") hs.representation = Representation::PlaneWave;
                else if (r == "dual") hs.representation = Representation::Dual;
                else if (r == "finite_difference") hs.representation = Representation::FiniteDifference;
                else throw std::invalid_argument("unknown representation '" + r + "'");
            } else if (key == "d") {
                ls >> d;
            } else if (key == "M") {
                ls >> M;
            } else if (key == "omega") {
                std::string v;
                ls >> v;
                omega = std::stod(v);
            } else if (key == "spinful") {
                int s = 0;
                ls >> s;
                spinful = s != 0;
            } else if (key == "fd_points") {
                int p;
                while (ls >> p) fd_points.push_back(p);
            } else if (key == "fd_h") {
                std::string v;
                ls >> v;
                fd_h = std::stod(v);
            } else if (key == "constant") {
                std::string v;
                ls >> v;
                hs.constant = std::stod(v);
            } else if (key == "truncated_D") {
                std::string v;
                ls >> v;
                if (v != "none") hs.truncated_D = std::stod(v);
            } else if (key == "nucleus") {
                Nucleus nuc;
                std::string v;
                ls >> v;
                nuc.charge = std::stod(v);
                while (ls >> v) nuc.position.push_back(std::stod(v));
                hs.nuclei.push_back(nuc);
            }
            continue;
        }
        if (line == "[T]" || line == "[U]" || line == "[V]") {
            section = line;
            continue;
        }
        if (section == "[T]") sections[0] += line + "\n";
        else if (section == "[U]") sections[1] += line + "\n";
        else if (section == "[V]") sections[2] += line + "\n";
    }
    if (hs.representation == Representation::FiniteDifference) {
        hs.fd_grid = FiniteDifferenceGrid{fd_points, fd_h, spinful};
    } else {
        hs.grid = build_grid(d, M, omega, spinful);
    }
    hs.T = parse_fermion_operator(sections[0]);
    hs.U = parse_fermion_operator(sections[1]);
    hs.V = parse_fermion_operator(sections[2]);
    return hs;
}

}  // namespace pwd
