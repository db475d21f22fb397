#include "commands.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "pwdual/ffft.hpp"
#include "pwdual/hamiltonian.hpp"
#include "pwdual/lcu.hpp"
#include "pwdual/measurement.hpp"
#include "pwdual/rng.hpp"
#include "pwdual/statevector.hpp"
#include "pwdual/swapnet.hpp"
#include "pwdual/trotter.hpp"
#include "pwdual/vqe.hpp"

namespace pwcli {

using namespace pwd;

// ---------------------------------------------------------------------------
// JSON output

namespace {

void dump_value(const Json& j, int indent, std::string& out) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(k).dump() + ": ";
                dump_value(v, indent + 2, out);
            }
            out += "\n" + close + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump_value(j[i], indent + 2, out);
            }
            out += "\n" + close + "]";
            return;
        }
        case Json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? fmt::format("{:.17g}", x) : "null";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace

std::string dump_json(const Json& j) {
    std::string out;
    dump_value(j, 0, out);
    out += '\n';
    return out;
}

void apply_override(Json& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("--set expects key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    Json* node = &config;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ValidationError("--set key path '" + path + "' has an empty component");
        if (!node->is_object()) throw ValidationError("--set path '" + path + "' crosses a non-object value");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        Json& next = (*node)[key];
        if (next.is_null()) next = Json::object();
        node = &next;
        start = dot + 1;
    }
}

// ---------------------------------------------------------------------------
// Config sections

Section::Section(const Json& in, std::string path) : in_(in), path_(std::move(path)) {
    if (in_.is_null()) in_ = Json::object();
    if (!in_.is_object()) throw ValidationError((path_.empty() ? "config" : path_) + ": expected an object");
}

void Section::fail(const std::string& key, const std::string& message) const {
    throw ValidationError(name(key) + ": " + message);
}

bool Section::has(const std::string& key) const { return in_.contains(key) && !in_.at(key).is_null(); }

const Json* Section::lookup(const std::string& key) {
    seen_.push_back(key);
    if (!has(key)) return nullptr;
    return &in_.at(key);
}

int Section::integer(const std::string& key, std::optional<int> def) {
    const Json* v = lookup(key);
    int x;
    if (!v) {
        if (!def) fail(key, "required integer is missing");
        x = *def;
    } else {
        if (!v->is_number_integer()) fail(key, "expected an integer, got " + v->dump());
        x = v->get<int>();
    }
    out_[key] = x;
    return x;
}

double Section::number(const std::string& key, std::optional<double> def) {
    const Json* v = lookup(key);
    double x;
    if (!v) {
        if (!def) fail(key, "required number is missing");
        x = *def;
    } else {
        if (!v->is_number()) fail(key, "expected a number, got " + v->dump());
        x = v->get<double>();
    }
    if (!std::isfinite(x)) fail(key, "must be finite");
    out_[key] = x;
    return x;
}

bool Section::boolean(const std::string& key, std::optional<bool> def) {
    const Json* v = lookup(key);
    bool x;
    if (!v) {
        if (!def) fail(key, "required boolean is missing");
        x = *def;
    } else {
        if (!v->is_boolean()) fail(key, "expected true or false, got " + v->dump());
        x = v->get<bool>();
    }
    out_[key] = x;
    return x;
}

std::string Section::string(const std::string& key, std::optional<std::string> def) {
    const Json* v = lookup(key);
    std::string x;
    if (!v) {
        if (!def) fail(key, "required string is missing");
        x = *def;
    } else {
        if (!v->is_string()) fail(key, "expected a string, got " + v->dump());
        x = v->get<std::string>();
    }
    out_[key] = x;
    return x;
}

std::vector<int> Section::integers(const std::string& key, std::optional<std::vector<int>> def) {
    const Json* v = lookup(key);
    std::vector<int> x;
    if (!v) {
        if (!def) fail(key, "required integer list is missing");
        x = *def;
    } else {
        if (!v->is_array()) fail(key, "expected a list of integers, got " + v->dump());
        for (const auto& e : *v) {
            if (!e.is_number_integer()) fail(key, "expected a list of integers, got " + v->dump());
            x.push_back(e.get<int>());
        }
    }
    out_[key] = x;
    return x;
}

std::vector<std::string> Section::strings(const std::string& key, std::optional<std::vector<std::string>> def) {
    const Json* v = lookup(key);
    std::vector<std::string> x;
    if (!v) {
        if (!def) fail(key, "required string list is missing");
        x = *def;
    } else {
        if (!v->is_array()) fail(key, "expected a list of strings, got " + v->dump());
        for (const auto& e : *v) {
            if (!e.is_string()) fail(key, "expected a list of strings, got " + v->dump());
            x.push_back(e.get<std::string>());
        }
    }
    out_[key] = x;
    return x;
}

std::optional<double> Section::optional_number(const std::string& key) {
    const Json* v = lookup(key);
    if (!v) {
        out_[key] = nullptr;
        return std::nullopt;
    }
    if (!v->is_number()) fail(key, "expected a number or null, got " + v->dump());
    out_[key] = v->get<double>();
    return v->get<double>();
}

std::optional<int> Section::optional_integer(const std::string& key) {
    const Json* v = lookup(key);
    if (!v) {
        out_[key] = nullptr;
        return std::nullopt;
    }
    if (!v->is_number_integer()) fail(key, "expected an integer or null, got " + v->dump());
    out_[key] = v->get<int>();
    return v->get<int>();
}

Json Section::raw(const std::string& key) {
    const Json* v = lookup(key);
    return v ? *v : Json();
}

Section Section::child(const std::string& key) {
    const Json* v = lookup(key);
    return Section(v ? *v : Json::object(), name(key));
}

void Section::finish() const {
    for (const auto& [k, v] : in_.items())
        if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) {
            std::string known;
            for (const auto& s : seen_) known += (known.empty() ? "" : ", ") + s;
            throw ValidationError("unknown key '" + name(k) + "' (accepted: " + known + ")");
        }
}

// ---------------------------------------------------------------------------
// Shared pieces

namespace {

constexpr int kDenseCap = 12;

struct System {
    std::optional<ModeGrid> grid;
    std::vector<Nucleus> nuclei;
    std::optional<double> truncated_D;
    double constant = 0.0;
    int eta = 1;
};

System read_system(Section& top) {
    Section s = top.child("system");
    System sys;
    const int d = s.integer("d", 1);
    if (d < 1 || d > 3) s.fail("d", "dimension must be 1, 2 or 3");
    const int M = s.integer("M", 2);
    if (M < 2 || !is_power_of_two(static_cast<std::size_t>(M)))
        s.fail("M", "the radix-2 fermionic Fourier transform needs M to be a power of two >= 2, got " +
                        std::to_string(M));
    const bool spinful = s.boolean("spinful", false);
    const std::size_t n = static_cast<std::size_t>(std::pow(M, d)) * (spinful ? 2 : 1);
    const int eta = s.integer("eta", static_cast<int>(std::min<std::size_t>(2, n)));
    if (eta < 1 || static_cast<std::size_t>(eta) > n)
        s.fail("eta", "electron count must lie in [1, " + std::to_string(n) + "]");
    sys.eta = eta;

    // Omega directly, or from the Wigner-Seitz radius: Omega / eta is the
    // volume of a d-ball of radius r_s.
    const auto omega_in = s.optional_number("omega");
    const auto rs = s.optional_number("r_s");
    double omega;
    if (omega_in && rs) s.fail("r_s", "give either omega or r_s, not both");
    if (rs) {
        if (!(*rs > 0.0)) s.fail("r_s", "must be positive");
        const double ball = d == 1 ? 2.0 * *rs : d == 2 ? std::numbers::pi * *rs * *rs
                                                        : 4.0 * std::numbers::pi / 3.0 * std::pow(*rs, 3);
        omega = eta * ball;
    } else {
        omega = omega_in.value_or(5.0);
    }
    if (!(omega > 0.0)) s.fail("omega", "cell volume must be positive");
    s.put("omega", omega);

    Json nuclei_out = Json::array();
    const Json nuc = s.raw("nuclei");
    if (!nuc.is_null()) {
        if (!nuc.is_array()) s.fail("nuclei", "expected a list of {position, charge} objects");
        for (std::size_t i = 0; i < nuc.size(); ++i) {
            Section ns(nuc[i], "system.nuclei[" + std::to_string(i) + "]");
            Nucleus nu;
            const Json pos = ns.raw("position");
            if (!pos.is_array() || pos.size() != static_cast<std::size_t>(d))
                ns.fail("position", "expected " + std::to_string(d) + " coordinates");
            for (const auto& x : pos) {
                if (!x.is_number()) ns.fail("position", "coordinates must be numbers");
                nu.position.push_back(x.get<double>());
            }
            ns.put("position", nu.position);
            nu.charge = ns.number("charge", 1.0);
            if (!(nu.charge > 0.0)) ns.fail("charge", "must be positive");
            ns.finish();
            sys.nuclei.push_back(nu);
            nuclei_out.push_back(ns.resolved());
        }
    }
    s.put("nuclei", nuclei_out);
    sys.truncated_D = s.optional_number("truncated_D");
    if (sys.truncated_D && !(*sys.truncated_D > 0.0)) s.fail("truncated_D", "must be positive");
    sys.constant = s.number("constant", 0.0);
    s.finish();
    top.put("system", s.resolved());
    sys.grid.emplace(build_grid(d, M, omega, spinful));
    return sys;
}

void require_width(const System& sys, int cap, const std::string& what) {
    const int n = static_cast<int>(sys.grid->n_qubits());
    if (n > cap)
        throw ValidationError(what + " is limited to " + std::to_string(cap) + " qubits; this grid has " +
                              std::to_string(n));
}

HamiltonianSet build_rep(const System& sys, Representation rep) {
    return rep == Representation::PlaneWave ? build_plane_wave(*sys.grid, sys.nuclei, sys.truncated_D, sys.constant)
                                            : build_dual(*sys.grid, sys.nuclei, sys.truncated_D, sys.constant);
}

Representation parse_rep(Section& s, const std::string& key, const std::string& value) {
    if (value == "plane_wave") return Representation::PlaneWave;
    if (value == "dual") return Representation::Dual;
    if (value == "finite_difference") return Representation::FiniteDifference;
    s.fail(key, "unknown representation '" + value + "' (expected plane_wave, dual or finite_difference)");
}

// Collects pass/fail records for the embedded assertions.
struct Checks {
    Json list = Json::array();
    bool all = true;

    void add(const std::string& name, bool pass, Json value, const std::string& requirement) {
        list.push_back(Json{{"name", name}, {"passed", pass}, {"value", std::move(value)}, {"requirement", requirement}});
        all = all && pass;
    }
};

Json bounds_json(const NormBounds& b) {
    return Json{{"maxV", b.maxV},         {"maxU", b.maxU},   {"maxT", b.maxT},
                {"maxH", b.maxH},         {"triangle_T", b.triangle_T},
                {"triangle_H", b.triangle_H}, {"lambda", b.lambda}};
}

Eigen::VectorXd spectrum(const DenseMatrix& h) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// Dense block of a number-conserving operator on the eta-particle sector.
DenseMatrix sector_block(const SparseMatrix& h, int n, int eta) {
    std::vector<long> idx;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b)
        if (std::popcount(b) == eta) idx.push_back(static_cast<long>(b));
    std::vector<long> pos(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < idx.size(); ++i) pos[static_cast<std::size_t>(idx[i])] = static_cast<long>(i);
    DenseMatrix m = DenseMatrix::Zero(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
    for (long k = 0; k < h.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
            const long r = pos[static_cast<std::size_t>(it.row())], c = pos[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) m(r, c) = it.value();
        }
    return m;
}

// Normalised Gaussian-random state supported on the eta-particle sector.
Statevector random_sector_state(int n, int eta, std::uint64_t seed) {
    CounterRng rng(seed);
    Statevector s(n);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double re = rng.normal(), im = rng.normal();
        s[i] = std::popcount(i) == eta ? cplx(re, im) : cplx(0.0);
    }
    s.normalize();
    return s;
}

std::string csv_line(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) out += (out.empty() ? "" : ",") + c;
    return out + "\n";
}

// ---------------------------------------------------------------------------
// Commands

struct Context {
    Section top;
    Section task;
    System sys;
    std::uint64_t seed;
    Checks checks;
    Json results = Json::object();
    std::vector<Artifact> artifacts;

    // Called once every option is read, before any heavy work.
    void ready() const {
        task.finish();
        top.finish();
    }
};

void cmd_build(Context& c) {
    const auto reps = c.task.strings("representations", std::vector<std::string>{"dual"});
    if (reps.empty()) c.task.fail("representations", "request at least one representation");
    const double iso_tol = c.task.number("isospectral_tolerance", 1e-9);
    const auto fd_points = c.task.integers("fd_points", std::vector<int>{2, 1, 1});
    const double fd_h = c.task.number("fd_h", 1.0);
    const auto fd_lambda = c.task.optional_number("fd_lambda");
    if (!(fd_h > 0.0)) c.task.fail("fd_h", "grid spacing must be positive");
    for (int p : fd_points)
        if (p < 1) c.task.fail("fd_points", "points per axis must be positive");

    c.ready();
    std::map<Representation, HamiltonianSet> built;
    Json per = Json::object();
    for (const auto& name : reps) {
        const Representation rep = parse_rep(c.task, "representations", name);
        if (built.count(rep)) c.task.fail("representations", "'" + name + "' requested twice");
        HamiltonianSet hs;
        if (rep == Representation::FiniteDifference) {
            FiniteDifferenceGrid g;
            g.points = fd_points;
            g.h = fd_h;
            g.spinful = c.sys.grid->spinful();
            LambdaMode lm;
            if (fd_lambda) lm = {false, *fd_lambda};
            hs = build_finite_difference(g, c.sys.nuclei, lm);
        } else {
            hs = build_rep(c.sys, rep);
        }
        Json r{{"file", name + ".ham"},
               {"n_qubits", hs.n_qubits()},
               {"T_terms", hs.T.size()},
               {"U_terms", hs.U.size()},
               {"V_terms", hs.V.size()},
               {"two_body_terms", two_body_term_count(hs)},
               {"qubit_terms", build_qubit(hs).size()}};
        if (hs.grid) r["norm_bounds"] = bounds_json(norm_bounds(hs, c.sys.eta));
        per[name] = r;
        c.artifacts.push_back({name + ".ham", serialize_hamiltonian(hs)});
        built.emplace(rep, std::move(hs));
    }
    c.results["representations"] = per;

    if (auto it = built.find(Representation::Dual); it != built.end() && !c.sys.truncated_D) {
        const std::size_t n = static_cast<std::size_t>(it->second.n_qubits());
        const std::size_t count = two_body_term_count(it->second);
        c.checks.add("dual V term count equals C(n,2)", count == n * (n - 1) / 2, count,
                     "== " + std::to_string(n * (n - 1) / 2));
    }
    if (built.count(Representation::PlaneWave) && built.count(Representation::Dual)) {
        const int n = built.at(Representation::Dual).n_qubits();
        Json iso{{"n_qubits", n}};
        if (n > kDenseCap) {
            iso["status"] = "skipped";
            iso["reason"] = "dense diagonalisation is limited to " + std::to_string(kDenseCap) + " qubits";
        } else {
            const auto e_pw = spectrum(to_matrix(built.at(Representation::PlaneWave).total(), n));
            const auto e_du = spectrum(to_matrix(built.at(Representation::Dual).total(), n));
            const double err = (e_pw - e_du).cwiseAbs().maxCoeff();
            iso["status"] = "checked";
            iso["max_abs_eigenvalue_difference"] = err;
            iso["ground_energy"] = e_du.minCoeff();
            iso["tolerance"] = iso_tol;
            c.checks.add("plane-wave and dual spectra agree", err < iso_tol, err, fmt::format("< {}", iso_tol));
        }
        c.results["isospectrality"] = iso;
        c.artifacts.push_back({"isospectrality.json", dump_json(iso)});
    }
}

void cmd_diagonalize(Context& c) {
    const std::string rep_name = c.task.string("representation", "dual");
    const Representation rep = parse_rep(c.task, "representation", rep_name);
    if (rep == Representation::FiniteDifference)
        c.task.fail("representation", "diagonalize works on the plane_wave or dual Hamiltonian");
    const std::string sector = c.task.string("sector", "eta");
    if (sector != "eta" && sector != "all") c.task.fail("sector", "expected \"eta\" or \"all\"");
    const int count = c.task.integer("count", 8);
    if (count < 0) c.task.fail("count", "must be non-negative (0 reports every eigenvalue)");
    c.ready();
    require_width(c.sys, kDenseCap, "dense diagonalisation");

    const HamiltonianSet hs = build_rep(c.sys, rep);
    const int n = hs.n_qubits();
    const SparseMatrix h = to_sparse(hs.total(), n);
    const DenseMatrix block = sector == "eta" ? sector_block(h, n, c.sys.eta) : DenseMatrix(h);
    const Eigen::VectorXd e = spectrum(block);
    const long shown = count == 0 ? e.size() : std::min<long>(count, e.size());
    std::vector<double> low(e.data(), e.data() + shown);
    std::string csv = "index,energy\n";
    for (long i = 0; i < e.size(); ++i) csv += csv_line({std::to_string(i), format_double(e[i])});
    c.artifacts.push_back({"spectrum.csv", csv});
    c.results["sector"] = sector == "eta" ? Json(c.sys.eta) : Json("all");
    c.results["dimension"] = e.size();
    c.results["ground_energy"] = e[0];
    c.results["eigenvalues"] = low;
    const double herm = (block - block.adjoint()).cwiseAbs().maxCoeff();
    c.checks.add("Hamiltonian block is Hermitian", herm < 1e-10, herm, "< 1e-10");
}

void cmd_trotter_sweep(Context& c) {
    const std::string strat = c.task.string("strategy", "split_operator");
    TrotterStrategy strategy;
    if (strat == "split_operator")
        strategy = TrotterStrategy::SplitOperator;
    else if (strat == "direct_jw")
        strategy = TrotterStrategy::DirectJW;
    else
        c.task.fail("strategy", "expected split_operator or direct_jw");
    const int order = c.task.integer("order", 2);
    if (order != 1 && order != 2) c.task.fail("order", "product formulas of order 1 and 2 are supported");
    const double t = c.task.number("t", 1.0);
    if (!(t > 0.0)) c.task.fail("t", "evolution time must be positive");
    const auto r_list = c.task.integers("r_list", std::vector<int>{2, 4, 8, 16, 32});
    if (r_list.size() < 2) c.task.fail("r_list", "a slope needs at least two step counts");
    for (int r : r_list)
        if (r < 1) c.task.fail("r_list", "step counts must be positive");
    const Json expected_in = c.task.raw("expected_slope");
    double expected = -order;
    bool check_slope = true;
    if (expected_in.is_number())
        expected = expected_in.get<double>();
    else if (expected_in.is_string() && expected_in.get<std::string>() == "none")
        check_slope = false;
    else if (!expected_in.is_null())
        c.task.fail("expected_slope", "expected a number or \"none\"");
    c.task.put("expected_slope", check_slope ? Json(expected) : Json("none"));
    const double tol = c.task.number("slope_tolerance", 0.1);
    const bool planar = c.task.boolean("planar", false);
    c.ready();
    require_width(c.sys, kDenseCap, "the dense error sweep");

    const HamiltonianSet hs = build_dual(*c.sys.grid, c.sys.nuclei, c.sys.truncated_D, c.sys.constant);
    const ErrorScaling es = measure_error_scaling(hs, t, r_list, strategy, order);
    std::string csv = "r,error,fitted_slope\n";
    Json pts = Json::array();
    for (const auto& p : es.points) {
        csv += csv_line({std::to_string(p.r), format_double(p.error), format_double(es.slope)});
        pts.push_back(Json{{"r", p.r}, {"error", p.error}});
    }
    c.artifacts.push_back({"trotter_sweep.csv", csv});
    c.results["points"] = pts;
    c.results["slope"] = es.slope;
    c.results["intercept"] = es.intercept;

    const int n = hs.n_qubits();
    const double tau = t / r_list.front();
    const Connectivity conn = planar ? planar_layout(n) : Connectivity::all_to_all();
    const Circuit step = strategy == TrotterStrategy::SplitOperator
                             ? split_operator_step(hs, tau, order, conn)
                             : direct_jw_step(without_identity(build_qubit(hs)), tau, order, n);
    c.artifacts.push_back({"trotter_step.circuit", step.to_text()});
    c.results["exported_step"] = Json{{"file", "trotter_step.circuit"},     {"tau", tau},
                                      {"connectivity", step.connectivity().to_string()},
                                      {"gates", step.size()},              {"depth", step.depth()},
                                      {"two_qubit_gates", step.multi_qubit_count()}};
    if (check_slope)
        c.checks.add("fitted slope", std::abs(es.slope - expected) <= tol, es.slope,
                     fmt::format("{} +/- {}", expected, tol));
}

void cmd_ffft_check(Context& c) {
    const double tol = c.task.number("tolerance", 1e-9);
    const bool planar = c.task.boolean("planar", true);
    c.ready();
    require_width(c.sys, kDenseCap, "the dense transform check");
    const ModeGrid& grid = *c.sys.grid;
    const int n = static_cast<int>(grid.n_qubits());
    const Connectivity conn = planar ? planar_layout(n) : Connectivity::all_to_all();
    const FfftPlan plan = plan_ffft_nd(grid, conn);
    const Circuit& C = plan.circuit;
    C.check_connectivity();

    // C^dagger a+_j C against the Fourier combination of site operators.
    const DenseMatrix u = circuit_matrix(C);
    const double norm = 1.0 / std::sqrt(static_cast<double>(grid.n_spatial()));
    double conj_err = 0.0;
    for (std::size_t j = 0; j < grid.n_spatial(); ++j) {
        const RVec k = grid.k_vec(grid.nu(j));
        for (int s = 0; s < grid.spin_count(); ++s) {
            const Spin spin = grid.spinful() ? static_cast<Spin>(s) : Spin::None;
            FermionOperator combo;
            for (std::size_t p = 0; p < grid.n_spatial(); ++p)
                combo += FermionOperator::raise(static_cast<int>(grid.qubit_index(p, spin))) *
                         (norm * std::exp(cplx(0.0, -dot(k, grid.r_vec(p)))));
            const DenseMatrix lhs =
                u.adjoint() * to_matrix(FermionOperator::raise(static_cast<int>(grid.qubit_index(j, spin))), n) * u;
            conj_err = std::max(conj_err, (lhs - to_matrix(combo, n)).cwiseAbs().maxCoeff());
        }
    }
    // C^dagger (sum_q k_q^2/2 n_q) C against the dual-basis kinetic operator.
    FermionOperator d;
    for (int q = 0; q < n; ++q)
        d += FermionOperator::number(q) * cplx(0.5 * grid.k_squared(grid.nu(grid.site_of_qubit(static_cast<std::size_t>(q)))));
    const HamiltonianSet dual = build_dual(grid, {}, std::nullopt, 0.0);
    const double kin_err = (u.adjoint() * to_matrix(d, n) * u - to_matrix(dual.T, n)).cwiseAbs().maxCoeff();

    const int M = grid.modes_per_axis();
    const double mlogm = M * std::log2(static_cast<double>(M));
    c.results["conjugation_max_error"] = conj_err;
    c.results["kinetic_max_error"] = kin_err;
    c.results["connectivity"] = conn.to_string();
    c.results["gates"] = C.size();
    c.results["two_qubit_gates"] = C.multi_qubit_count();
    c.results["depth"] = C.depth();
    c.results["depth_over_M_log2_M"] = static_cast<double>(C.depth()) / mlogm;
    c.results["stages"] = plan.stages.size();
    c.artifacts.push_back({"ffft_plan.json", plan_to_json(plan)});
    c.artifacts.push_back({"ffft.circuit", C.to_text()});
    c.checks.add("conjugation max error", conj_err < tol, conj_err, fmt::format("< {}", tol));
    c.checks.add("kinetic diagonalisation max error", kin_err < tol, kin_err, fmt::format("< {}", tol));
}

void cmd_swapnet(Context& c) {
    const int rows = c.task.integer("rows", 4);
    const int cols = c.task.integer("cols", 4);
    const bool lower = c.task.boolean("lower_check", true);
    const double tol = c.task.number("tolerance", 1e-10);
    if (rows < 1 || cols < 1 || !is_power_of_two(static_cast<std::size_t>(rows)) ||
        !is_power_of_two(static_cast<std::size_t>(cols)))
        c.task.fail("rows", "the recursive construction needs power-of-two lattice sides");
    if (rows * cols < 2) c.task.fail("rows", "the lattice needs at least two cells");

    c.ready();
    const SwapSchedule sched = build_full_schedule(rows, cols);
    const ScheduleReport rep = verify_schedule(sched);
    c.artifacts.push_back({"swapnet_schedule.txt", sched.to_text()});
    c.artifacts.push_back({"swapnet_coverage.json", rep.to_json()});
    c.results["coverage"] = Json::parse(rep.to_json());
    c.results["coverage_summary"] = fmt::format("{}/{} pairs", rep.pairs_covered, rep.pairs_total);
    c.checks.add("complete-graph coverage", rep.pairs_covered == rep.pairs_total && rep.duplicate_interactions == 0,
                 fmt::format("{}/{}", rep.pairs_covered, rep.pairs_total), "every pair exactly once");
    c.checks.add("layers are disjoint and nearest-neighbour", rep.disjoint && rep.adjacent,
                 Json{{"disjoint", rep.disjoint}, {"adjacent", rep.adjacent}}, "both true");
    const int n = rows * cols;
    if (rows == cols) {
        const auto side = static_cast<std::size_t>(rows);
        const std::size_t expected = static_cast<std::size_t>(n) + side / 2;
        c.checks.add("first-level layer count", rep.first_level_layers == expected, rep.first_level_layers,
                     "== " + std::to_string(expected));
    }

    if (lower && n <= 20) {
        PairPhases phases;
        CounterRng rng(c.seed);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) phases[{a, b}] = 2.0 * rng.uniform() - 1.0;
        const LoweredLayer ll = lower_diagonal_layer(phases, sched, true);
        bool restored = true;
        for (int q = 0; q < n; ++q) restored = restored && ll.final_qubit[static_cast<std::size_t>(q)] == q;
        c.checks.add("positions restored", restored, restored, "identity permutation");
        Statevector psi(n);
        CounterRng srng = rng.child(1);
        for (std::size_t i = 0; i < psi.dim(); ++i) psi[i] = cplx(srng.normal(), srng.normal());
        psi.normalize();
        Statevector expect = psi;
        for (std::size_t i = 0; i < psi.dim(); ++i) {
            double phi = 0.0;
            for (const auto& [ab, v] : phases) {
                const bool za = (i >> ab.first) & 1, zb = (i >> ab.second) & 1;
                phi += za == zb ? v : -v;
            }
            expect[i] *= std::exp(cplx(0.0, -phi));
        }
        apply_circuit(psi, ll.circuit);
        double err = 0.0;
        for (std::size_t i = 0; i < psi.dim(); ++i) err = std::max(err, std::abs(psi[i] - expect[i]));
        c.results["lowered_layer"] = Json{{"gates", ll.circuit.size()}, {"depth", ll.circuit.depth()},
                                          {"max_amplitude_error", err}};
        c.checks.add("lowered diagonal layer matches the exact phases", err < tol, err, fmt::format("< {}", tol));
    }
}

void cmd_lcu_check(Context& c) {
    const bool noop = c.task.boolean("include_noop", true);
    const double t = c.task.number("t", 0.1);
    const auto ks = c.task.integers("K_list", std::vector<int>{2, 4});
    const double tol = c.task.number("tolerance", 1e-12);
    const double ratio_max = c.task.number("taylor_ratio_max", 0.05);
    for (int k : ks)
        if (k < 0) c.task.fail("K_list", "truncation orders must be non-negative");
    c.ready();
    require_width(c.sys, kDenseCap, "the LCU check");

    const HamiltonianSet hs = build_dual(*c.sys.grid, c.sys.nuclei, c.sys.truncated_D, c.sys.constant);
    const LcuModel model = build_weights(hs, {noop});
    c.artifacts.push_back({"lcu_weights.csv", model.weights_csv()});
    c.results["lambda"] = model.lambda;
    c.results["noop_weight"] = model.noop_weight;
    c.results["selection_width"] = model.selection_width;
    c.results["terms"] = model.terms.size();

    const QubitOperator diff = lcu_hamiltonian(model) - without_identity(build_qubit(hs));
    const double rec = diff.max_abs_coefficient();
    c.checks.add("weights reconstruct the qubit Hamiltonian", rec < tol, rec, fmt::format("< {}", tol));

    const Statevector prep = prepare_state(model);
    double prep_err = std::abs(prep.norm() - 1.0);
    for (const auto& term : model.terms)
        prep_err = std::max(prep_err, std::abs(prep[term.index.encode(model.n_system)] -
                                               std::sqrt(std::abs(term.weight) / model.lambda)));
    c.checks.add("PREPARE amplitudes", prep_err < tol, prep_err, fmt::format("< {}", tol));

    const int width = model.n_system + model.selection_width;
    if (width <= 14) {
        const SparseMatrix s = select_matrix(model);
        SparseMatrix id(s.rows(), s.cols());
        id.setIdentity();
        const SparseMatrix sq = (s * s - id).pruned();
        double err = 0.0;
        for (long k = 0; k < sq.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(sq, k); it; ++it) err = std::max(err, std::abs(it.value()));
        c.checks.add("SELECT squared is the identity", err < tol, err, fmt::format("< {}", tol));
    } else {
        c.results["select_check"] = fmt::format("skipped: {} qubits exceed the 14-qubit cap", width);
    }

    if (model.lambda * t > std::numbers::ln2) {
        c.results["taylor"] = Json{{"status", "skipped"},
                                   {"reason", fmt::format("lambda * t = {:.6g} exceeds ln 2", model.lambda * t)}};
        return;
    }
    const Statevector psi = random_sector_state(model.n_system, c.sys.eta, c.seed);
    const Statevector exact = exact_evolve(lcu_hamiltonian(model), t, psi);
    Json rows = Json::array();
    std::vector<double> errs;
    for (int k : ks) {
        const TaylorResult tr = taylor_segment(model, t, k, psi);
        double e = 0.0;
        for (std::size_t i = 0; i < exact.dim(); ++i) e += std::norm(tr.state[i] - exact[i]);
        errs.push_back(std::sqrt(e));
        rows.push_back(Json{{"K", k}, {"error", errs.back()}, {"success_amplitude", tr.success_amplitude}});
    }
    c.results["taylor"] = Json{{"status", "checked"}, {"lambda_t", model.lambda * t}, {"orders", rows}};
    if (errs.size() >= 2) {
        const auto lo = std::min_element(ks.begin(), ks.end()) - ks.begin();
        const auto hi = std::max_element(ks.begin(), ks.end()) - ks.begin();
        const double ratio = errs[static_cast<std::size_t>(hi)] / errs[static_cast<std::size_t>(lo)];
        c.checks.add(fmt::format("Taylor error ratio K={} / K={}", ks[static_cast<std::size_t>(hi)],
                                 ks[static_cast<std::size_t>(lo)]),
                     ratio < ratio_max, ratio, fmt::format("< {}", ratio_max));
    }
}

void cmd_measure(Context& c) {
    const std::string strat = c.task.string("strategy", "diagonal_groups");
    MeasurementStrategy strategy;
    try {
        strategy = parse_strategy(strat);
    } catch (const std::invalid_argument& e) {
        c.task.fail("strategy", e.what());
    }
    const int shots = c.task.integer("shots", 1000);
    if (shots < 2) c.task.fail("shots", "at least two shots are needed");
    const std::string state_kind = c.task.string("state", "reference");
    const int basis_index = c.task.integer("basis_index", 0);
    const double target = c.task.number("target_error", 0.1);
    if (!(target > 0.0)) c.task.fail("target_error", "must be positive");
    const std::string mode_name = c.task.string("error_mode", "absolute");
    if (mode_name != "absolute" && mode_name != "relative")
        c.task.fail("error_mode", "expected absolute or relative");
    const double sigmas = c.task.number("sigma_tolerance", 5.0);
    c.ready();
    require_width(c.sys, 16, "statevector measurement");

    const HamiltonianSet hs = build_dual(*c.sys.grid, c.sys.nuclei, c.sys.truncated_D, c.sys.constant);
    const int n = hs.n_qubits();
    Statevector psi;
    if (state_kind == "reference") {
        psi = prepare_reference(*c.sys.grid, c.sys.eta).state;
    } else if (state_kind == "random") {
        psi = random_sector_state(n, c.sys.eta, CounterRng(c.seed).child(99).key());
    } else if (state_kind == "basis") {
        if (basis_index < 0 || basis_index >= (1 << n)) c.task.fail("basis_index", "outside the register");
        psi = Statevector::basis(n, static_cast<std::uint64_t>(basis_index));
    } else {
        c.task.fail("state", "expected reference, random or basis");
    }

    const ErrorMode mode = mode_name == "relative" ? ErrorMode::Relative : ErrorMode::Absolute;
    const EnergyEstimate est =
        estimate_energy(psi, hs, {strategy, static_cast<std::size_t>(shots), c.seed});
    const double exact = expectation(psi, build_qubit(hs));
    c.results["estimate"] = est.estimate;
    c.results["stderr"] = est.stderr_;
    c.results["shots"] = est.shots;
    c.results["strategy"] = to_string(strategy);
    c.results["analytic_budget"] = shot_budget(hs, c.sys.eta, target, mode, strategy);
    c.results["phase_estimation_budget"] =
        phase_estimation_budget(hs, c.sys.eta, mode == ErrorMode::Relative ? target * c.sys.eta : target);
    c.results["exact_expectation"] = exact;
    c.results["analytic_variance"] = analytic_variance(psi, hs, strategy);
    const double dev = std::abs(est.estimate - exact);
    const double allowed = std::max(sigmas * est.stderr_, 1e-9);
    c.checks.add("estimate within tolerance of the exact energy", dev <= allowed, dev,
                 fmt::format("<= max({} * stderr, 1e-9) = {:.6g}", sigmas, allowed));
}

void cmd_vqe_jellium(Context& c) {
    if (!c.sys.nuclei.empty()) throw ValidationError("system.nuclei: jellium has no nuclei");
    const int layers = c.task.integer("layers", 1);
    if (layers < 1) c.task.fail("layers", "must be at least 1");
    const std::string sharing = c.task.string("sharing", "full");
    if (sharing != "full" && sharing != "translation_invariant")
        c.task.fail("sharing", "expected full or translation_invariant");
    const bool minimal = c.task.boolean("minimal", false);
    const std::string training = c.task.string("training", "joint");
    if (training != "joint" && training != "layered") c.task.fail("training", "expected joint or layered");
    OptimizerConfig oc;
    oc.max_evaluations = c.task.integer("max_evaluations", oc.max_evaluations);
    oc.restarts = c.task.integer("restarts", oc.restarts);
    oc.initial_step = c.task.number("initial_step", oc.initial_step);
    oc.tolerance = c.task.number("tolerance", oc.tolerance);
    oc.seed = c.seed;
    if (oc.max_evaluations < 1) c.task.fail("max_evaluations", "must be positive");
    if (oc.restarts < 0) c.task.fail("restarts", "must be non-negative");
    if (minimal && layers != 1) c.task.fail("layers", "the minimal ansatz has exactly one layer");
    c.ready();
    require_width(c.sys, kDenseCap, "the statevector VQE");

    const ModeGrid& grid = *c.sys.grid;
    const HamiltonianSet hs = build_dual(grid, {}, c.sys.truncated_D, c.sys.constant);
    const ReferenceState ref = prepare_reference(grid, c.sys.eta);
    AnsatzSpec spec;
    spec.layers = layers;
    spec.sharing = sharing == "full" ? Sharing::Full : Sharing::TranslationInvariant;
    spec.minimal = minimal;
    const Ansatz ansatz(grid, spec);
    const OptimizeResult r =
        training == "layered" ? layer_train(ansatz, hs, ref.state, oc) : optimize(ansatz, hs, ref.state, oc);
    const int n = static_cast<int>(grid.n_qubits());
    const double e_exact = sector_ground_energy(build_qubit(hs), n, c.sys.eta);

    std::string csv = "evaluation,energy,best_energy\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i)
        csv += csv_line({std::to_string(i + 1), format_double(r.evaluated[i]), format_double(r.trace[i])});
    c.artifacts.push_back({"vqe_trace.csv", csv});
    c.results["E_ref"] = r.reference_energy;
    c.results["E_star"] = r.energy;
    c.results["E_exact"] = e_exact;
    const double gap = r.reference_energy - e_exact;
    c.results["gap_fraction_recovered"] = gap > 0.0 ? (r.reference_energy - r.energy) / gap : 0.0;
    c.results["parameters"] = ansatz.parameter_count();
    c.results["evaluations"] = r.evaluations;
    c.results["budget_exhausted"] = r.budget_exhausted;
    c.results["reference_kinetic_energy"] = ref.kinetic_energy;
    if (ref.degenerate_shell) c.results["warning"] = ref.warning;
    c.results["theta"] = r.theta;
    c.results["trace"] = r.trace;
    c.checks.add("E_exact <= E*", r.energy >= e_exact - 1e-9, r.energy - e_exact, ">= -1e-9");
    c.checks.add("E* <= E_ref", r.energy <= r.reference_energy + 1e-9, r.energy - r.reference_energy, "<= 1e-9");
}

using Handler = void (*)(Context&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
    static const std::vector<std::pair<std::string, Handler>> h = {
        {"build", cmd_build},           {"diagonalize", cmd_diagonalize}, {"trotter-sweep", cmd_trotter_sweep},
        {"ffft-check", cmd_ffft_check}, {"swapnet", cmd_swapnet},         {"lcu-check", cmd_lcu_check},
        {"measure", cmd_measure},       {"vqe-jellium", cmd_vqe_jellium},
    };
    return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, h] : handlers()) v.push_back(name);
        return v;
    }();
    return names;
}

CommandOutput run_command(const std::string& command, const Json& config) {
    const auto it = std::find_if(handlers().begin(), handlers().end(),
                                 [&](const auto& p) { return p.first == command; });
    if (it == handlers().end()) throw ValidationError("unknown command '" + command + "'");

    Section top(config, "");
    System sys = read_system(top);
    Section task = top.child("task");
    Section output = top.child("output");
    output.string("dir", "pwdual_out");
    output.finish();
    top.put("output", output.resolved());
    const int seed = top.integer("seed", 1);
    if (seed < 0) top.fail("seed", "must be non-negative");

    Context ctx{top, task, std::move(sys), static_cast<std::uint64_t>(seed), {}, Json::object(), {}};
    it->second(ctx);
    ctx.top.put("task", ctx.task.resolved());

    CommandOutput out;
    out.passed = ctx.checks.all;
    Json files = Json::array();
    for (const auto& a : ctx.artifacts) files.push_back(a.name);
    out.report = Json{{"command", command},         {"status", out.passed ? "pass" : "fail"},
                      {"config", ctx.top.resolved()}, {"assertions", ctx.checks.list},
                      {"results", ctx.results},      {"files", files}};
    out.artifacts = std::move(ctx.artifacts);
    return out;
}

}  // namespace pwcli
