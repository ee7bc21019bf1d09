#pragma once

// Command-line front end: crit, split, gysin, reduce, axioms.
// TOML configuration in (--config), JSON reports out (--out), tables on stdout.
// Exit codes: 0 pass, 1 a mathematical check failed, 2 usage or configuration error.

#include "gysinkit/filtered.hpp"
#include "gysinkit/gysin.hpp"
#include "gysinkit/io/json_io.hpp"
#include "gysinkit/quantum_algebra.hpp"
#include "gysinkit/superpotential.hpp"
#include "gysinkit/verify/oracles.hpp"
#include "gysinkit/version.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace gysinkit::cli {

using io::json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Hooks for tests: the spectral solver used by `axioms`.
struct Context {
    verify::SpectralSolver solver = verify::default_solver();
};

/// "p/q", an integer, or a plain decimal such as "0.25" (read exactly).
inline Rational parse_exact(const std::string& text)
{
    if (text.find('.') == std::string::npos) return parse_rational(text);
    const auto dot = text.find('.');
    std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
    bool neg = false;
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) {
        neg = whole[0] == '-';
        whole.erase(0, 1);
    }
    if (frac.empty() || frac.size() > 15 || whole.size() > 3) throw std::invalid_argument("not an exact decimal");
    for (char ch : whole + frac)
        if (ch < '0' || ch > '9') throw std::invalid_argument("not an exact decimal");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t num = (whole.empty() ? 0 : std::stoll(whole)) * den + std::stoll(frac);
    return Rational(neg ? -num : num, den);
}

inline Rational resolve_truncation(const std::string& flag)
{
    std::string text = flag;
    if (text.empty())
        if (const char* env = std::getenv("GYSINKIT_TRUNCATION")) text = env;
    if (text.empty()) return Rational(kDefaultTruncation);
    Rational n;
    try {
        n = parse_exact(text);
    } catch (const std::exception&) {
        throw ConfigError("truncation '" + text + "' is not a rational number");
    }
    if (n < Rational(1)) throw ConfigError("truncation must be >= 1");
    return n;
}

inline void require_positive(double v, const std::string& name)
{
    if (!(v > 0)) throw ConfigError(name + " must be positive");
}

inline json report_header(const std::string& command, const json& config, const Rational& truncation)
{
    return {{"command", command},
            {"tool_version", kVersion},
            {"config", config},
            {"config_hash", io::config_hash(config)},
            {"truncation", to_string(truncation)}};
}

inline void write_report(const json& report, const std::string& path)
{
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write report to '" + path + "'");
    f << report.dump(2) << '\n';
}

inline std::string fmt_complex(Complex z, int prec = 6)
{
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << (std::abs(z.real()) < 0.5e-6 ? 0.0 : z.real());
    const double im = std::abs(z.imag()) < 0.5e-6 ? 0.0 : z.imag();
    os << (im < 0 ? " - " : " + ") << std::abs(im) << "i";
    return os.str();
}

inline std::string fmt_scalar(const NovikovScalar& s)
{
    if (s.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : s.terms()) {
        if (!first) os << " + ";
        first = false;
        os << "(" << fmt_complex(t.coefficient, 4) << ")";
        if (t.exponent != Rational(0)) os << "T^" << to_string(t.exponent);
    }
    return os.str();
}

// ---------------------------------------------------------------------------

struct CritOptions {
    std::string family;
    int n = 0;
    std::string poly;
    int grid = 8;
    double newton_tol = 1e-12;
    int max_iter = 60;
    double dedupe = 1e-6;
    double nondeg_tol = 1e-8;
};

inline int cmd_crit(const CritOptions& o, const std::string& out_path, const Rational& truncation, std::ostream& out)
{
    if (o.family.empty() == o.poly.empty()) throw ConfigError("crit needs exactly one of --family or --poly");
    if (o.grid < 1 || o.max_iter < 1) throw ConfigError("grid density and max iterations must be >= 1");
    require_positive(o.newton_tol, "newton tolerance");
    require_positive(o.dedupe, "dedupe radius");
    require_positive(o.nondeg_tol, "nondegeneracy tolerance");

    SuperpotentialPoly w;
    json config = {{"grid", o.grid}, {"newton_tol", o.newton_tol}, {"max_iter", o.max_iter},
                   {"dedupe", o.dedupe}, {"nondeg_tol", o.nondeg_tol}};
    if (!o.family.empty()) {
        try {
            w = builtin(o.family, o.n);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        config["family"] = o.family;
        config["n"] = o.n;
    } else {
        w = io::poly_from_json(io::read_json_file(o.poly));
        config["poly"] = io::to_json(w);
    }
    CriticalSearchConfig cfg;
    cfg.grid_density = o.grid;
    cfg.newton_tol = o.newton_tol;
    cfg.max_iter = o.max_iter;
    cfg.dedupe_radius = o.dedupe;
    cfg.nondegeneracy_tol = o.nondeg_tol;
    const auto result = find_critical_points(w, cfg);

    json report = report_header("crit", config, truncation);
    report["superpotential"] = io::to_json(w);
    json pts = json::array();
    std::size_t nondeg = 0;
    for (const auto& p : result.points) {
        pts.push_back(io::to_json(p));
        if (p.nondegenerate) ++nondeg;
    }
    report["points"] = pts;
    report["nondegenerate_count"] = nondeg;
    report["search"] = {{"starts", result.starts},   {"converged", result.converged}, {"diverged", result.diverged},
                        {"stalled", result.stalled}, {"singular", result.singular}};
    report["passed"] = nondeg > 0;

    out << "critical points: " << result.points.size() << " (" << nondeg << " nondegenerate) from " << result.starts
        << " starts\n";
    out << std::left << std::setw(4) << "#" << std::setw(28) << "value" << std::setw(12) << "residual"
        << std::setw(12) << "|det H|"
        << "point\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const auto& p = result.points[i];
        std::ostringstream res, det;
        res << std::scientific << std::setprecision(2) << p.residual;
        det << std::scientific << std::setprecision(2) << std::abs(p.log_hessian_det);
        out << std::setw(4) << i << std::setw(28) << fmt_complex(p.critical_value) << std::setw(12) << res.str()
            << std::setw(12) << det.str();
        for (std::size_t j = 0; j < p.point.size(); ++j) out << (j ? ", " : "(") << fmt_complex(p.point[j], 4);
        out << ")" << (p.nondegenerate ? "" : "  degenerate") << "\n";
    }
    write_report(report, out_path);
    return nondeg > 0 ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct SplitOptions {
    int cpn = -1;
    std::int64_t lattice = 0; // 0: not given
    std::string presentation;
    double tol = 1e-9;
};

inline int cmd_split(const SplitOptions& o, const std::string& out_path, const Rational& truncation, std::ostream& out)
{
    if ((o.cpn >= 0) == !o.presentation.empty()) throw ConfigError("split needs exactly one of --cpn or --presentation");
    if (o.lattice < 0) throw ConfigError("lattice denominator must be >= 1");
    require_positive(o.tol, "tolerance");

    json config = {{"tol", o.tol}, {"lattice", o.lattice}};
    AlgebraPresentation pres = CyclicPresentation{};
    if (o.cpn >= 0) {
        if (o.cpn < 1) throw ConfigError("--cpn needs n >= 1");
        pres = CyclicPresentation{o.cpn + 1, Complex(1.0, 0.0), Rational(1)};
        config["cpn"] = o.cpn;
    } else {
        const json j = io::read_json_file(o.presentation);
        try {
            pres = io::presentation_from_json(j);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        config["presentation"] = j;
    }

    json report = report_header("split", config, truncation);
    IdempotentDecomposition dec;
    std::optional<AlgebraPresentation> used;
    try {
        if (const auto* c = std::get_if<CyclicPresentation>(&pres)) {
            const ExponentLattice lat(o.lattice == 0 ? 1 : o.lattice);
            dec = split_binomial(*c, lat, truncation);
            used = pres;
            report["presentation"] = {{"type", "cyclic"}, {"m", c->m}, {"c", io::to_json(c->c)},
                                      {"lambda", to_string(c->lambda)}};
        } else {
            const auto& t = std::get<TablePresentation>(pres);
            ExponentLattice lat = t.lattice();
            if (o.lattice > 0) lat = lat.join(ExponentLattice(o.lattice));
            TablePresentation::Products prod = t.products();
            for (auto& row : prod)
                for (auto& entry : row)
                    for (auto& s : entry) s = s.on_lattice(lat).truncated(truncation);
            const TablePresentation rebased(lat, std::move(prod));
            dec = split_table(rebased);
            used = AlgebraPresentation(rebased);
            report["presentation"] = {{"type", "table"}, {"dim", rebased.dim()}};
        }
    } catch (const LatticeMismatch& e) {
        throw ConfigError(e.what());
    } catch (const NonSemisimple& e) {
        report["error"] = e.what();
        report["passed"] = false;
        out << "split failed: " << e.what() << "\n";
        write_report(report, out_path);
        return kExitCheckFailed;
    }

    const auto ver = verify_decomposition(*used, dec, o.tol);
    report["lattice_denominator"] = dec.lattice.denominator();
    report["factor_count"] = dec.idempotents.size();
    json idems = json::array();
    for (std::size_t i = 0; i < dec.idempotents.size(); ++i)
        idems.push_back({{"coefficients", io::to_json(dec.idempotents[i])}, {"field", bool(dec.field_factor_flags[i])}});
    report["idempotents"] = idems;
    json orth = json::array();
    for (const auto& r : ver.orthogonality) orth.push_back({{"i", r.i}, {"j", r.j}, {"residual", r.residual}});
    report["verification"] = {{"unit_residual", ver.unit_residual},
                              {"idempotent_residuals", ver.idempotent_residuals},
                              {"orthogonality", orth},
                              {"checked_truncation", to_string(ver.checked_truncation)},
                              {"tolerance", ver.tolerance},
                              {"passed", ver.passed}};
    report["passed"] = ver.passed;

    out << "field factors over (1/" << dec.lattice.denominator() << ")Z: " << dec.idempotents.size() << "\n";
    for (std::size_t i = 0; i < dec.idempotents.size(); ++i) {
        out << "  e" << i << " =";
        for (std::size_t b = 0; b < dec.idempotents[i].size(); ++b)
            if (!dec.idempotents[i][b].is_zero()) out << "  [" << b << "] " << fmt_scalar(dec.idempotents[i][b]);
        out << "\n";
    }
    double worst = ver.unit_residual;
    for (double r : ver.idempotent_residuals) worst = std::max(worst, r);
    for (const auto& r : ver.orthogonality) worst = std::max(worst, r.residual);
    out << "max identity residual " << std::scientific << std::setprecision(2) << worst << " (tol " << o.tol
        << "): " << (ver.passed ? "pass" : "FAIL") << "\n";
    out << std::defaultfloat;
    write_report(report, out_path);
    return ver.passed ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct GysinOptions {
    std::string pair = "all";
    int n = 0;
    int euler = 0;
    std::string rho_lift;
    std::size_t samples = 20;
    int rank_sweep = 8;
    std::string weight;
    std::uint64_t seed = 7;
};

inline LocalSystem parse_local_system(const std::string& text)
{
    std::vector<Complex> z;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        try {
            if (comma == std::string::npos) z.emplace_back(std::stod(item), 0.0);
            else z.emplace_back(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError("malformed local system entry '" + item + "' (expected re,im)");
        }
    }
    try {
        return LocalSystem(std::move(z));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline std::vector<GysinPair> select_pairs(const std::string& name, int n)
{
    std::vector<GysinPair> out;
    if (name == "all") return builtin_pairs();
    if (name == "cpn") {
        const int m = n == 0 ? 2 : n;
        if (m < 2) throw ConfigError("pair cpn needs n >= 2");
        out.push_back({"cpn", m, builtin("clifford_cp", m - 1), builtin("clifford_cp", m), Rational(1, 2 * m)});
    } else if (name == "quadric") {
        const int m = n == 0 ? 3 : n;
        if (m < 3) throw ConfigError("pair quadric needs n >= 3");
        out.push_back({"quadric", m, builtin("gz_quadric", m - 1), builtin("gz_quadric", m), Rational(1, 2 * (m - 1))});
    } else if (name == "cp3_q2") {
        out.push_back({"cp3_q2", 0, builtin("chekanov_q2"), builtin("chekanov_cp3"), Rational(1, 2)});
    } else {
        throw ConfigError("unknown pair '" + name + "' (cpn, quadric, cp3_q2, all)");
    }
    return out;
}

inline int cmd_gysin(const GysinOptions& o, const std::string& out_path, const Rational& truncation, std::ostream& out)
{
    if (o.rank_sweep < 0 || o.rank_sweep > 16) throw ConfigError("rank sweep must be in 0..16");
    const auto pairs = select_pairs(o.pair, o.n);
    std::optional<Rational> weight_override;
    if (!o.weight.empty()) {
        try {
            weight_override = parse_exact(o.weight);
        } catch (const std::exception&) {
            throw ConfigError("weight '" + o.weight + "' is not rational");
        }
    }
    json config = {{"pair", o.pair}, {"n", o.n}, {"euler", o.euler}, {"rho_lift", o.rho_lift},
                   {"samples", o.samples}, {"rank_sweep", o.rank_sweep}, {"weight", o.weight}, {"seed", o.seed}};
    json report = report_header("gysin", config, truncation);
    bool ok = true;

    json sweep = json::array();
    for (int k = 0; k <= o.rank_sweep; ++k) {
        const auto r = verify_gysin_exactness(static_cast<std::size_t>(k), k <= 4);
        sweep.push_back({{"k", k}, {"exactness", r.per_degree()}, {"passed", r.passed}});
        ok = ok && r.passed;
    }
    report["rank_sweep"] = sweep;
    out << "rank identity sweep k = 0.." << o.rank_sweep << ": " << (ok ? "pass" : "FAIL") << "\n";

    json pair_reports = json::array();
    for (const auto& pair : pairs) {
        const Rational w = weight_override.value_or(Rational(2) * pair.kappa);
        json pr = {{"pair", pair.name}, {"n", pair.n}, {"kappa", to_string(pair.kappa)}, {"weight", to_string(w)}};
        const auto base_pts = find_critical_points(pair.base);
        if (base_pts.points.empty()) {
            pr["error"] = "no critical point of the base superpotential found";
            ok = false;
            pair_reports.push_back(pr);
            continue;
        }
        const TorusPearlComplex base = build_torus_complex(pair.base, base_pts.points.front().point, w, {}, truncation);
        out << "pair " << pair.name << (pair.n ? " n=" + std::to_string(pair.n) : "") << " (k=" << base.k
            << ", weight " << to_string(w) << ")\n";

        if (!o.rho_lift.empty()) {
            const LocalSystem rho = parse_local_system(o.rho_lift);
            if (rho.size() != pair.lifted.num_vars())
                throw ConfigError("--rho-lift has " + std::to_string(rho.size()) + " entries, expected " +
                                  std::to_string(pair.lifted.num_vars()));
            const auto lifted = build_lifted_complex(base, pair.lifted, rho, o.euler);
            const auto delta = connecting_class(pair.lifted, rho, o.euler, w, base.lattice, truncation);
            json entry = {{"k", base.k}, {"critical", lifted.critical}, {"connecting_class", io::to_json(delta)},
                          {"point", io::to_json(rho)}};
            if (lifted.critical) entry["exactness"] = verify_gysin_exactness(base, lifted).per_degree();
            else entry["exactness"] = json::array();
            pr["queried"] = entry;
            ok = ok && delta.vanishes();
            out << "  rho~ given: critical " << (lifted.critical ? "yes" : "no") << ", delta = " << delta.euler_part
                << " + " << fmt_scalar(delta.quantum_part) << (delta.vanishes() ? "  (zero)" : "  (nonzero)") << "\n";
            pair_reports.push_back(pr);
            continue;
        }

        const auto lifted_pts = find_critical_points(pair.lifted);
        json crit = json::array();
        std::size_t zero_count = 0;
        for (const auto& p : lifted_pts.points) {
            const auto lifted = build_lifted_complex(base, pair.lifted, p.point, o.euler);
            const auto delta = connecting_class(pair.lifted, p.point, o.euler, w, base.lattice, truncation);
            const auto res = chain_map_residuals(base, lifted);
            json entry = {{"k", base.k},
                          {"critical", lifted.critical},
                          {"point", io::to_json(p.point)},
                          {"connecting_class", io::to_json(delta)},
                          {"chain_map_residuals", {{"i", res.i_residual}, {"p", res.p_residual}}}};
            bool point_ok = lifted.critical && base.critical && res.i_exact_zero && res.p_exact_zero;
            if (lifted.critical && base.critical) {
                const auto ex = verify_gysin_exactness(base, lifted);
                entry["exactness"] = ex.per_degree();
                point_ok = point_ok && ex.passed;
            } else {
                entry["exactness"] = json::array();
            }
            point_ok = point_ok && delta.vanishes();
            if (delta.vanishes()) ++zero_count;
            entry["passed"] = point_ok;
            ok = ok && point_ok;
            crit.push_back(entry);
        }
        pr["critical_points"] = crit;
        out << "  critical lifted local systems: " << lifted_pts.points.size() << ", delta = 0 at " << zero_count
            << "\n";
        if (lifted_pts.points.empty()) ok = false;

        json samples = json::array();
        std::size_t nonzero = 0;
        for (const auto& rho : sample_local_systems(pair.lifted.num_vars(), o.samples, o.seed)) {
            const auto delta = connecting_class(pair.lifted, rho, o.euler, w, base.lattice, truncation);
            const auto lifted = build_lifted_complex(base, pair.lifted, rho, o.euler);
            samples.push_back({{"point", io::to_json(rho)}, {"critical", lifted.critical},
                               {"connecting_class", io::to_json(delta)}});
            if (!delta.vanishes()) ++nonzero;
        }
        pr["noncritical_samples"] = samples;
        if (o.samples > 0) {
            out << "  sampled non-critical local systems: " << o.samples << ", delta != 0 at " << nonzero << "\n";
            ok = ok && nonzero == o.samples;
        }
        pair_reports.push_back(pr);
    }
    report["pairs"] = pair_reports;
    report["passed"] = ok;
    out << (ok ? "all Gysin checks pass" : "Gysin checks FAILED") << "\n";
    write_report(report, out_path);
    return ok ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct ReduceOptions {
    std::string pair;
    int n = 0;
    std::string kappa;
    double epsilon = 0.1;
    double f_min = -1.0;
    double f_max = 1.0;
    std::size_t kmax = 1000;
    int base_n = 2;
    double tol = 1e-6;
};

inline int cmd_reduce(const ReduceOptions& o, const std::string& out_path, const Rational& truncation,
                      std::ostream& out)
{
    if (o.pair.empty() == o.kappa.empty()) throw ConfigError("reduce needs exactly one of --pair or --kappa");
    std::optional<Rational> kappa_exact;
    double kappa = 0.0;
    if (!o.pair.empty()) {
        if (o.pair == "cpn") {
            if (o.n < 1) throw ConfigError("pair cpn needs n >= 1");
            kappa_exact = Rational(1, 2 * o.n);
        } else if (o.pair == "quadric") {
            if (o.n < 2) throw ConfigError("pair quadric needs n >= 2");
            kappa_exact = Rational(1, 2 * (o.n - 1));
        } else if (o.pair == "cp3_q2") {
            kappa_exact = Rational(1, 2);
        } else {
            throw ConfigError("unknown pair '" + o.pair + "' (cpn, quadric, cp3_q2)");
        }
    } else {
        try {
            kappa_exact = parse_exact(o.kappa);
        } catch (const std::exception&) {
            try {
                kappa = std::stod(o.kappa);
            } catch (const std::exception&) {
                throw ConfigError("kappa '" + o.kappa + "' is not a number");
            }
        }
    }
    if (kappa_exact) kappa = to_double(*kappa_exact);
    if (!(kappa > 0)) throw ConfigError("kappa must be positive");
    if (o.kmax < 1) throw ConfigError("kmax must be >= 1");
    if (o.base_n < 1 || o.base_n > 6) throw ConfigError("base-n must be in 1..6");
    require_positive(o.tol, "tolerance");
    TransferParams p{kappa, o.epsilon, o.f_min, o.f_max};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    json config = {{"pair", o.pair}, {"n", o.n},           {"kappa", o.kappa}, {"epsilon", o.epsilon},
                   {"f_min", o.f_min}, {"f_max", o.f_max}, {"kmax", o.kmax},   {"base_n", o.base_n},
                   {"tol", o.tol}};
    json report = report_header("reduce", config, truncation);
    report["kappa"] = kappa_exact ? json(to_string(*kappa_exact)) : json(kappa);
    if (kappa_exact) report["reduction_constant_exact"] = to_string(reduction_constant(*kappa_exact));
    report["reduction_constant"] = p.h_r0();
    report["r0"] = p.r0();
    report["h_r0"] = p.h_r0();
    report["eps_prime"] = p.eps_prime();

    out << "kappa              " << (kappa_exact ? to_string(*kappa_exact) : std::to_string(kappa)) << "\n";
    out << "reduction constant " << (kappa_exact ? to_string(reduction_constant(*kappa_exact)) + " = " : "")
        << std::setprecision(12) << p.h_r0() << "\n";
    out << "r0                 " << p.r0() << "\n";
    out << "eps'               " << p.eps_prime() << "\n";

    const Rational w = kappa_exact ? Rational(2) * *kappa_exact : Rational(1);
    const auto w_base = builtin("clifford_cp", o.base_n);
    const LocalSystem ones(std::vector<Complex>(static_cast<std::size_t>(o.base_n), Complex(1.0, 0.0)));
    const TorusPearlComplex pc = build_torus_complex(w_base, ones, w, {}, truncation);
    const auto run = run_reduction_pipeline(pc, p, o.kmax, 1.0, 0.25, o.tol);

    bool transfer_ok = true;
    json transfer = json::array();
    for (const auto& t : run.transfer) {
        transfer.push_back({{"class", t.id},
                            {"base", t.base},
                            {"lifted", t.lifted},
                            {"window", {t.window.lo, t.window.hi}},
                            {"inside", t.inside}});
        transfer_ok = transfer_ok && t.inside;
    }
    const auto& id = run.identity;
    report["transfer"] = transfer;
    report["identity"] = {{"bounded_difference", id.bounded_difference},
                          {"max_difference", id.max_difference},
                          {"const_bound", id.const_bound},
                          {"violations", id.violations.size()},
                          {"homogenized_sigma", id.sigma ? json(id.sigma->estimate) : json(nullptr)},
                          {"homogenized_x", id.x ? json(id.x->estimate) : json(nullptr)},
                          {"homogenized_difference", id.sigma && id.x ? json(id.homogenized_difference) : json(nullptr)},
                          {"error", id.error},
                          {"passed", id.passed}};
    const bool ok = transfer_ok && id.passed;
    report["passed"] = ok;

    out << "transfer windows   " << run.transfer.size() << " classes, " << (transfer_ok ? "all inside" : "VIOLATED")
        << "\n";
    out << "bounded difference max " << id.max_difference << " <= " << id.const_bound << ": "
        << (id.bounded_difference ? "pass" : "FAIL") << "\n";
    if (id.sigma && id.x)
        out << "homogenized        cbar_X = " << id.x->estimate << ", r * cbar_Sigma = " << p.h_r0() * id.sigma->estimate
            << ", diff " << std::scientific << id.homogenized_difference << std::defaultfloat << "\n";
    else
        out << "homogenization failed: " << id.error << "\n";
    write_report(report, out_path);
    return ok ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

struct AxiomsOptions {
    long long seeds = 200;
    long long instances = 50;
    std::uint64_t base_seed = 1;
    double cap = 8.0;
};

inline int cmd_axioms(const AxiomsOptions& o, const std::string& out_path, const Rational& truncation,
                      std::ostream& out, const Context& ctx)
{
    if (o.seeds < 1) throw ConfigError("--seeds must be >= 1");
    if (o.instances < 0) throw ConfigError("--instances must be >= 0");
    require_positive(o.cap, "oracle level cap");
    verify::AxiomSuiteConfig cfg;
    cfg.seeds = static_cast<std::size_t>(o.seeds);
    cfg.axiom_instances = static_cast<std::size_t>(o.instances);
    cfg.base_seed = o.base_seed;
    cfg.oracle.level_cap = o.cap;
    const auto rep = verify::run_axiom_suite(cfg, ctx.solver);

    json config = {{"seeds", o.seeds}, {"instances", o.instances}, {"base_seed", o.base_seed}, {"cap", o.cap}};
    json report = report_header("axioms", config, truncation);
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"failed", c.failed}, {"failures", c.failures}});
        out << std::left << std::setw(24) << c.name << c.passed << " passed, " << c.failed << " failed\n";
        for (const auto& f : c.failures) out << "    " << f << "\n";
    }
    report["checks"] = checks;
    report["passed"] = rep.passed();
    write_report(report, out_path);
    return rep.passed() ? kExitPass : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Context& ctx = {})
{
    CLI::App app{"gysinkit: Novikov fields, superpotentials, quantum splittings, Gysin maps and spectral transfer"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "TOML configuration file");
    app.require_subcommand(1);
    std::string out_path, truncation_text;
    app.add_option("--out", out_path, "write the JSON report here");
    app.add_option("--truncation", truncation_text, "Novikov truncation order (default: $GYSINKIT_TRUNCATION or 10)");

    CritOptions crit;
    auto* c = app.add_subcommand("crit", "critical points of a superpotential");
    c->add_option("--family", crit.family, "clifford_cp, gz_quadric, chekanov_q2, chekanov_cp3");
    c->add_option("--n", crit.n, "family parameter");
    c->add_option("--poly", crit.poly, "superpotential JSON file");
    c->add_option("--grid", crit.grid, "arguments per variable in the start grid");
    c->add_option("--newton-tol", crit.newton_tol);
    c->add_option("--max-iter", crit.max_iter);
    c->add_option("--dedupe", crit.dedupe, "dedupe radius in log coordinates");
    c->add_option("--nondeg-tol", crit.nondeg_tol);

    SplitOptions split;
    auto* s = app.add_subcommand("split", "split a quantum algebra into field factors");
    s->add_option("--cpn", split.cpn, "use QH(CP^n): h^(n+1) = T");
    s->add_option("--lattice", split.lattice, "exponent lattice denominator d");
    s->add_option("--presentation", split.presentation, "presentation JSON file (cyclic or table)");
    s->add_option("--tol", split.tol);

    GysinOptions gys;
    auto* g = app.add_subcommand("gysin", "Gysin exactness and connecting class");
    g->add_option("--pair", gys.pair, "cpn, quadric, cp3_q2 or all");
    g->add_option("--n", gys.n);
    g->add_option("--euler", gys.euler, "Euler number of the circle bundle over the torus");
    g->add_option("--rho-lift", gys.rho_lift, "lifted local system, 're,im;re,im;...'");
    g->add_option("--samples", gys.samples, "non-critical samples per pair");
    g->add_option("--rank-sweep", gys.rank_sweep, "check the rank identity for k = 0..K");
    g->add_option("--weight", gys.weight, "pearl weight w (default 2 kappa)");
    g->add_option("--seed", gys.seed);

    ReduceOptions red;
    auto* r = app.add_subcommand("reduce", "reduction constant and the end-to-end reduction identity");
    r->add_option("--pair", red.pair, "cpn, quadric or cp3_q2");
    r->add_option("--n", red.n);
    r->add_option("--kappa", red.kappa, "monotonicity constant (p/q or decimal)");
    r->add_option("--epsilon", red.epsilon);
    r->add_option("--f-min", red.f_min);
    r->add_option("--f-max", red.f_max);
    r->add_option("--kmax", red.kmax, "iterations for homogenization");
    r->add_option("--base-n", red.base_n, "rank of the Clifford base torus");
    r->add_option("--tol", red.tol);

    AxiomsOptions ax;
    auto* a = app.add_subcommand("axioms", "spectral-number property suites");
    a->add_option("--seeds", ax.seeds, "random complexes for the oracle comparison");
    a->add_option("--instances", ax.instances, "instances for each axiom check");
    a->add_option("--base-seed", ax.base_seed);
    a->add_option("--cap", ax.cap, "oracle level cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        const Rational truncation = resolve_truncation(truncation_text);
        if (c->parsed()) return cmd_crit(crit, out_path, truncation, out);
        if (s->parsed()) return cmd_split(split, out_path, truncation, out);
        if (g->parsed()) return cmd_gysin(gys, out_path, truncation, out);
        if (r->parsed()) return cmd_reduce(red, out_path, truncation, out);
        if (a->parsed()) return cmd_axioms(ax, out_path, truncation, out, ctx);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const io::FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

} // namespace gysinkit::cli
