#pragma once

// Independent checks for spectral numbers.
//
// coset_oracle searches the coset x + im D directly. Writing y = sum_e y_{g,e} T^e
// over a finite exponent window, "some representative has level >= tau" is the
// linear condition that every coefficient of x + D y at a level below tau
// vanishes. Those conditions are added in increasing level order; the level of
// the first one that makes the system inconsistent is the spectral number.
// The window bound is a harness bound, generous for the random family below.

#include "gysinkit/filtered.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace gysinkit::verify {

struct CosetOracleOptions {
    double level_cap = 8.0;    // search stops here; nullopt means "no obstruction below the cap"
    double zero_tol = 1e-9;
};

inline std::optional<double> coset_oracle(const FilteredComplex& c, const Chain& x, const CosetOracleOptions& opt = {})
{
    c.check_chain(x);
    const double start = chain_level(c, x);
    if (std::isinf(start)) return std::nullopt;
    const std::int64_t den = c.lattice().denominator();
    const std::size_t n = c.size();
    const auto& d = c.differential();

    double min_a = std::numeric_limits<double>::infinity(), max_a = -min_a;
    for (const auto& g : c.generators()) {
        min_a = std::min(min_a, g.action);
        max_a = std::max(max_a, g.action);
    }
    double lam_min = 0.0, lam_max = 0.0;
    std::vector<std::size_t> sources;
    double cap = opt.level_cap;
    for (std::size_t g = 0; g < n; ++g) {
        bool src = false;
        for (std::size_t h = 0; h < n; ++h) {
            if (d[h][g].is_zero()) continue;
            src = true;
            for (const auto& t : d[h][g].terms()) {
                lam_min = std::min(lam_min, to_double(t.exponent));
                lam_max = std::max(lam_max, to_double(t.exponent));
            }
            cap = std::min(cap, c.generators()[h].action + to_double(d[h][g].truncation()));
        }
        if (src) sources.push_back(g);
    }
    for (std::size_t i = 0; i < n; ++i) cap = std::min(cap, c.generators()[i].action + to_double(x[i].truncation()));

    const double spread = max_a - min_a;
    const double lo = start - max_a - lam_max -
                      static_cast<double>(sources.size()) * (lam_max - lam_min + spread) - 2.0;
    const double hi = cap - min_a - lam_min + 1.0;
    const auto e_lo = static_cast<std::int64_t>(std::floor(lo * static_cast<double>(den)));
    const auto e_hi = static_cast<std::int64_t>(std::ceil(hi * static_cast<double>(den)));

    // Columns: (source, exponent numerator). Rows: (target, exponent numerator).
    std::map<std::pair<std::size_t, std::int64_t>, std::size_t> col_index;
    for (std::size_t s = 0; s < sources.size(); ++s)
        for (std::int64_t e = e_lo; e <= e_hi; ++e) col_index[{sources[s], e}] = col_index.size();
    const auto ncols = static_cast<Eigen::Index>(col_index.size());

    struct Row {
        double level;
        std::size_t h;
        std::int64_t s;
        Eigen::VectorXcd a;
        Complex b;
    };
    std::map<std::pair<std::size_t, std::int64_t>, Row> rows;
    auto row_at = [&](std::size_t h, std::int64_t s) -> Row* {
        const double level = c.generators()[h].action + to_double(Rational(s, den));
        if (!(level < cap)) return nullptr;
        auto it = rows.find({h, s});
        if (it == rows.end())
            it = rows.emplace(std::make_pair(h, s), Row{level, h, s, Eigen::VectorXcd::Zero(ncols), Complex(0.0, 0.0)})
                     .first;
        return &it->second;
    };
    for (std::size_t h = 0; h < n; ++h)
        for (const auto& t : x[h].terms()) {
            const Rational scaled = t.exponent * Rational(den);
            if (Row* r = row_at(h, scaled.numerator())) r->b -= t.coefficient;
        }
    for (const auto& [key, col] : col_index) {
        const auto [g, e] = key;
        for (std::size_t h = 0; h < n; ++h)
            for (const auto& t : d[h][g].terms()) {
                const std::int64_t s = e + (t.exponent * Rational(den)).numerator();
                if (Row* r = row_at(h, s)) r->a(static_cast<Eigen::Index>(col)) += t.coefficient;
            }
    }
    std::vector<Row*> order;
    for (auto& [k, r] : rows) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const Row* p, const Row* q) { return p->level < q->level; });

    // Incremental row echelon of [A | b].
    struct Basis {
        Eigen::Index pivot;
        Eigen::VectorXcd a;
        Complex b;
    };
    std::vector<Basis> basis;
    for (Row* r : order) {
        Eigen::VectorXcd a = r->a;
        Complex b = r->b;
        for (const auto& bv : basis) {
            const Complex f = a(bv.pivot);
            if (f == Complex(0.0, 0.0)) continue;
            a -= f * bv.a;
            b -= f * bv.b;
        }
        Eigen::Index piv = 0;
        const double m = ncols > 0 ? a.cwiseAbs().maxCoeff(&piv) : 0.0;
        if (m <= opt.zero_tol) {
            if (std::abs(b) > opt.zero_tol) return r->level;
            continue;
        }
        const Complex inv = 1.0 / a(piv);
        basis.push_back({piv, a * inv, b * inv});
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Seeded random family: degree-0 generators mapping to degree-1 generators,
// actions in (1/4)Z cap [0, 3], entries +-T^lambda with lambda in (1/4)Z cap [-2, 2].

inline constexpr std::int64_t kRandomLattice = 4;
inline constexpr std::int64_t kRandomTruncation = 20;

struct RandomInstance {
    FilteredComplex complex;
    Chain cls;
};

inline double quarter(std::mt19937_64& rng, int lo_q, int hi_q)
{
    return std::uniform_int_distribution<int>(lo_q, hi_q)(rng) / 4.0;
}

inline RandomInstance random_instance(std::mt19937_64& rng, std::size_t max_generators = 8)
{
    const ExponentLattice lat(kRandomLattice);
    const Rational N(kRandomTruncation);
    const std::size_t total = std::uniform_int_distribution<std::size_t>(2, max_generators)(rng);
    const std::size_t n0 = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(3, total - 1))(rng);
    std::vector<Generator> gens;
    for (std::size_t i = 0; i < total; ++i) {
        const int deg = i < n0 ? 0 : 1;
        gens.push_back({(deg == 0 ? "a" : "b") + std::to_string(i), deg, quarter(rng, 0, 12)});
    }
    std::bernoulli_distribution coin(0.5);
    std::vector<DifferentialEntry> d;
    for (std::size_t g = 0; g < n0; ++g)
        for (std::size_t h = n0; h < total; ++h) {
            if (!coin(rng)) continue;
            std::vector<int> allowed;
            for (int q = -8; q <= 8; ++q)
                if (gens[h].action + q / 4.0 > gens[g].action) allowed.push_back(q);
            if (allowed.empty()) continue;
            const int q = allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
            const double sign = coin(rng) ? 1.0 : -1.0;
            d.push_back({g, h, NovikovScalar::monomial(sign, Rational(q, 4), lat, N)});
        }
    FilteredComplex cx(gens, lat, N, d);
    Chain x(total, NovikovScalar::zero(lat, N));
    bool any = false;
    while (!any) {
        for (std::size_t h = n0; h < total; ++h) {
            if (!coin(rng)) continue;
            const int q = std::uniform_int_distribution<int>(-8, 8)(rng);
            x[h] = NovikovScalar::monomial(coin(rng) ? 1.0 : -1.0, Rational(q, 4), lat, N);
            any = true;
        }
    }
    return {std::move(cx), std::move(x)};
}

/// Zero differential, all actions 0, a random class with up to 3 terms per coefficient.
inline RandomInstance random_valuation_instance(std::mt19937_64& rng)
{
    const ExponentLattice lat(kRandomLattice);
    const Rational N(kRandomTruncation);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
    std::vector<Generator> gens;
    for (std::size_t i = 0; i < n; ++i) gens.push_back({"g" + std::to_string(i), 0, 0.0});
    FilteredComplex cx(gens, lat, N, {});
    Chain x(n, NovikovScalar::zero(lat, N));
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    bool any = false;
    while (!any) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<NovikovTerm> terms;
            const int count = std::uniform_int_distribution<int>(0, 3)(rng);
            for (int t = 0; t < count; ++t)
                terms.push_back({Rational(std::uniform_int_distribution<int>(-12, 12)(rng), 4),
                                 Complex(coef(rng), coef(rng))});
            x[i] = NovikovScalar(lat, N, std::move(terms));
            any = any || !x[i].is_zero();
        }
    }
    return {std::move(cx), std::move(x)};
}

// ---------------------------------------------------------------------------
// Axiom suite.

using SpectralSolver = std::function<double(const FilteredComplex&, const Chain&)>;

inline SpectralSolver default_solver()
{
    return [](const FilteredComplex& c, const Chain& x) { return spectral_number(c, x); };
}

struct AxiomSuiteConfig {
    std::size_t seeds = 200;
    std::size_t axiom_instances = 50;
    std::uint64_t base_seed = 1;
    CosetOracleOptions oracle{};
};

struct AxiomCheck {
    std::string name;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::vector<std::string> failures; // first few, for the report
};

struct AxiomSuiteReport {
    std::vector<AxiomCheck> checks;
    [[nodiscard]] std::size_t total_failed() const
    {
        std::size_t f = 0;
        for (const auto& c : checks) f += c.failed;
        return f;
    }
    [[nodiscard]] bool passed() const { return total_failed() == 0; }
};

namespace detail {
inline void record(AxiomCheck& check, bool ok, const std::string& what)
{
    if (ok) {
        ++check.passed;
        return;
    }
    ++check.failed;
    if (check.failures.size() < 5) check.failures.push_back(what);
}

inline std::string fmt(double v) { return std::isinf(v) ? "inf" : std::to_string(v); }
} // namespace detail

/// Oracle equivalence on `seeds` random complexes, then the valuation axiom,
/// Novikov shift and extension invariance on `axiom_instances` instances each.
inline AxiomSuiteReport run_axiom_suite(const AxiomSuiteConfig& cfg, const SpectralSolver& solver = default_solver())
{
    if (cfg.seeds == 0) throw std::invalid_argument("seed count must be positive");
    AxiomSuiteReport rep;
    AxiomCheck oracle{"oracle_equivalence", 0, 0, {}}, valuation{"valuation_axiom", 0, 0, {}},
        shift{"novikov_shift", 0, 0, {}}, extension{"extension_invariance", 0, 0, {}};

    auto solve = [&](const FilteredComplex& c, const Chain& x) -> std::optional<double> {
        try {
            return solver(c, x);
        } catch (const ZeroClass&) {
            return std::nullopt;
        }
    };

    for (std::size_t s = 0; s < cfg.seeds; ++s) {
        std::mt19937_64 rng(cfg.base_seed + s);
        const auto inst = random_instance(rng);
        const std::string tag = "seed " + std::to_string(cfg.base_seed + s);
        try {
            const auto got = solve(inst.complex, inst.cls);
            const auto want = coset_oracle(inst.complex, inst.cls, cfg.oracle);
            bool ok;
            if (want) ok = got && *got == *want;
            else ok = !got || *got >= cfg.oracle.level_cap;
            detail::record(oracle, ok,
                           tag + ": reduction " + (got ? detail::fmt(*got) : "zero") + ", oracle " +
                               (want ? detail::fmt(*want) : "none below cap"));
        } catch (const std::exception& e) {
            detail::record(oracle, false, tag + ": " + e.what());
        }
    }

    for (std::size_t s = 0; s < cfg.axiom_instances; ++s) {
        std::mt19937_64 rng(cfg.base_seed + 1000003 + s);
        const std::string tag = "instance " + std::to_string(s);
        try {
            const auto inst = random_valuation_instance(rng);
            std::optional<Rational> nu;
            for (const auto& c : inst.cls)
                if (!c.is_zero() && (!nu || *c.valuation() < *nu)) nu = *c.valuation();
            const auto got = solve(inst.complex, inst.cls);
            detail::record(valuation, got && *got == to_double(*nu),
                           tag + ": got " + (got ? detail::fmt(*got) : "zero") + ", nu " + to_string(*nu));

            const Rational lam(std::uniform_int_distribution<int>(-8, 8)(rng), 4);
            const auto base = random_instance(rng);
            Chain moved = base.cls;
            for (auto& c : moved) c = c.shifted(lam);
            const auto c0 = solve(base.complex, base.cls);
            const auto c1 = solve(base.complex, moved);
            const bool shift_ok = (!c0 && !c1) || (c0 && c1 && *c1 == *c0 + to_double(lam));
            detail::record(shift, shift_ok,
                           tag + ": c(x) " + (c0 ? detail::fmt(*c0) : "zero") + ", c(T^" + to_string(lam) + " x) " +
                               (c1 ? detail::fmt(*c1) : "zero"));

            std::vector<Generator> gens = base.complex.generators();
            gens.push_back({"extra", 7, quarter(rng, 0, 16)});
            const FilteredComplex bigger(gens, base.complex.lattice(), base.complex.truncation(),
                                         base.complex.entries());
            Chain padded = base.cls;
            padded.push_back(NovikovScalar::zero(base.complex.lattice(), base.complex.truncation()));
            const auto c2 = solve(bigger, padded);
            detail::record(extension, (!c0 && !c2) || (c0 && c2 && *c0 == *c2),
                           tag + ": before " + (c0 ? detail::fmt(*c0) : "zero") + ", after " +
                               (c2 ? detail::fmt(*c2) : "zero"));
        } catch (const std::exception& e) {
            detail::record(valuation, false, tag + ": " + e.what());
        }
    }
    rep.checks = {oracle, valuation, shift, extension};
    return rep;
}

} // namespace gysinkit::verify
