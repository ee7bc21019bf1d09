#pragma once

// Filtered complexes over a Novikov lattice field and their spectral numbers.
//
// Convention. The level of a chain x = sum x_i g_i is
//     level(x) = min_i (action(g_i) + nu(x_i)),
// so T^lambda raises the level by lambda and a zero-differential complex with
// all actions 0 has level(x) = nu(x). The differential may only raise levels:
// an entry D from g to h needs action(h) + nu(D) > action(g). The filtration
// F^tau = {level >= tau} is then a subcomplex, and the spectral number of a
// class is the best level among its representatives,
//     c([x]) = sup { level(x + D y) }.
// It is computed by reducing x against a pivot-reduced basis of im D.

#include "gysinkit/coeff_fields.hpp"
#include "gysinkit/gysin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gysinkit {

class NotACycle : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ZeroClass : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IndeterminateClass : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SubadditivityViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Generator {
    std::string id;
    int degree = 0;
    double action = 0.0;
};

struct DifferentialEntry {
    std::size_t from = 0;
    std::size_t to = 0;
    NovikovScalar value;
};

using Chain = std::vector<NovikovScalar>;

inline constexpr double kChopTolerance = 1e-9;

class FilteredComplex {
public:
    FilteredComplex(std::vector<Generator> generators, ExponentLattice lattice, Rational truncation,
                    const std::vector<DifferentialEntry>& differential, double tol = kChopTolerance)
        : generators_(std::move(generators)), lattice_(lattice), truncation_(truncation)
    {
        const std::size_t n = generators_.size();
        std::set<std::string> ids;
        for (const auto& g : generators_)
            if (!ids.insert(g.id).second) throw std::invalid_argument("duplicate generator id '" + g.id + "'");
        d_.assign(n, std::vector<NovikovScalar>(n, NovikovScalar::zero(lattice_, truncation_)));
        for (const auto& e : differential) {
            if (e.from >= n || e.to >= n) throw std::invalid_argument("differential entry refers to a missing generator");
            if (!(e.value.lattice() == lattice_)) throw LatticeMismatch("differential entry off the complex lattice");
            if (e.value.is_zero()) continue;
            const auto& g = generators_[e.from];
            const auto& h = generators_[e.to];
            if (h.degree != g.degree + 1)
                throw std::invalid_argument("differential entry " + g.id + " -> " + h.id + " must raise degree by one");
            if (!(h.action + to_double(*e.value.valuation()) > g.action))
                throw std::invalid_argument("differential entry " + g.id + " -> " + h.id + " does not raise the level");
            d_[e.to][e.from] += e.value;
        }
        // d^2 = 0 up to truncation.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                NovikovScalar s = NovikovScalar::zero(lattice_, truncation_);
                for (std::size_t l = 0; l < n; ++l)
                    if (!d_[i][l].is_zero() && !d_[l][j].is_zero()) s += d_[i][l] * d_[l][j];
                if (s.max_abs_coefficient() > tol) throw std::invalid_argument("differential does not square to zero");
            }
    }

    [[nodiscard]] std::size_t size() const { return generators_.size(); }
    [[nodiscard]] const std::vector<Generator>& generators() const { return generators_; }
    [[nodiscard]] const ExponentLattice& lattice() const { return lattice_; }
    [[nodiscard]] const Rational& truncation() const { return truncation_; }
    /// d[to][from]
    [[nodiscard]] const std::vector<std::vector<NovikovScalar>>& differential() const { return d_; }

    [[nodiscard]] std::vector<DifferentialEntry> entries() const
    {
        std::vector<DifferentialEntry> out;
        for (std::size_t h = 0; h < size(); ++h)
            for (std::size_t g = 0; g < size(); ++g)
                if (!d_[h][g].is_zero()) out.push_back({g, h, d_[h][g]});
        return out;
    }

    [[nodiscard]] bool has_zero_differential() const
    {
        for (const auto& row : d_)
            for (const auto& s : row)
                if (!s.is_zero()) return false;
        return true;
    }

    [[nodiscard]] std::optional<std::size_t> index_of(const std::string& id) const
    {
        for (std::size_t i = 0; i < size(); ++i)
            if (generators_[i].id == id) return i;
        return std::nullopt;
    }

    [[nodiscard]] Chain apply(const Chain& x) const
    {
        check_chain(x);
        Chain out(size(), NovikovScalar::zero(lattice_, truncation_));
        for (std::size_t h = 0; h < size(); ++h)
            for (std::size_t g = 0; g < size(); ++g)
                if (!d_[h][g].is_zero() && !x[g].is_zero()) out[h] += d_[h][g] * x[g];
        return out;
    }

    /// Single-generator chain c * g_i.
    [[nodiscard]] Chain basis_chain(std::size_t i, const NovikovScalar& c) const
    {
        Chain x(size(), NovikovScalar::zero(lattice_, c.truncation()));
        x.at(i) = c;
        return x;
    }

    void check_chain(const Chain& x) const
    {
        if (x.size() != size()) throw DimensionMismatch("chain length does not match the number of generators");
        for (const auto& s : x)
            if (!(s.lattice() == lattice_)) throw LatticeMismatch("chain coefficient off the complex lattice");
    }

private:
    std::vector<Generator> generators_;
    ExponentLattice lattice_;
    Rational truncation_;
    std::vector<std::vector<NovikovScalar>> d_;
};

/// Level of a chain; +infinity for the zero chain.
inline double chain_level(const FilteredComplex& c, const Chain& x)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!x[i].is_zero()) best = std::min(best, c.generators()[i].action + to_double(*x[i].valuation()));
    return best;
}

namespace detail {

struct PivotVector {
    std::size_t pivot;
    Chain v;
};

inline double coord_level(const FilteredComplex& c, const Chain& v, std::size_t i)
{
    return v[i].is_zero() ? std::numeric_limits<double>::infinity()
                          : c.generators()[i].action + to_double(*v[i].valuation());
}

inline std::optional<std::size_t> min_level_coordinate(const FilteredComplex& c, const Chain& v)
{
    std::optional<std::size_t> best;
    double lv = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double l = coord_level(c, v, i);
        if (l < lv) {
            lv = l;
            best = i;
        }
    }
    return best;
}

inline void chop(Chain& v, double tol)
{
    for (auto& s : v) s = s.chopped(tol);
}

/// v <- v - f * b, with coordinate `zero_at` forced to exactly zero.
inline void eliminate(Chain& v, const Chain& b, const NovikovScalar& f, std::size_t zero_at, double tol)
{
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!b[i].is_zero()) v[i] = v[i] - f * b[i];
    v[zero_at] = NovikovScalar::zero(v[zero_at].lattice(), v[zero_at].truncation());
    chop(v, tol);
}

/// Basis of im D in which every vector attains its level at its pivot and
/// vanishes at all other pivots. Such a basis is orthogonal for the level.
inline std::vector<PivotVector> reduced_image_basis(const FilteredComplex& c, double tol)
{
    std::vector<PivotVector> basis;
    const auto& d = c.differential();
    for (std::size_t g = 0; g < c.size(); ++g) {
        Chain v(c.size());
        bool any = false;
        for (std::size_t h = 0; h < c.size(); ++h) {
            v[h] = d[h][g];
            any = any || !v[h].is_zero();
        }
        if (!any) continue;
        for (const auto& b : basis)
            if (!v[b.pivot].is_zero()) eliminate(v, b.v, v[b.pivot] / b.v[b.pivot], b.pivot, tol);
        const auto p = min_level_coordinate(c, v);
        if (!p) continue;
        for (auto& b : basis)
            if (!b.v[*p].is_zero()) eliminate(b.v, v, b.v[*p] / v[*p], *p, tol);
        basis.push_back({*p, std::move(v)});
    }
    return basis;
}

} // namespace detail

struct SpectralOptions {
    double chop_tolerance = kChopTolerance;
    bool check_cycle = true;
};

/// Spectral number of the class of the cycle x.
/// Throws NotACycle, ZeroClass (x is a boundary up to truncation) or
/// IndeterminateClass (the answer lies beyond the available precision).
inline double spectral_number(const FilteredComplex& c, const Chain& x, const SpectralOptions& opt = {})
{
    c.check_chain(x);
    if (opt.check_cycle) {
        const Chain dx = c.apply(x);
        for (const auto& s : dx)
            if (s.max_abs_coefficient() > opt.chop_tolerance) throw NotACycle("chain is not a cycle");
    }
    Chain r = x;
    const auto basis = detail::reduced_image_basis(c, opt.chop_tolerance);
    for (const auto& b : basis)
        if (!r[b.pivot].is_zero()) detail::eliminate(r, b.v, r[b.pivot] / b.v[b.pivot], b.pivot, opt.chop_tolerance);

    double horizon = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.size(); ++i)
        horizon = std::min(horizon, c.generators()[i].action + to_double(r[i].truncation()));
    const double level = chain_level(c, r);
    if (std::isinf(level)) throw ZeroClass("class is zero in homology up to truncation");
    if (!(level < horizon)) throw IndeterminateClass("spectral number lies beyond the truncation horizon");
    return level;
}

using SpectralProfile = std::map<std::string, double>;

/// c(0, a) = nu(a) on a zero-differential complex with all actions 0.
inline bool verify_valuation_axiom(const FilteredComplex& c, const Chain& a)
{
    if (!c.has_zero_differential()) throw std::invalid_argument("valuation axiom needs a zero differential");
    for (const auto& g : c.generators())
        if (g.action != 0.0) throw std::invalid_argument("valuation axiom needs all actions equal to 0");
    std::optional<Rational> nu;
    for (const auto& s : a)
        if (!s.is_zero() && (!nu || *s.valuation() < *nu)) nu = *s.valuation();
    if (!nu) return false;
    return spectral_number(c, a) == to_double(*nu);
}

// ---------------------------------------------------------------------------
// Transfer constants.

/// 1/(2 kappa + 1), exact.
inline Rational reduction_constant(const Rational& kappa)
{
    if (kappa <= Rational(0)) throw std::domain_error("kappa must be positive");
    return Rational(1) / (Rational(2) * kappa + Rational(1));
}

inline double reduction_constant(double kappa)
{
    if (!(kappa > 0)) throw std::domain_error("kappa must be positive");
    return 1.0 / (2.0 * kappa + 1.0);
}

/// r0 = sqrt(2 kappa / (2 kappa + 1)).
inline double monotone_radius(double kappa)
{
    if (!(kappa > 0)) throw std::domain_error("kappa must be positive");
    return std::sqrt(2.0 * kappa / (2.0 * kappa + 1.0));
}

struct TransferParams {
    double kappa = 0.5;
    double epsilon = 0.1;
    double f_min = -1.0;
    double f_max = 1.0;

    [[nodiscard]] double r0() const { return monotone_radius(kappa); }
    [[nodiscard]] double h_r0() const { return reduction_constant(kappa); }
    [[nodiscard]] double eps_prime() const { return epsilon * h_r0() * f_max; }

    void validate() const
    {
        if (!(kappa > 0)) throw std::invalid_argument("kappa must be positive");
        if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
        if (!(f_min < f_max)) throw std::invalid_argument("f_min must be below f_max");
        if (!(eps_prime() > 0)) throw std::invalid_argument("eps_prime must be positive (f_max > 0)");
    }
};

/// Doubled complex {g', g''}: action h*a + eps*h*f_min resp. h*a + eps*h*f_max,
/// degree(g'') = degree(g) + 1, differential copied on each block.
inline FilteredComplex lift_complex(const FilteredComplex& c, const TransferParams& p)
{
    p.validate();
    const double h = p.h_r0();
    const std::size_t n = c.size();
    std::vector<Generator> gens;
    for (const auto& g : c.generators()) gens.push_back({g.id + "'", g.degree, h * g.action + p.epsilon * h * p.f_min});
    for (const auto& g : c.generators())
        gens.push_back({g.id + "''", g.degree + 1, h * g.action + p.epsilon * h * p.f_max});
    std::vector<DifferentialEntry> d;
    for (const auto& e : c.entries()) {
        d.push_back({e.from, e.to, e.value});
        d.push_back({e.from + n, e.to + n, e.value});
    }
    return FilteredComplex(std::move(gens), c.lattice(), c.truncation(), d);
}

/// Chain x on the base mapped to x' on the lift.
inline Chain lift_primed(const FilteredComplex& base, const Chain& x)
{
    base.check_chain(x);
    Chain out = x;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.push_back(NovikovScalar::zero(base.lattice(), base.truncation()));
    return out;
}

struct TransferWindow {
    double lo = 0.0;
    double hi = 0.0;
    [[nodiscard]] bool contains(double v, double slack = 1e-12) const { return v >= lo - slack && v <= hi + slack; }
};

/// Predicted window [h c - eps', h c + eps'] for each class.
inline std::map<std::string, TransferWindow> transfer_spectral(const SpectralProfile& base, const TransferParams& p)
{
    p.validate();
    std::map<std::string, TransferWindow> out;
    for (const auto& [id, c] : base) out[id] = {p.h_r0() * c - p.eps_prime(), p.h_r0() * c + p.eps_prime()};
    return out;
}

struct TransferCheck {
    std::string id;
    double base = 0.0;
    double lifted = 0.0;
    TransferWindow window;
    bool inside = false;
};

/// Lifts each class x to x' and checks its spectral number against the predicted window.
inline std::vector<TransferCheck> check_transfer(const FilteredComplex& base, const std::map<std::string, Chain>& classes,
                                                 const TransferParams& p)
{
    const FilteredComplex lifted = lift_complex(base, p);
    SpectralProfile profile;
    for (const auto& [id, x] : classes) profile[id] = spectral_number(base, x);
    const auto windows = transfer_spectral(profile, p);
    std::vector<TransferCheck> out;
    for (const auto& [id, x] : classes) {
        TransferCheck t;
        t.id = id;
        t.base = profile[id];
        t.lifted = spectral_number(lifted, lift_primed(base, x));
        t.window = windows.at(id);
        t.inside = t.window.contains(t.lifted);
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Homogenization.

struct HomogenizeResult {
    double estimate = 0.0;
    double gap = 0.0;    // c_K / K - estimate
    double defect = 0.0; // max_{m+n<=K} c_{m+n} - c_m - c_n
    std::size_t k_max = 0;
};

/// Fekete estimate of lim c_k / k from c_1..c_K (seq[k-1] = c_k).
/// The observed defect D is checked against `slack`; the estimate is
/// min_k (c_k + max(D, 0)) / k, the Fekete minimum of the subadditive
/// sequence c_k + max(D, 0). This is exact for affine c_k.
inline HomogenizeResult homogenize(const std::vector<double>& seq, double slack = 1e-9)
{
    const std::size_t K = seq.size();
    if (K == 0) throw std::invalid_argument("homogenize needs a nonempty sequence");
    if (!(slack >= 0)) throw std::invalid_argument("subadditivity slack must be nonnegative");
    double defect = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= K; ++m)
        for (std::size_t n = m; m + n <= K; ++n) defect = std::max(defect, seq[m + n - 1] - seq[m - 1] - seq[n - 1]);
    if (K == 1) defect = 0.0;
    if (defect > slack)
        throw SubadditivityViolation("sequence violates subadditivity by " + std::to_string(defect) +
                                     " (slack " + std::to_string(slack) + ")");
    const double shift = std::max(defect, 0.0);
    double est = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= K; ++k) est = std::min(est, (seq[k - 1] + shift) / static_cast<double>(k));
    return {est, seq[K - 1] / static_cast<double>(K) - est, defect, K};
}

struct ReductionIdentityReport {
    double constant = 0.0;
    double const_bound = 0.0;
    double max_difference = 0.0;             // max_k |cX_k - r cSigma_k|
    std::vector<std::size_t> violations;     // k (1-based) with difference above const_bound
    bool bounded_difference = false;
    std::optional<HomogenizeResult> sigma;
    std::optional<HomogenizeResult> x;
    double homogenized_difference = std::numeric_limits<double>::infinity();
    bool homogenized_equal = false;
    std::string error;                       // homogenization failure, if any
    bool passed = false;
};

/// |cX_k - r cSigma_k| <= Const for all k, then |cbar_X - r cbar_Sigma| <= tol.
/// cX is homogenized with slack r*sigma_slack + 3*Const, the defect the bound allows.
inline ReductionIdentityReport reduction_identity_check(const std::vector<double>& c_sigma,
                                                        const std::vector<double>& c_x, double kappa,
                                                        double const_bound, double tol, double sigma_slack = 1e-9)
{
    if (c_sigma.size() != c_x.size() || c_sigma.empty())
        throw std::invalid_argument("paired sequences must be nonempty and of equal length");
    ReductionIdentityReport rep;
    rep.constant = reduction_constant(kappa);
    rep.const_bound = const_bound;
    for (std::size_t k = 0; k < c_sigma.size(); ++k) {
        const double diff = std::abs(c_x[k] - rep.constant * c_sigma[k]);
        rep.max_difference = std::max(rep.max_difference, diff);
        // rounding slack scales with the size of the sequence values
        const double slack = 1e-12 * std::max({1.0, std::abs(c_x[k]), std::abs(c_sigma[k])});
        if (diff > const_bound + slack) rep.violations.push_back(k + 1);
    }
    rep.bounded_difference = rep.violations.empty();
    try {
        rep.sigma = homogenize(c_sigma, sigma_slack);
        rep.x = homogenize(c_x, rep.constant * sigma_slack + 3.0 * const_bound);
        rep.homogenized_difference = std::abs(rep.x->estimate - rep.constant * rep.sigma->estimate);
        rep.homogenized_equal = rep.homogenized_difference <= tol;
    } catch (const SubadditivityViolation& e) {
        rep.error = e.what();
    }
    rep.passed = rep.bounded_difference && rep.homogenized_equal;
    return rep;
}

/// |c(H_k) - c(G_k)| <= bound_k: spectral numbers move at most by the Hofer distance.
inline bool hofer_continuity_check(const std::vector<double>& c_h, const std::vector<double>& c_g,
                                   const std::vector<double>& hofer_bounds)
{
    if (c_h.size() != c_g.size() || c_h.size() != hofer_bounds.size())
        throw std::invalid_argument("sequences must have equal length");
    for (std::size_t k = 0; k < c_h.size(); ++k)
        if (std::abs(c_h[k] - c_g[k]) > hofer_bounds[k] + 1e-12) return false;
    return true;
}

/// lower_k <= c_k <= upper_k, the integrated extrema of H on the Lagrangian.
inline bool lagrangian_control_check(const std::vector<double>& c, const std::vector<double>& lower,
                                     const std::vector<double>& upper)
{
    if (c.size() != lower.size() || c.size() != upper.size())
        throw std::invalid_argument("sequences must have equal length");
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] < lower[k] - 1e-12 || c[k] > upper[k] + 1e-12) return false;
    return true;
}

// ---------------------------------------------------------------------------
// End-to-end pipeline on a pearl complex.

/// Zero-differential filtered complex of a critical pearl complex; the action
/// of x_S is base_action + step * |S|, all scaled by `scale`.
inline FilteredComplex pearl_filtered_complex(const TorusPearlComplex& pc, double base_action, double step,
                                              double scale = 1.0)
{
    if (!pc.critical) throw NonCriticalLocalSystem("pearl complex is not at a critical local system");
    std::vector<Generator> gens;
    for (std::uint32_t s = 0; s < pc.rank(); ++s) {
        std::string id = "x{";
        for (std::size_t j = 0; j < pc.k; ++j)
            if (s & (1u << j)) id += (id.size() > 2 ? "," : "") + std::to_string(j + 1);
        id += "}";
        const int deg = TorusPearlComplex::degree(s);
        gens.push_back({id, deg, scale * (base_action + step * deg)});
    }
    return FilteredComplex(std::move(gens), pc.lattice, pc.truncation, {});
}

struct PipelineResult {
    std::vector<double> c_sigma;
    std::vector<double> c_x;
    std::vector<TransferCheck> transfer; // at k = 1
    ReductionIdentityReport identity;
};

/// Iterates k = 1..K of the base complex (actions scaled by k), lifts each and
/// tracks the unit class on both sides.
inline PipelineResult run_reduction_pipeline(const TorusPearlComplex& pc, const TransferParams& p, std::size_t K,
                                             double base_action = 1.0, double step = 0.25, double tol = 1e-6)
{
    p.validate();
    if (K == 0) throw std::invalid_argument("K_max must be at least 1");
    PipelineResult out;
    const NovikovScalar one = NovikovScalar::one(pc.lattice, pc.truncation);
    for (std::size_t k = 1; k <= K; ++k) {
        const FilteredComplex base = pearl_filtered_complex(pc, base_action, step, static_cast<double>(k));
        const Chain unit = base.basis_chain(0, one);
        if (k == 1) {
            std::map<std::string, Chain> classes;
            for (std::size_t i = 0; i < base.size(); ++i) classes[base.generators()[i].id] = base.basis_chain(i, one);
            out.transfer = check_transfer(base, classes, p);
        }
        const FilteredComplex lifted = lift_complex(base, p);
        out.c_sigma.push_back(spectral_number(base, unit));
        out.c_x.push_back(spectral_number(lifted, lift_primed(base, unit)));
    }
    out.identity = reduction_identity_check(out.c_sigma, out.c_x, p.kappa, p.eps_prime(), tol);
    return out;
}

} // namespace gysinkit
