#pragma once

// Pearl complexes of tori with rank-one local systems, their circle-bundle
// lifts, the chain maps i and p, the connecting class and exactness checks.
//
// Basis of the torus complex: subsets S of {0..k-1} as bitmasks, degree |S|.
// Only singletons have a differential: d(x_j) = g_j T^w x_empty with
// g_j = (z_j dW/dz_j)(rho). The lifted complex has generators (S, ') in
// degree |S| and (S, '') in degree |S|+1, indexed S and S + 2^k.

#include "gysinkit/coeff_fields.hpp"
#include "gysinkit/detail/exact_linalg.hpp"
#include "gysinkit/superpotential.hpp"

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gysinkit {

class NonCriticalLocalSystem : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kDefaultCriticalTolerance = 1e-9;

/// Matrix with Novikov entries; column j is the image of source generator j.
struct NovikovMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<NovikovScalar> entries; // row-major

    NovikovMatrix() = default;
    NovikovMatrix(std::size_t r, std::size_t c, const NovikovScalar& fill) : rows(r), cols(c), entries(r * c, fill) {}

    NovikovScalar& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
    [[nodiscard]] const NovikovScalar& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

    [[nodiscard]] double max_abs_coefficient() const
    {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.max_abs_coefficient());
        return m;
    }

    [[nodiscard]] bool is_exactly_zero() const
    {
        for (const auto& e : entries)
            if (!e.is_zero()) return false;
        return true;
    }

    friend NovikovMatrix operator*(const NovikovMatrix& a, const NovikovMatrix& b)
    {
        if (a.cols != b.rows) throw DimensionMismatch("matrix product shape mismatch");
        NovikovMatrix out(a.rows, b.cols, NovikovScalar::zero(a.entries.front().lattice()));
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t l = 0; l < a.cols; ++l) {
                if (a.at(i, l).is_zero()) continue;
                for (std::size_t j = 0; j < b.cols; ++j)
                    if (!b.at(l, j).is_zero()) out.at(i, j) += a.at(i, l) * b.at(l, j);
            }
        return out;
    }

    friend NovikovMatrix operator-(const NovikovMatrix& a, const NovikovMatrix& b)
    {
        if (a.rows != b.rows || a.cols != b.cols) throw DimensionMismatch("matrix difference shape mismatch");
        NovikovMatrix out = a;
        for (std::size_t i = 0; i < a.entries.size(); ++i) out.entries[i] = a.entries[i] - b.entries[i];
        return out;
    }
};

namespace detail {

inline Complex snap(Complex g, double tol) { return std::abs(g) <= tol ? Complex(0.0, 0.0) : g; }

inline ExponentLattice weight_lattice(const Rational& w, const ExponentLattice& requested)
{
    return requested.join(ExponentLattice(w.denominator()));
}

} // namespace detail

struct TorusPearlComplex {
    std::size_t k = 0;
    Rational weight{0};
    ExponentLattice lattice;
    Rational truncation{kDefaultTruncation};
    std::vector<Complex> gradients; // g_j, snapped to 0 within the tolerance
    bool critical = false;

    [[nodiscard]] std::size_t rank() const { return std::size_t{1} << k; }
    [[nodiscard]] static int degree(std::uint32_t subset) { return std::popcount(subset); }

    [[nodiscard]] NovikovMatrix differential() const
    {
        NovikovMatrix d(rank(), rank(), NovikovScalar::zero(lattice, truncation));
        for (std::size_t j = 0; j < k; ++j)
            d.at(0, std::size_t{1} << j) = NovikovScalar::monomial(gradients[j], weight, lattice, truncation);
        return d;
    }
};

struct LiftedPearlComplex {
    TorusPearlComplex base;
    std::vector<Complex> gradients; // lifted g~_j for j < k, snapped
    Complex fiber_gradient;         // g~_{k+1}, snapped
    int euler_number = 0;
    bool critical = false;

    [[nodiscard]] std::size_t rank() const { return 2 * base.rank(); }
    [[nodiscard]] int degree(std::size_t index) const
    {
        const std::size_t half = base.rank();
        return index < half ? TorusPearlComplex::degree(static_cast<std::uint32_t>(index))
                            : TorusPearlComplex::degree(static_cast<std::uint32_t>(index - half)) + 1;
    }

    [[nodiscard]] NovikovMatrix differential() const
    {
        const auto& lat = base.lattice;
        NovikovMatrix d(rank(), rank(), NovikovScalar::zero(lat, base.truncation));
        for (std::size_t j = 0; j < base.k; ++j)
            d.at(0, std::size_t{1} << j) = NovikovScalar::monomial(gradients[j], base.weight, lat, base.truncation);
        d.at(0, base.rank()) = NovikovScalar::monomial(fiber_gradient, base.weight, lat, base.truncation);
        return d;
    }
};

/// Pearl complex of (W, rho) with pearl weight w; lattice is joined with w's denominator.
inline TorusPearlComplex build_torus_complex(const SuperpotentialPoly& w, const LocalSystem& rho, Rational weight,
                                             ExponentLattice lattice = {},
                                             Rational truncation = Rational(kDefaultTruncation),
                                             double tol = kDefaultCriticalTolerance)
{
    const ComplexVector g = log_gradient(w, rho);
    TorusPearlComplex c;
    c.k = w.num_vars();
    c.weight = weight;
    c.lattice = detail::weight_lattice(weight, lattice);
    c.truncation = truncation;
    c.critical = true;
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        c.gradients.push_back(detail::snap(g(j), tol));
        if (c.gradients.back() != Complex(0.0, 0.0)) c.critical = false;
    }
    return c;
}

/// Lift over `base` by the (k+1)-variable superpotential W~ at rho~; the last variable is the fiber.
inline LiftedPearlComplex build_lifted_complex(const TorusPearlComplex& base, const SuperpotentialPoly& w_lift,
                                               const LocalSystem& rho_lift, int euler_number = 0,
                                               double tol = kDefaultCriticalTolerance)
{
    if (w_lift.num_vars() != base.k + 1)
        throw DimensionMismatch("lifted superpotential has " + std::to_string(w_lift.num_vars()) +
                                " variables, expected " + std::to_string(base.k + 1));
    const ComplexVector g = log_gradient(w_lift, rho_lift);
    LiftedPearlComplex c;
    c.base = base;
    c.euler_number = euler_number;
    c.critical = true;
    for (std::size_t j = 0; j < base.k; ++j) {
        c.gradients.push_back(detail::snap(g(static_cast<Eigen::Index>(j)), tol));
        if (c.gradients.back() != Complex(0.0, 0.0)) c.critical = false;
    }
    c.fiber_gradient = detail::snap(g(static_cast<Eigen::Index>(base.k)), tol);
    if (c.fiber_gradient != Complex(0.0, 0.0)) c.critical = false;
    return c;
}

namespace detail {
inline void check_base(const TorusPearlComplex& c, const LiftedPearlComplex& lifted)
{
    if (c.k != lifted.base.k || !(c.weight == lifted.base.weight) || !(c.lattice == lifted.base.lattice))
        throw std::invalid_argument("lifted complex is not built over this base complex");
}
} // namespace detail

/// i: x_S -> (S, '), as a 2^{k+1} x 2^k matrix.
inline NovikovMatrix chain_i(const TorusPearlComplex& c, const LiftedPearlComplex& lifted)
{
    detail::check_base(c, lifted);
    NovikovMatrix m(lifted.rank(), c.rank(), NovikovScalar::zero(c.lattice, c.truncation));
    for (std::size_t s = 0; s < c.rank(); ++s) m.at(s, s) = NovikovScalar::one(c.lattice, c.truncation);
    return m;
}

/// p: (S, ') -> 0, (S, '') -> x_S, as a 2^k x 2^{k+1} matrix.
inline NovikovMatrix chain_p(const LiftedPearlComplex& lifted, const TorusPearlComplex& c)
{
    detail::check_base(c, lifted);
    NovikovMatrix m(c.rank(), lifted.rank(), NovikovScalar::zero(c.lattice, c.truncation));
    for (std::size_t s = 0; s < c.rank(); ++s) m.at(s, c.rank() + s) = NovikovScalar::one(c.lattice, c.truncation);
    return m;
}

struct ChainMapResiduals {
    double i_residual = 0.0; // |i d - d~ i|
    double p_residual = 0.0; // |p d~ - d p|
    bool i_exact_zero = false;
    bool p_exact_zero = false;
};

inline ChainMapResiduals chain_map_residuals(const TorusPearlComplex& c, const LiftedPearlComplex& lifted)
{
    const NovikovMatrix d = c.differential();
    const NovikovMatrix dl = lifted.differential();
    const NovikovMatrix i = chain_i(c, lifted);
    const NovikovMatrix p = chain_p(lifted, c);
    const NovikovMatrix ri = i * d - dl * i;
    const NovikovMatrix rp = p * dl - d * p;
    return {ri.max_abs_coefficient(), rp.max_abs_coefficient(), ri.is_exactly_zero(), rp.is_exactly_zero()};
}

/// Homology rank of the torus complex; only degrees 0 and 1 are modeled away from critical points.
inline std::size_t homology_rank(const TorusPearlComplex& c, int degree)
{
    std::size_t nonzero = 0;
    for (const auto& g : c.gradients)
        if (g != Complex(0.0, 0.0)) ++nonzero;
    const std::size_t rank_d1 = nonzero > 0 ? 1 : 0;
    if (c.critical) {
        if (degree < 0 || degree > static_cast<int>(c.k)) return 0;
        std::size_t count = 0;
        for (std::uint32_t s = 0; s < c.rank(); ++s)
            if (TorusPearlComplex::degree(s) == degree) ++count;
        return count;
    }
    if (degree == 0) return 1 - rank_d1;
    if (degree == 1) return c.k - rank_d1;
    throw NonCriticalLocalSystem("homology in degree " + std::to_string(degree) +
                                 " is not modeled at a non-critical local system");
}

struct ConnectingClass {
    int euler_part = 0;
    NovikovScalar quantum_part;

    [[nodiscard]] bool vanishes() const { return euler_part == 0 && quantum_part.is_zero(); }
};

/// delta(1) = e(L~) + (z_{k+1} dW~/dz_{k+1})(rho~) T^w.
inline ConnectingClass connecting_class(const SuperpotentialPoly& w_lift, const LocalSystem& rho_lift,
                                        int euler_number, Rational weight, ExponentLattice lattice = {},
                                        Rational truncation = Rational(kDefaultTruncation),
                                        double tol = kDefaultCriticalTolerance)
{
    if (w_lift.num_vars() == 0) throw DimensionMismatch("lifted superpotential needs a fiber variable");
    const ComplexVector g = log_gradient(w_lift, rho_lift);
    const Complex fiber = detail::snap(g(g.size() - 1), tol);
    const ExponentLattice lat = detail::weight_lattice(weight, lattice);
    return {euler_number, NovikovScalar::monomial(fiber, weight, lat, truncation)};
}

struct ExactnessReport {
    std::size_t k = 0;
    bool critical = true;
    std::vector<bool> rank_identity;     // per degree m = 0..k+1
    std::vector<bool> subspace_equality; // ker p = im i per degree; empty when not checked
    bool p_after_i_zero = false;
    bool i_injective = false;
    bool p_surjective = false;
    bool passed = false;

    /// Per-degree verdict combining both checks.
    [[nodiscard]] std::vector<bool> per_degree() const
    {
        std::vector<bool> out = rank_identity;
        for (std::size_t m = 0; m < subspace_equality.size() && m < out.size(); ++m)
            out[m] = out[m] && subspace_equality[m];
        return out;
    }
};

inline std::uint64_t binomial(std::size_t n, std::size_t r)
{
    if (r > n) return 0;
    std::uint64_t out = 1;
    for (std::size_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
    return out;
}

/// Exactness of 0 -> C -> C~ -> C[-1] -> 0 for critical local systems of rank k.
/// The rank identity is checked in every degree; ker p = im i is checked as
/// explicit subspaces (exact rational rank) when `explicit_subspaces` is set.
inline ExactnessReport verify_gysin_exactness(std::size_t k, bool explicit_subspaces = true)
{
    if (k > 20) throw std::invalid_argument("rank too large for explicit Gysin bookkeeping");
    ExactnessReport rep;
    rep.k = k;
    bool ok = true;
    for (std::size_t m = 0; m <= k + 1; ++m) {
        const bool eq = binomial(k + 1, m) == binomial(k, m) + (m == 0 ? 0 : binomial(k, m - 1));
        rep.rank_identity.push_back(eq);
        ok = ok && eq;
    }
    if (explicit_subspaces) {
        const std::size_t n = std::size_t{1} << k;
        detail::RationalMatrix i(2 * n, std::vector<Rational>(n, Rational(0)));
        detail::RationalMatrix p(n, std::vector<Rational>(2 * n, Rational(0)));
        for (std::size_t s = 0; s < n; ++s) {
            i[s][s] = 1;
            p[s][n + s] = 1;
        }
        rep.p_after_i_zero = detail::is_zero(detail::multiply(p, i));
        rep.i_injective = detail::rank(i) == n;
        rep.p_surjective = detail::rank(p) == n;
        ok = ok && rep.p_after_i_zero && rep.i_injective && rep.p_surjective;
        auto lifted_degree = [n](std::size_t idx) {
            return idx < n ? std::popcount(idx) : std::popcount(idx - n) + 1;
        };
        for (std::size_t m = 0; m <= k + 1; ++m) {
            std::vector<std::size_t> src, lifted;
            for (std::size_t s = 0; s < n; ++s)
                if (static_cast<std::size_t>(std::popcount(s)) == m) src.push_back(s);
            for (std::size_t t = 0; t < 2 * n; ++t)
                if (static_cast<std::size_t>(lifted_degree(t)) == m) lifted.push_back(t);
            // im i_m: columns of i restricted to degree-m sources; ker p_m inside the degree-m lifted block.
            const auto i_m = detail::select_columns(i, src);
            const auto p_m = detail::select_columns(p, lifted);
            const std::size_t dim_im = detail::rank(i_m);
            const std::size_t dim_ker = lifted.size() - detail::rank(p_m);
            // im i lies in ker p (p i = 0), so equal dimensions give equality.
            const bool eq = dim_im == dim_ker && detail::is_zero(detail::multiply(p, i_m));
            rep.subspace_equality.push_back(eq);
            ok = ok && eq;
        }
    } else {
        rep.p_after_i_zero = rep.i_injective = rep.p_surjective = true;
    }
    rep.passed = ok;
    return rep;
}

/// Same check for a concrete base/lift pair; both local systems must be critical.
inline ExactnessReport verify_gysin_exactness(const TorusPearlComplex& c, const LiftedPearlComplex& lifted)
{
    detail::check_base(c, lifted);
    if (!c.critical || !lifted.critical)
        throw NonCriticalLocalSystem("Gysin exactness is modeled only at critical local systems");
    return verify_gysin_exactness(c.k, c.k <= 8);
}

/// Built-in (X, Sigma) pairs: base torus in Sigma, lifted torus in X.
struct GysinPair {
    std::string name;
    int n = 0;
    SuperpotentialPoly base;
    SuperpotentialPoly lifted;
    Rational kappa;
};

inline std::vector<GysinPair> builtin_pairs()
{
    std::vector<GysinPair> out;
    for (int n = 2; n <= 4; ++n)
        out.push_back({"cpn", n, builtin("clifford_cp", n - 1), builtin("clifford_cp", n), Rational(1, 2 * n)});
    out.push_back({"quadric", 3, builtin("gz_quadric", 2), builtin("gz_quadric", 3), Rational(1, 4)});
    out.push_back({"cp3_q2", 0, builtin("chekanov_q2"), builtin("chekanov_cp3"), Rational(1, 2)});
    return out;
}

/// Deterministic samples in (C*)^k with log-modulus in [-1, 1] and uniform argument.
inline std::vector<LocalSystem> sample_local_systems(std::size_t k, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logmod(-1.0, 1.0);
    std::uniform_real_distribution<double> arg(0.0, 2.0 * std::numbers::pi);
    std::vector<LocalSystem> out;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<Complex> z;
        for (std::size_t j = 0; j < k; ++j) z.push_back(std::polar(std::exp(logmod(rng)), arg(rng)));
        out.emplace_back(std::move(z));
    }
    return out;
}

} // namespace gysinkit
