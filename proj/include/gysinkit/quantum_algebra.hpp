#pragma once

// Finite-dimensional commutative algebras over a Novikov lattice field and
// their splitting into field factors.
//
// Two presentations are supported:
//   cyclic  K[h]/(h^m - c T^lambda), basis 1, h, ..., h^{m-1};
//   table   an explicit basis with structure constants in K.
// Binomial relations are split exactly. Tables are split numerically: the
// characteristic polynomial of a generic element is solved over a ramified
// extension by Newton polygons and Newton lifting, roots are grouped into
// Galois orbits over the base lattice, and each orbit gives one idempotent.

#include "gysinkit/coeff_fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gysinkit {

class NonSemisimple : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// h^m = c T^lambda.
struct CyclicPresentation {
    int m = 1;
    Complex c{1.0, 0.0};
    Rational lambda{0};
};

struct AlgebraElement {
    std::vector<NovikovScalar> coefficients;

    [[nodiscard]] std::size_t size() const { return coefficients.size(); }
    const NovikovScalar& operator[](std::size_t i) const { return coefficients[i]; }
    NovikovScalar& operator[](std::size_t i) { return coefficients[i]; }

    friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b)
    {
        if (a.size() != b.size()) throw std::invalid_argument("algebra elements of different dimension");
        AlgebraElement out = a;
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
        return out;
    }
    friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b)
    {
        if (a.size() != b.size()) throw std::invalid_argument("algebra elements of different dimension");
        AlgebraElement out = a;
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
        return out;
    }
    friend AlgebraElement operator*(const NovikovScalar& s, const AlgebraElement& a)
    {
        AlgebraElement out = a;
        for (auto& x : out.coefficients) x = s * x;
        return out;
    }

    [[nodiscard]] double max_abs_coefficient() const
    {
        double m = 0.0;
        for (const auto& x : coefficients) m = std::max(m, x.max_abs_coefficient());
        return m;
    }

    [[nodiscard]] AlgebraElement on_lattice(const ExponentLattice& finer) const
    {
        AlgebraElement out = *this;
        for (auto& x : out.coefficients) x = x.on_lattice(finer);
        return out;
    }
};

/// Basis with structure constants: products[i][j] = coordinates of b_i * b_j.
class TablePresentation {
public:
    using Products = std::vector<std::vector<std::vector<NovikovScalar>>>;

    /// Validates commutativity, associativity and the existence of a unit.
    TablePresentation(ExponentLattice lattice, Products products, double tol = 1e-9)
        : lattice_(lattice), products_(std::move(products))
    {
        const std::size_t m = products_.size();
        if (m == 0) throw std::invalid_argument("multiplication table must have dimension >= 1");
        for (const auto& row : products_) {
            if (row.size() != m) throw std::invalid_argument("multiplication table is not square");
            for (const auto& entry : row) {
                if (entry.size() != m) throw std::invalid_argument("product coordinate vector has wrong length");
                for (const auto& s : entry)
                    if (!(s.lattice() == lattice_)) throw LatticeMismatch("table scalar off the declared lattice");
            }
        }
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l)
                    if (residual(products_[i][j][l], products_[j][i][l]) > tol)
                        throw std::invalid_argument("multiplication table is not commutative");
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t l = 0; l < m; ++l) {
                    const auto left = multiply(multiply(basis(i), basis(j)), basis(l));
                    const auto right = multiply(basis(i), multiply(basis(j), basis(l)));
                    if ((left - right).max_abs_coefficient() > tol)
                        throw std::invalid_argument("multiplication table is not associative");
                }
        unit_ = find_unit(tol);
    }

    [[nodiscard]] std::size_t dim() const { return products_.size(); }
    [[nodiscard]] const ExponentLattice& lattice() const { return lattice_; }
    [[nodiscard]] const Products& products() const { return products_; }
    [[nodiscard]] const AlgebraElement& unit() const { return unit_; }
    /// Index of the basis element equal to the unit, if any.
    [[nodiscard]] std::optional<std::size_t> unit_basis_index() const { return unit_index_; }

    [[nodiscard]] AlgebraElement basis(std::size_t i) const
    {
        AlgebraElement e;
        e.coefficients.assign(dim(), NovikovScalar::zero(lattice_));
        e[i] = NovikovScalar::one(lattice_);
        return e;
    }

    /// Product of elements whose scalars may live on a lattice refining this one.
    [[nodiscard]] AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) const
    {
        const std::size_t m = dim();
        if (a.size() != m || b.size() != m) throw std::invalid_argument("algebra element dimension mismatch");
        const ExponentLattice lat = a[0].lattice();
        AlgebraElement out;
        out.coefficients.assign(m, NovikovScalar::zero(lat, min_truncation(a, b)));
        for (std::size_t i = 0; i < m; ++i) {
            if (a[i].is_zero()) continue;
            for (std::size_t j = 0; j < m; ++j) {
                if (b[j].is_zero()) continue;
                const NovikovScalar ab = a[i] * b[j];
                for (std::size_t l = 0; l < m; ++l) {
                    const auto& s = products_[i][j][l];
                    if (s.is_zero()) continue;
                    out[l] += ab * (lat == lattice_ ? s : s.on_lattice(lat));
                }
            }
        }
        return out;
    }

private:
    static Rational min_truncation(const AlgebraElement& a, const AlgebraElement& b)
    {
        Rational t = a[0].truncation();
        for (const auto& x : a.coefficients) t = std::min(t, x.truncation());
        for (const auto& x : b.coefficients) t = std::min(t, x.truncation());
        return t;
    }

    AlgebraElement find_unit(double tol)
    {
        const std::size_t m = dim();
        auto acts_as_identity = [&](const AlgebraElement& u) {
            for (std::size_t j = 0; j < m; ++j)
                if ((multiply(u, basis(j)) - basis(j)).max_abs_coefficient() > tol) return false;
            return true;
        };
        for (std::size_t i = 0; i < m; ++i) {
            if (acts_as_identity(basis(i))) {
                unit_index_ = i;
                return basis(i);
            }
        }
        // Solve sum_i u_i (b_i b_j) = b_j for all j, stacked as an m^2 x m system.
        std::vector<std::vector<NovikovScalar>> rows;
        std::vector<NovikovScalar> rhs;
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t l = 0; l < m; ++l) {
                std::vector<NovikovScalar> row(m);
                for (std::size_t i = 0; i < m; ++i) row[i] = products_[i][j][l];
                rows.push_back(std::move(row));
                rhs.push_back(l == j ? NovikovScalar::one(lattice_) : NovikovScalar::zero(lattice_));
            }
        auto solution = solve_stacked(std::move(rows), std::move(rhs), m);
        if (!solution) throw std::invalid_argument("multiplication table has no unit");
        AlgebraElement u{*solution};
        if (!acts_as_identity(u)) throw std::invalid_argument("multiplication table has no unit");
        return u;
    }

    // Gaussian elimination over K with valuation pivoting; nullopt when inconsistent or underdetermined.
    static std::optional<std::vector<NovikovScalar>> solve_stacked(std::vector<std::vector<NovikovScalar>> a,
                                                                   std::vector<NovikovScalar> b, std::size_t cols)
    {
        const std::size_t rows = a.size();
        std::vector<std::size_t> pivot_row(cols, rows);
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols && r < rows; ++c) {
            std::size_t best = rows;
            for (std::size_t i = r; i < rows; ++i) {
                if (a[i][c].is_zero()) continue;
                if (best == rows || *a[i][c].valuation() < *a[best][c].valuation() ||
                    (*a[i][c].valuation() == *a[best][c].valuation() &&
                     std::abs(a[i][c].leading_coefficient()) > std::abs(a[best][c].leading_coefficient())))
                    best = i;
            }
            if (best == rows) return std::nullopt;
            std::swap(a[r], a[best]);
            std::swap(b[r], b[best]);
            const NovikovScalar inv = a[r][c].inverse();
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == r || a[i][c].is_zero()) continue;
                const NovikovScalar f = a[i][c] * inv;
                for (std::size_t cc = c; cc < cols; ++cc) a[i][cc] = (a[i][cc] - f * a[r][cc]).chopped(1e-13);
                a[i][c] = NovikovScalar::zero(a[i][c].lattice(), a[i][c].truncation());
                b[i] = (b[i] - f * b[r]).chopped(1e-13);
            }
            pivot_row[c] = r++;
        }
        for (std::size_t i = r; i < rows; ++i)
            if (b[i].max_abs_coefficient() > 1e-9) return std::nullopt;
        std::vector<NovikovScalar> x(cols);
        for (std::size_t c = 0; c < cols; ++c) x[c] = b[pivot_row[c]] / a[pivot_row[c]][c];
        return x;
    }

    ExponentLattice lattice_;
    Products products_;
    AlgebraElement unit_;
    std::optional<std::size_t> unit_index_;
};

using AlgebraPresentation = std::variant<CyclicPresentation, TablePresentation>;

struct IdempotentDecomposition {
    std::vector<AlgebraElement> idempotents;
    std::vector<bool> field_factor_flags;
    ExponentLattice lattice;
};

namespace detail {

inline Rational min_truncation(const AlgebraElement& a)
{
    Rational t = a[0].truncation();
    for (const auto& x : a.coefficients) t = std::min(t, x.truncation());
    return t;
}

inline AlgebraElement multiply_cyclic(const CyclicPresentation& p, const AlgebraElement& a, const AlgebraElement& b)
{
    const auto m = static_cast<std::size_t>(p.m);
    if (a.size() != m || b.size() != m)
        throw std::invalid_argument("algebra element has dimension " + std::to_string(a.size()) + ", expected " +
                                    std::to_string(m));
    const ExponentLattice lat = a[0].lattice();
    if (!lat.contains(p.lambda)) throw LatticeMismatch("relation exponent lambda is off the coefficient lattice");
    const Rational order = std::min(min_truncation(a), min_truncation(b));
    const NovikovScalar relation = NovikovScalar::monomial(p.c, p.lambda, lat, p.lambda + Rational(1000));
    std::vector<NovikovScalar> full(2 * m - 1, NovikovScalar::zero(lat, order));
    for (std::size_t i = 0; i < m; ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < m; ++j)
            if (!b[j].is_zero()) full[i + j] += a[i] * b[j];
    }
    for (std::size_t d = full.size(); d-- > m;) full[d - m] += relation * full[d];
    full.resize(m);
    return AlgebraElement{std::move(full)};
}

} // namespace detail

inline std::size_t dimension(const AlgebraPresentation& p)
{
    if (const auto* c = std::get_if<CyclicPresentation>(&p)) return static_cast<std::size_t>(c->m);
    return std::get<TablePresentation>(p).dim();
}

/// Unit of the presentation with scalars on `lattice`.
inline AlgebraElement unit_element(const AlgebraPresentation& p, const ExponentLattice& lattice,
                                   Rational truncation = Rational(kDefaultTruncation))
{
    if (const auto* c = std::get_if<CyclicPresentation>(&p)) {
        AlgebraElement e;
        e.coefficients.assign(static_cast<std::size_t>(c->m), NovikovScalar::zero(lattice, truncation));
        e[0] = NovikovScalar::one(lattice, truncation);
        return e;
    }
    const auto& t = std::get<TablePresentation>(p);
    return t.unit().on_lattice(lattice);
}

inline AlgebraElement multiply(const AlgebraPresentation& p, const AlgebraElement& a, const AlgebraElement& b)
{
    if (const auto* c = std::get_if<CyclicPresentation>(&p)) return detail::multiply_cyclic(*c, a, b);
    return std::get<TablePresentation>(p).multiply(a, b);
}

/// Splits K[h]/(h^m - c T^lambda) over K = lattice field (1/d)Z.
/// Let e be the least positive integer with e*lambda/m on the lattice. Then
/// h^m - C factors into r = m/e irreducible binomials h^e - beta_j with
/// beta_j = omega^j c^{e/m} T^{e lambda/m}, and the idempotent of factor j is
/// the Lagrange basis polynomial at beta_j in y = h^e, which for these nodes
/// is (1/r) sum_s beta_j^{-s} y^s.
inline IdempotentDecomposition split_binomial(const CyclicPresentation& p, const ExponentLattice& lattice,
                                              Rational truncation = Rational(kDefaultTruncation))
{
    if (p.m < 1) throw std::invalid_argument("cyclic presentation needs m >= 1");
    if (p.c == Complex(0.0, 0.0)) throw std::invalid_argument("binomial relation h^m = c T^lambda needs c != 0");
    if (!lattice.contains(p.lambda)) throw LatticeMismatch("relation exponent lambda is off the lattice");

    const Rational ratio = p.lambda * Rational(lattice.denominator()) / Rational(p.m);
    const std::int64_t e = ratio.denominator();
    const std::int64_t r = p.m / e;
    const Rational mu = p.lambda * Rational(e) / Rational(p.m);
    const double power = static_cast<double>(e) / p.m;
    const Complex c0 = std::polar(std::pow(std::abs(p.c), power), std::arg(p.c) * power);

    struct Factor {
        double arg;
        AlgebraElement idempotent;
    };
    std::vector<Factor> factors;
    for (std::int64_t j = 0; j < r; ++j) {
        const Complex beta = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(r)) * c0;
        AlgebraElement idem;
        idem.coefficients.assign(static_cast<std::size_t>(p.m), NovikovScalar::zero(lattice, truncation));
        Complex beta_inv_pow(1.0, 0.0);
        for (std::int64_t s = 0; s < r; ++s) {
            idem[static_cast<std::size_t>(e * s)] =
                NovikovScalar::monomial(beta_inv_pow / static_cast<double>(r), -mu * Rational(s), lattice, truncation);
            beta_inv_pow /= beta;
        }
        double a = std::arg(beta);
        if (a < 0) a += 2.0 * std::numbers::pi;
        if (a > 2.0 * std::numbers::pi - 1e-12) a = 0.0;
        factors.push_back({a, std::move(idem)});
    }
    std::sort(factors.begin(), factors.end(), [](const Factor& x, const Factor& y) { return x.arg < y.arg; });

    IdempotentDecomposition out;
    out.lattice = lattice;
    for (auto& f : factors) {
        out.idempotents.push_back(std::move(f.idempotent));
        out.field_factor_flags.push_back(true);
    }
    return out;
}

struct DecompositionReport {
    struct PairResidual {
        std::size_t i;
        std::size_t j;
        double residual;
    };
    double unit_residual = 0.0;                  // |sum e_i - 1|
    std::vector<double> idempotent_residuals;    // |e_i^2 - e_i|
    std::vector<PairResidual> orthogonality;     // |e_i e_j|, i < j
    Rational checked_truncation{0};              // smallest truncation order seen in the checks
    double tolerance = 0.0;
    bool passed = false;
};

/// Checks sum e_i = 1, e_i^2 = e_i and e_i e_j = 0 up to truncation and `tol`.
inline DecompositionReport verify_decomposition(const AlgebraPresentation& p, const IdempotentDecomposition& d,
                                                double tol = 1e-9)
{
    DecompositionReport rep;
    rep.tolerance = tol;
    if (d.idempotents.empty()) return rep;
    const ExponentLattice lat = d.idempotents.front()[0].lattice();
    Rational seen = detail::min_truncation(d.idempotents.front());
    auto track = [&](const AlgebraElement& x) { seen = std::min(seen, detail::min_truncation(x)); };

    AlgebraElement sum = d.idempotents.front();
    for (std::size_t i = 1; i < d.idempotents.size(); ++i) sum = sum + d.idempotents[i];
    const AlgebraElement diff = sum - unit_element(p, lat, seen + Rational(1000));
    track(diff);
    rep.unit_residual = diff.max_abs_coefficient();

    bool ok = rep.unit_residual <= tol;
    for (std::size_t i = 0; i < d.idempotents.size(); ++i) {
        const auto sq = multiply(p, d.idempotents[i], d.idempotents[i]);
        const auto r = sq - d.idempotents[i];
        track(r);
        rep.idempotent_residuals.push_back(r.max_abs_coefficient());
        ok = ok && rep.idempotent_residuals.back() <= tol;
        for (std::size_t j = i + 1; j < d.idempotents.size(); ++j) {
            const auto prod = multiply(p, d.idempotents[i], d.idempotents[j]);
            track(prod);
            rep.orthogonality.push_back({i, j, prod.max_abs_coefficient()});
            ok = ok && rep.orthogonality.back().residual <= tol;
        }
    }
    rep.checked_truncation = seen;
    rep.passed = ok;
    return rep;
}

/// The trivial decomposition {1}.
inline IdempotentDecomposition trivial_decomposition(const AlgebraPresentation& p, const ExponentLattice& lattice,
                                                     Rational truncation = Rational(kDefaultTruncation))
{
    return IdempotentDecomposition{{unit_element(p, lattice, truncation)}, {true}, lattice};
}

// ---------------------------------------------------------------------------
// Table splitting.

using NovikovPolynomial = std::vector<NovikovScalar>; // coefficient of x^i at index i

namespace detail {

inline NovikovScalar horner(const NovikovPolynomial& p, const NovikovScalar& x)
{
    NovikovScalar acc = p.back();
    for (std::size_t i = p.size() - 1; i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline NovikovPolynomial derivative(const NovikovPolynomial& p)
{
    NovikovPolynomial d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Complex(static_cast<double>(i), 0.0));
    if (d.empty()) d.push_back(NovikovScalar::zero(p[0].lattice(), p[0].truncation()));
    return d;
}

inline NovikovPolynomial poly_mul(const NovikovPolynomial& a, const NovikovPolynomial& b)
{
    NovikovPolynomial out(a.size() + b.size() - 1, NovikovScalar::zero(a[0].lattice(), a[0].truncation()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

/// Characteristic polynomial det(x I - A) by Faddeev-LeVerrier (only integer divisions).
inline NovikovPolynomial characteristic_polynomial(const std::vector<std::vector<NovikovScalar>>& a)
{
    const std::size_t n = a.size();
    const ExponentLattice lat = a[0][0].lattice();
    Rational order = a[0][0].truncation();
    for (const auto& row : a)
        for (const auto& s : row) order = std::min(order, s.truncation());
    NovikovPolynomial c(n + 1, NovikovScalar::zero(lat, order));
    c[n] = NovikovScalar::one(lat, order);
    std::vector<std::vector<NovikovScalar>> mk(n, std::vector<NovikovScalar>(n, NovikovScalar::zero(lat, order)));
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        std::vector<std::vector<NovikovScalar>> next(n, std::vector<NovikovScalar>(n, NovikovScalar::zero(lat, order)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t l = 0; l < n; ++l)
                    if (!a[i][l].is_zero() && !mk[l][j].is_zero()) next[i][j] += a[i][l] * mk[l][j];
                if (i == j) next[i][j] += c[n - k + 1];
            }
        mk = std::move(next);
        NovikovScalar trace = NovikovScalar::zero(lat, order);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t l = 0; l < n; ++l)
                if (!a[i][l].is_zero() && !mk[l][i].is_zero()) trace += a[i][l] * mk[l][i];
        c[n - k] = trace * Complex(-1.0 / static_cast<double>(k), 0.0);
    }
    return c;
}

/// Multiplication by exp(2 pi i q d) on the T^q coefficient: the generator of
/// Gal(K'/K) for K the (1/d)Z lattice field.
inline NovikovScalar galois_twist(const NovikovScalar& x, std::int64_t base_denominator)
{
    std::vector<NovikovTerm> out = x.terms();
    for (auto& t : out) {
        const Rational turns = t.exponent * Rational(base_denominator);
        const Rational frac = turns - Rational(static_cast<std::int64_t>(std::floor(to_double(turns))));
        t.coefficient *= std::polar(1.0, 2.0 * std::numbers::pi * to_double(frac));
    }
    return NovikovScalar(x.lattice(), x.truncation(), std::move(out));
}

struct PuiseuxRoot {
    Rational valuation;
    Complex leading;
    NovikovScalar value;
};

/// Roots of p over the ramified extension, or nullopt when the residual
/// polynomials have clustered roots (non-semisimple at this precision).
inline std::optional<std::vector<PuiseuxRoot>> puiseux_roots(const NovikovPolynomial& p, double cluster_tol,
                                                             int newton_steps)
{
    const std::size_t n = p.size() - 1;
    const ExponentLattice base = p[0].lattice();
    std::size_t zero_mult = 0;
    while (zero_mult <= n && p[zero_mult].is_zero()) ++zero_mult;
    if (zero_mult > 1) return std::nullopt;

    // Lower convex hull of (i, nu(c_i)) for i >= zero_mult.
    std::vector<std::size_t> pts;
    for (std::size_t i = zero_mult; i <= n; ++i)
        if (!p[i].is_zero()) pts.push_back(i);
    std::vector<std::size_t> hull;
    for (std::size_t i : pts) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2];
            const std::size_t b = hull.back();
            const Rational va = *p[a].valuation(), vb = *p[b].valuation(), vi = *p[i].valuation();
            // drop b if it lies on or above segment a-i
            if ((vb - va) * Rational(static_cast<std::int64_t>(i - a)) >=
                (vi - va) * Rational(static_cast<std::int64_t>(b - a)))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(i);
    }

    std::vector<std::pair<Rational, Complex>> leads;
    std::int64_t ext = base.denominator();
    for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
        const std::size_t i0 = hull[h], i1 = hull[h + 1];
        const Rational v0 = *p[i0].valuation();
        const Rational mu = (v0 - *p[i1].valuation()) / Rational(static_cast<std::int64_t>(i1 - i0));
        const std::size_t deg = i1 - i0;
        Eigen::VectorXcd coeffs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(deg + 1));
        for (std::size_t i = i0; i <= i1; ++i) {
            if (p[i].is_zero()) continue;
            if (*p[i].valuation() + mu * Rational(static_cast<std::int64_t>(i)) ==
                v0 + mu * Rational(static_cast<std::int64_t>(i0)))
                coeffs(static_cast<Eigen::Index>(i - i0)) = p[i].leading_coefficient();
        }
        // Companion matrix of the monic residual polynomial.
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
        const Complex top = coeffs(static_cast<Eigen::Index>(deg));
        for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(deg); ++r) {
            comp(0, r) = -coeffs(static_cast<Eigen::Index>(deg) - 1 - r) / top;
            if (r + 1 < static_cast<Eigen::Index>(deg)) comp(r + 1, r) = 1.0;
        }
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp);
        const Eigen::VectorXcd ys = es.eigenvalues();
        for (Eigen::Index a = 0; a < ys.size(); ++a)
            for (Eigen::Index b = a + 1; b < ys.size(); ++b)
                if (std::abs(ys(a) - ys(b)) <= cluster_tol * std::max(std::abs(ys(a)), std::abs(ys(b))))
                    return std::nullopt;
        for (Eigen::Index a = 0; a < ys.size(); ++a) leads.emplace_back(mu, ys(a));
        ext = lcm64(ext, mu.denominator());
    }

    const ExponentLattice fine(ext);
    Rational order = p[0].truncation();
    for (const auto& c : p) order = std::min(order, c.truncation());
    NovikovPolynomial pf;
    for (const auto& c : p) pf.push_back(c.on_lattice(fine));
    const NovikovPolynomial dpf = derivative(pf);

    std::vector<PuiseuxRoot> roots;
    if (zero_mult == 1) roots.push_back({Rational(0), Complex(0.0, 0.0), NovikovScalar::zero(fine, order)});
    for (const auto& [mu, y] : leads) {
        NovikovScalar x = NovikovScalar::monomial(y, mu, fine, order);
        for (int s = 0; s < newton_steps; ++s) {
            const NovikovScalar fx = horner(pf, x);
            if (fx.is_zero()) break;
            const NovikovScalar dfx = horner(dpf, x);
            if (dfx.is_zero()) return std::nullopt;
            // coefficients grow with the exponent, so noise is measured against the leading term
            x = (x - fx / dfx).chopped(1e-14 * std::abs(y));
            // keep the root's own precision bounded by the input precision
            x = x.truncated(order + mu);
        }
        roots.push_back({mu, y, x});
    }
    return roots;
}

} // namespace detail

struct TableSplitConfig {
    int attempts = 8;            // generic elements to try
    double cluster_tol = 1e-6;   // relative separation required between residual roots
    double off_lattice_tol = 1e-8;
    int newton_steps = 12;
    std::uint64_t seed = 0x5eed;
};

/// Idempotents of a semisimple table over its lattice field. Throws NonSemisimple
/// when no generic element with separated eigenvalues is found.
inline IdempotentDecomposition split_table(const TablePresentation& t, const TableSplitConfig& cfg = {})
{
    const std::size_t m = t.dim();
    const ExponentLattice lat = t.lattice();
    const AlgebraPresentation pres = t;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    for (int attempt = 0; attempt < cfg.attempts; ++attempt) {
        AlgebraElement a;
        a.coefficients.assign(m, NovikovScalar::zero(lat));
        for (std::size_t i = 0; i < m; ++i) {
            const Complex w = std::polar(unif(rng), phase(rng));
            if (t.unit_basis_index() && *t.unit_basis_index() == i) continue;
            a[i] = NovikovScalar::constant(w, lat);
        }

        // Matrix of multiplication by a: column j = a * b_j.
        std::vector<std::vector<NovikovScalar>> mat(m, std::vector<NovikovScalar>(m));
        for (std::size_t j = 0; j < m; ++j) {
            const AlgebraElement col = t.multiply(a, t.basis(j));
            for (std::size_t l = 0; l < m; ++l) mat[l][j] = col[l];
        }
        NovikovPolynomial chi = detail::characteristic_polynomial(mat);
        double scale = 1.0;
        for (const auto& c : chi) scale = std::max(scale, c.max_abs_coefficient());
        for (auto& c : chi) c = c.chopped(1e-11 * scale);

        const auto roots = detail::puiseux_roots(chi, cfg.cluster_tol, cfg.newton_steps);
        if (!roots) continue;
        const ExponentLattice fine = roots->front().value.lattice();

        // Galois orbits over the base lattice, matched on leading terms.
        const std::size_t nr = roots->size();
        std::vector<int> orbit_of(nr, -1);
        std::vector<std::vector<std::size_t>> orbits;
        bool matched = true;
        for (std::size_t i = 0; i < nr && matched; ++i) {
            if (orbit_of[i] >= 0) continue;
            std::vector<std::size_t> orbit{i};
            orbit_of[i] = static_cast<int>(orbits.size());
            std::size_t cur = i;
            while (true) {
                const auto& r = (*roots)[cur];
                const Complex twisted =
                    r.leading * std::polar(1.0, 2.0 * std::numbers::pi *
                                                    to_double(r.valuation * Rational(lat.denominator())));
                std::size_t next = nr;
                for (std::size_t j = 0; j < nr; ++j) {
                    const auto& s = (*roots)[j];
                    if (s.valuation == r.valuation &&
                        std::abs(s.leading - twisted) <= 1e-6 * std::max(1.0, std::abs(twisted))) {
                        next = j;
                        break;
                    }
                }
                if (next == nr) {
                    matched = false;
                    break;
                }
                if (next == i) break;
                orbit.push_back(next);
                orbit_of[next] = orbit_of[i];
                cur = next;
            }
            orbits.push_back(std::move(orbit));
        }
        if (!matched) continue;

        // Lagrange idempotent of each orbit, evaluated at a over the extension.
        const AlgebraElement a_fine = a.on_lattice(fine);
        const AlgebraElement one_fine = t.unit().on_lattice(fine);
        std::vector<std::pair<std::pair<Rational, double>, AlgebraElement>> idems;
        bool ok = true;
        for (const auto& orbit : orbits) {
            const Rational order = roots->front().value.truncation();
            NovikovPolynomial sum(1, NovikovScalar::zero(fine, order));
            for (std::size_t i : orbit) {
                NovikovPolynomial basis_poly(1, NovikovScalar::one(fine, order));
                NovikovScalar denom = NovikovScalar::one(fine, order);
                for (std::size_t j = 0; j < nr; ++j) {
                    if (j == i) continue;
                    basis_poly = detail::poly_mul(basis_poly, {-(*roots)[j].value, NovikovScalar::one(fine, order)});
                    denom *= (*roots)[i].value - (*roots)[j].value;
                }
                const NovikovScalar inv = denom.inverse();
                for (auto& c : basis_poly) c = c * inv;
                if (sum.size() < basis_poly.size())
                    sum.resize(basis_poly.size(), NovikovScalar::zero(fine, order));
                for (std::size_t d = 0; d < basis_poly.size(); ++d) sum[d] += basis_poly[d];
            }
            // Horner in the algebra.
            AlgebraElement e = sum.back() * one_fine;
            for (std::size_t d = sum.size() - 1; d-- > 0;) e = t.multiply(e, a_fine) + sum[d] * one_fine;

            // Project back onto the base lattice.
            AlgebraElement projected;
            double dropped = 0.0;
            for (const auto& x : e.coefficients) {
                std::vector<NovikovTerm> keep;
                for (const auto& term : x.terms()) {
                    if (lat.contains(term.exponent)) keep.push_back(term);
                    else dropped = std::max(dropped, std::abs(term.coefficient));
                }
                Rational tr = x.truncation();
                projected.coefficients.emplace_back(lat, tr, std::move(keep));
            }
            if (dropped > cfg.off_lattice_tol * std::max(1.0, e.max_abs_coefficient())) {
                ok = false;
                break;
            }
            for (auto& x : projected.coefficients) x = x.chopped(1e-13);
            // Idempotent refinement e <- 3e^2 - 2e^3 while it helps.
            for (int it = 0; it < 3; ++it) {
                const AlgebraElement e2 = t.multiply(projected, projected);
                if ((e2 - projected).max_abs_coefficient() <= 1e-13) break;
                const AlgebraElement e3 = t.multiply(e2, projected);
                AlgebraElement next = NovikovScalar::constant(3.0, lat) * e2 - NovikovScalar::constant(2.0, lat) * e3;
                for (auto& x : next.coefficients) x = x.chopped(1e-13);
                projected = std::move(next);
            }

            // Sort key: (valuation, argument) of the orbit's first root in canonical order.
            std::pair<Rational, double> key{Rational(1000000), 0.0};
            for (std::size_t i : orbit) {
                const auto& r = (*roots)[i];
                double arg = std::arg(r.leading);
                if (arg < 0) arg += 2.0 * std::numbers::pi;
                if (arg > 2.0 * std::numbers::pi - 1e-9) arg = 0.0;
                if (r.leading == Complex(0.0, 0.0)) arg = -1.0; // the zero root sorts first
                const std::pair<Rational, double> k{r.leading == Complex(0.0, 0.0) ? Rational(-1000000) : r.valuation,
                                                    arg};
                if (k < key) key = k;
            }
            idems.emplace_back(key, std::move(projected));
        }
        if (!ok) continue;
        std::sort(idems.begin(), idems.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        IdempotentDecomposition out;
        out.lattice = lat;
        for (auto& [k, e] : idems) {
            out.idempotents.push_back(std::move(e));
            out.field_factor_flags.push_back(true);
        }
        return out;
    }
    throw NonSemisimple("table is not split into fields at this truncation: no generic element with separated "
                        "eigenvalues was found (non-semisimple or ill-conditioned)");
}

} // namespace gysinkit
