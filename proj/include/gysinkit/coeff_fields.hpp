#pragma once

// Truncated Novikov / Laurent scalars: finite sums  sum_j a_j T^{lambda_j}
// with exact rational exponents on a lattice (1/d)Z, complex coefficients and
// an explicit truncation order N (everything at exponent >= N is unknown).
// d = 1 is the Laurent field, d > 1 a fractional-exponent subfield of the
// universal Novikov field.

#include "gysinkit/rational.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gysinkit {

using Complex = std::complex<double>;

inline constexpr std::int64_t kDefaultTruncation = 10;
inline constexpr double kDefaultCoefficientTolerance = 1e-10;

class LatticeMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Exponent lattice (1/d)Z.
class ExponentLattice {
public:
    constexpr ExponentLattice() = default;
    explicit ExponentLattice(std::int64_t denominator) : denominator_(denominator)
    {
        if (denominator < 1) throw std::invalid_argument("lattice denominator must be >= 1");
    }

    [[nodiscard]] std::int64_t denominator() const { return denominator_; }

    [[nodiscard]] bool contains(const Rational& q) const { return denominator_ % q.denominator() == 0; }

    /// True when every point of `coarser` lies on this lattice.
    [[nodiscard]] bool refines(const ExponentLattice& coarser) const
    {
        return denominator_ % coarser.denominator_ == 0;
    }

    [[nodiscard]] ExponentLattice join(const ExponentLattice& other) const
    {
        return ExponentLattice(lcm64(denominator_, other.denominator_));
    }

    friend bool operator==(const ExponentLattice&, const ExponentLattice&) = default;

private:
    std::int64_t denominator_ = 1;
};

struct NovikovTerm {
    Rational exponent;
    Complex coefficient;

    friend bool operator==(const NovikovTerm&, const NovikovTerm&) = default;
};

class NovikovScalar {
public:
    NovikovScalar() : truncation_(kDefaultTruncation) {}

    NovikovScalar(ExponentLattice lattice, Rational truncation, std::vector<NovikovTerm> terms)
        : lattice_(lattice), truncation_(truncation), terms_(std::move(terms))
    {
        canonicalize();
    }

    static NovikovScalar zero(ExponentLattice lattice = ExponentLattice{},
                              Rational truncation = Rational(kDefaultTruncation))
    {
        return NovikovScalar(lattice, truncation, {});
    }

    static NovikovScalar monomial(Complex coefficient, Rational exponent,
                                  ExponentLattice lattice = ExponentLattice{},
                                  Rational truncation = Rational(kDefaultTruncation))
    {
        return NovikovScalar(lattice, truncation, {{exponent, coefficient}});
    }

    static NovikovScalar constant(Complex coefficient, ExponentLattice lattice = ExponentLattice{},
                                  Rational truncation = Rational(kDefaultTruncation))
    {
        return monomial(coefficient, Rational(0), lattice, truncation);
    }

    static NovikovScalar one(ExponentLattice lattice = ExponentLattice{},
                             Rational truncation = Rational(kDefaultTruncation))
    {
        return constant(1.0, lattice, truncation);
    }

    [[nodiscard]] const ExponentLattice& lattice() const { return lattice_; }
    [[nodiscard]] const Rational& truncation() const { return truncation_; }
    [[nodiscard]] const std::vector<NovikovTerm>& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }

    /// Least exponent with nonzero coefficient; std::nullopt stands for +infinity.
    [[nodiscard]] std::optional<Rational> valuation() const
    {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().exponent;
    }

    [[nodiscard]] Complex leading_coefficient() const
    {
        if (terms_.empty()) throw std::domain_error("leading coefficient of zero scalar");
        return terms_.front().coefficient;
    }

    [[nodiscard]] Complex coefficient_at(const Rational& exponent) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent,
                                   [](const NovikovTerm& t, const Rational& e) { return t.exponent < e; });
        if (it != terms_.end() && it->exponent == exponent) return it->coefficient;
        return {0.0, 0.0};
    }

    [[nodiscard]] double max_abs_coefficient() const
    {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, std::abs(t.coefficient));
        return m;
    }

    /// Same value on a finer lattice.
    [[nodiscard]] NovikovScalar on_lattice(const ExponentLattice& finer) const
    {
        if (!finer.refines(lattice_)) throw LatticeMismatch("target lattice does not contain the source lattice");
        return NovikovScalar(finer, truncation_, terms_);
    }

    /// Lowers the truncation order to min(current, order).
    [[nodiscard]] NovikovScalar truncated(const Rational& order) const
    {
        return NovikovScalar(lattice_, std::min(order, truncation_), terms_);
    }

    /// Drops coefficients with modulus <= tol.
    [[nodiscard]] NovikovScalar chopped(double tol) const
    {
        std::vector<NovikovTerm> kept;
        kept.reserve(terms_.size());
        for (const auto& t : terms_)
            if (std::abs(t.coefficient) > tol) kept.push_back(t);
        return NovikovScalar(lattice_, truncation_, std::move(kept));
    }

    /// Multiplication by T^shift; the truncation order moves with it.
    [[nodiscard]] NovikovScalar shifted(const Rational& shift) const
    {
        if (!lattice_.contains(shift)) throw LatticeMismatch("shift exponent is off the lattice");
        std::vector<NovikovTerm> out = terms_;
        for (auto& t : out) t.exponent += shift;
        return NovikovScalar(lattice_, truncation_ + shift, std::move(out));
    }

    [[nodiscard]] NovikovScalar inverse() const
    {
        if (terms_.empty()) throw std::domain_error("inverse of zero scalar");
        const Rational v = terms_.front().exponent;
        const Complex c0 = terms_.front().coefficient;
        const Rational precision = truncation_ - v; // relative precision of a

        // a = c0 T^v (1 + u) with nu(u) > 0; 1/(1+u) = sum (-u)^j.
        std::vector<NovikovTerm> minus_u;
        for (std::size_t i = 1; i < terms_.size(); ++i)
            minus_u.push_back({terms_[i].exponent - v, -terms_[i].coefficient / c0});
        const NovikovScalar step(lattice_, precision, std::move(minus_u));

        NovikovScalar sum = one(lattice_, precision);
        NovikovScalar power = sum;
        while (true) {
            power = multiply_truncated(power, step, precision);
            if (power.is_zero()) break;
            sum = sum + power;
        }
        std::vector<NovikovTerm> out = sum.terms_;
        for (auto& t : out) {
            t.exponent -= v;
            t.coefficient /= c0;
        }
        return NovikovScalar(lattice_, precision - v, std::move(out));
    }

    friend NovikovScalar operator+(const NovikovScalar& a, const NovikovScalar& b)
    {
        check_lattice(a, b);
        std::vector<NovikovTerm> merged;
        merged.reserve(a.terms_.size() + b.terms_.size());
        merged.insert(merged.end(), a.terms_.begin(), a.terms_.end());
        merged.insert(merged.end(), b.terms_.begin(), b.terms_.end());
        return NovikovScalar(a.lattice_, std::min(a.truncation_, b.truncation_), std::move(merged));
    }

    friend NovikovScalar operator-(const NovikovScalar& a) { return a * Complex(-1.0, 0.0); }

    friend NovikovScalar operator-(const NovikovScalar& a, const NovikovScalar& b) { return a + (-b); }

    friend NovikovScalar operator*(const NovikovScalar& a, Complex s)
    {
        std::vector<NovikovTerm> out = a.terms_;
        for (auto& t : out) t.coefficient *= s;
        return NovikovScalar(a.lattice_, a.truncation_, std::move(out));
    }

    friend NovikovScalar operator*(Complex s, const NovikovScalar& a) { return a * s; }

    /// Cauchy product truncated at min(nu(a) + N_b, nu(b) + N_a).
    friend NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b)
    {
        check_lattice(a, b);
        Rational order;
        if (a.is_zero() && b.is_zero()) order = a.truncation_ + b.truncation_;
        else if (a.is_zero()) order = *b.valuation() + a.truncation_;
        else if (b.is_zero()) order = *a.valuation() + b.truncation_;
        else order = std::min(*a.valuation() + b.truncation_, *b.valuation() + a.truncation_);
        return multiply_truncated(a, b, order);
    }

    friend NovikovScalar operator/(const NovikovScalar& a, const NovikovScalar& b) { return a * b.inverse(); }

    NovikovScalar& operator+=(const NovikovScalar& o) { return *this = *this + o; }
    NovikovScalar& operator-=(const NovikovScalar& o) { return *this = *this - o; }
    NovikovScalar& operator*=(const NovikovScalar& o) { return *this = *this * o; }

    /// Bit-level equality of canonical forms (lattice, truncation, terms).
    friend bool operator==(const NovikovScalar&, const NovikovScalar&) = default;

private:
    static void check_lattice(const NovikovScalar& a, const NovikovScalar& b)
    {
        if (!(a.lattice_ == b.lattice_))
            throw LatticeMismatch("Novikov scalars live on different lattices (1/" +
                                  std::to_string(a.lattice_.denominator()) + ")Z and (1/" +
                                  std::to_string(b.lattice_.denominator()) + ")Z");
    }

    static NovikovScalar multiply_truncated(const NovikovScalar& a, const NovikovScalar& b, const Rational& order)
    {
        std::vector<NovikovTerm> out;
        out.reserve(a.terms_.size() * b.terms_.size());
        for (const auto& x : a.terms_) {
            for (const auto& y : b.terms_) {
                const Rational e = x.exponent + y.exponent;
                if (e >= order) break; // b's exponents are increasing
                out.push_back({e, x.coefficient * y.coefficient});
            }
        }
        return NovikovScalar(a.lattice_, order, std::move(out));
    }

    void canonicalize()
    {
        for (const auto& t : terms_)
            if (!lattice_.contains(t.exponent))
                throw LatticeMismatch("exponent " + to_string(t.exponent) + " is off the lattice (1/" +
                                      std::to_string(lattice_.denominator()) + ")Z");
        if (!lattice_.contains(truncation_)) {
            // Round the truncation down onto the lattice; terms at or above it are unknown anyway.
            const std::int64_t d = lattice_.denominator();
            const Rational scaled = truncation_ * d;
            std::int64_t floor_num = scaled.numerator() / scaled.denominator();
            if (scaled.numerator() < 0 && scaled.numerator() % scaled.denominator() != 0) --floor_num;
            truncation_ = Rational(floor_num, d);
        }
        std::stable_sort(terms_.begin(), terms_.end(),
                         [](const NovikovTerm& x, const NovikovTerm& y) { return x.exponent < y.exponent; });
        std::vector<NovikovTerm> out;
        out.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (t.exponent >= truncation_) break;
            if (!out.empty() && out.back().exponent == t.exponent) out.back().coefficient += t.coefficient;
            else out.push_back(t);
        }
        std::erase_if(out, [](const NovikovTerm& t) { return t.coefficient == Complex(0.0, 0.0); });
        terms_ = std::move(out);
    }

    ExponentLattice lattice_{};
    Rational truncation_;
    std::vector<NovikovTerm> terms_;
};

/// Coefficientwise comparison on every exponent below both truncation orders.
inline bool approx_equal(const NovikovScalar& a, const NovikovScalar& b,
                         double tol = kDefaultCoefficientTolerance)
{
    if (!(a.lattice() == b.lattice())) return false;
    const Rational order = std::min(a.truncation(), b.truncation());
    for (const auto& t : a.terms())
        if (t.exponent < order && std::abs(t.coefficient - b.coefficient_at(t.exponent)) > tol) return false;
    for (const auto& t : b.terms())
        if (t.exponent < order && std::abs(t.coefficient - a.coefficient_at(t.exponent)) > tol) return false;
    return true;
}

/// Largest coefficient modulus of a - b below both truncation orders.
inline double residual(const NovikovScalar& a, const NovikovScalar& b)
{
    const NovikovScalar diff = a - b;
    return diff.max_abs_coefficient();
}

} // namespace gysinkit
