#pragma once

// Laurent-polynomial superpotentials on (C*)^k, their logarithmic derivatives
// (z_j d/dz_j) and a deterministic Newton multistart for critical points in
// the logarithmic chart u = log z.

#include "gysinkit/coeff_fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gysinkit {

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Exponents = std::vector<int>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct Monomial {
    Exponents exponents;
    Complex coefficient;

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Sum of coefficient * z^exponents; exponent vectors are unique and coefficients nonzero.
class SuperpotentialPoly {
public:
    SuperpotentialPoly() = default;

    SuperpotentialPoly(std::size_t num_vars, std::vector<Monomial> monomials) : num_vars_(num_vars)
    {
        std::map<Exponents, Complex> merged;
        for (auto& m : monomials) {
            if (m.exponents.size() != num_vars)
                throw DimensionMismatch("monomial exponent vector has length " + std::to_string(m.exponents.size()) +
                                        ", expected " + std::to_string(num_vars));
            merged[m.exponents] += m.coefficient;
        }
        for (auto& [e, c] : merged)
            if (c != Complex(0.0, 0.0)) monomials_.push_back({e, c});
    }

    [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
    [[nodiscard]] const std::vector<Monomial>& monomials() const { return monomials_; }

    friend bool operator==(const SuperpotentialPoly&, const SuperpotentialPoly&) = default;

private:
    std::size_t num_vars_ = 0;
    std::vector<Monomial> monomials_; // sorted by exponent vector
};

/// A rank-one local system, i.e. a point of (C*)^k.
class LocalSystem {
public:
    LocalSystem() = default;
    explicit LocalSystem(std::vector<Complex> point) : point_(std::move(point))
    {
        for (const auto& z : point_)
            if (z == Complex(0.0, 0.0)) throw std::invalid_argument("local system entries must be nonzero");
    }

    [[nodiscard]] std::size_t size() const { return point_.size(); }
    [[nodiscard]] const std::vector<Complex>& point() const { return point_; }
    [[nodiscard]] Complex operator[](std::size_t i) const { return point_[i]; }

    /// rho(boundary class) = z^exponents.
    [[nodiscard]] Complex holonomy(const Exponents& e) const
    {
        Complex out(1.0, 0.0);
        for (std::size_t j = 0; j < e.size(); ++j) out *= int_pow(point_[j], e[j]);
        return out;
    }

    static Complex int_pow(Complex z, int n)
    {
        if (n < 0) return Complex(1.0, 0.0) / int_pow(z, -n);
        Complex result(1.0, 0.0);
        while (n > 0) {
            if (n & 1) result *= z;
            z *= z;
            n >>= 1;
        }
        return result;
    }

private:
    std::vector<Complex> point_;
};

namespace detail {
inline void check_dims(const SuperpotentialPoly& w, const LocalSystem& rho)
{
    if (w.num_vars() != rho.size())
        throw DimensionMismatch("superpotential has " + std::to_string(w.num_vars()) +
                                " variables but the local system has " + std::to_string(rho.size()) + " entries");
}
} // namespace detail

inline Complex evaluate(const SuperpotentialPoly& w, const LocalSystem& rho)
{
    detail::check_dims(w, rho);
    Complex sum(0.0, 0.0);
    for (const auto& m : w.monomials()) sum += m.coefficient * rho.holonomy(m.exponents);
    return sum;
}

/// Component j is (z_j dW/dz_j)(rho).
inline ComplexVector log_gradient(const SuperpotentialPoly& w, const LocalSystem& rho)
{
    detail::check_dims(w, rho);
    const auto k = static_cast<Eigen::Index>(w.num_vars());
    ComplexVector g = ComplexVector::Zero(k);
    for (const auto& m : w.monomials()) {
        const Complex term = m.coefficient * rho.holonomy(m.exponents);
        for (Eigen::Index j = 0; j < k; ++j) g(j) += static_cast<double>(m.exponents[j]) * term;
    }
    return g;
}

/// H_ij = (z_i d_i)(z_j d_j) W at rho, the Hessian of W(exp u).
inline ComplexMatrix log_hessian(const SuperpotentialPoly& w, const LocalSystem& rho)
{
    detail::check_dims(w, rho);
    const auto k = static_cast<Eigen::Index>(w.num_vars());
    ComplexMatrix h = ComplexMatrix::Zero(k, k);
    for (const auto& m : w.monomials()) {
        const Complex term = m.coefficient * rho.holonomy(m.exponents);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j)
                h(i, j) += static_cast<double>(m.exponents[i] * m.exponents[j]) * term;
    }
    return h;
}

struct CriticalSearchConfig {
    int grid_density = 8;                      // arguments at the m-th roots of unity
    double newton_tol = 1e-12;                 // converged when |log gradient| <= newton_tol
    int max_iter = 60;
    double dedupe_radius = 1e-6;               // in log coordinates
    std::vector<double> moduli{0.5, 1.0, 2.0}; // starting moduli per variable
    double nondegeneracy_tol = 1e-8;           // |det log Hessian| threshold
    double divergence_bound = 40.0;            // abandon a start once |Re u_j| exceeds this
};

struct CriticalPointReport {
    LocalSystem point;
    double residual = 0.0;
    Complex critical_value;
    Complex log_hessian_det;
    bool nondegenerate = false;
};

struct CriticalSearchResult {
    std::vector<CriticalPointReport> points;
    std::size_t starts = 0;
    std::size_t converged = 0;
    std::size_t diverged = 0;      // left the search box or produced non-finite values
    std::size_t stalled = 0;       // hit max_iter without meeting the tolerance
    std::size_t singular = 0;      // singular Newton system
};

namespace detail {

inline double wrapped_log_distance(const LocalSystem& a, const LocalSystem& b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(std::log(a[j] / b[j]));
    return std::sqrt(s);
}

/// Canonical argument in [0, 2*pi), snapping values within 1e-9 of 2*pi to 0.
inline double canonical_arg(Complex z)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double a = std::arg(z);
    if (a < 0) a += two_pi;
    if (a > two_pi - 1e-9) a = 0.0;
    return a;
}

inline bool canonical_less(const CriticalPointReport& x, const CriticalPointReport& y)
{
    constexpr double snap = 1e-9;
    for (std::size_t j = 0; j < x.point.size(); ++j) {
        const double ax = canonical_arg(x.point[j]);
        const double ay = canonical_arg(y.point[j]);
        if (std::abs(ax - ay) > snap) return ax < ay;
        const double mx = std::abs(x.point[j]);
        const double my = std::abs(y.point[j]);
        if (std::abs(mx - my) > snap * std::max(1.0, mx)) return mx < my;
    }
    return false;
}

} // namespace detail

/// Certifies a point: residual, critical value, log-Hessian determinant and nondegeneracy.
inline CriticalPointReport certify_critical_point(const SuperpotentialPoly& w, const LocalSystem& rho,
                                                  double nondegeneracy_tol = 1e-8)
{
    CriticalPointReport r;
    r.point = rho;
    r.residual = log_gradient(w, rho).norm();
    r.critical_value = evaluate(w, rho);
    r.log_hessian_det = log_hessian(w, rho).determinant();
    r.nondegenerate = std::abs(r.log_hessian_det) > nondegeneracy_tol;
    return r;
}

namespace detail {

enum class NewtonOutcome { converged, diverged, stalled, singular };

/// Damped Newton on the log gradient of sum_m c_m exp(<e_m, u>). MaxK bounds
/// the number of variables so the small vectors and matrices stay on the stack.
template <int MaxK>
class LogNewton {
public:
    using Vec = Eigen::Matrix<Complex, Eigen::Dynamic, 1, 0, MaxK, 1>;
    using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, MaxK, MaxK>;

    LogNewton(const SuperpotentialPoly& w, const CriticalSearchConfig& cfg)
        : k_(static_cast<Eigen::Index>(w.num_vars())), cfg_(cfg)
    {
        for (const auto& m : w.monomials()) {
            coeff_.push_back(m.coefficient);
            for (int x : m.exponents) exps_.push_back(static_cast<double>(x));
        }
        terms_.resize(coeff_.size());
    }

    NewtonOutcome solve(Vec& u, double& residual)
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        Vec g(k_);
        Vec trial(k_);
        Vec gt(k_);
        Mat h(k_, k_);
        double gn = gradient(u, g);
        for (int it = 0; it <= cfg_.max_iter; ++it) {
            if (!std::isfinite(gn)) return NewtonOutcome::diverged;
            if (gn <= cfg_.newton_tol) {
                // One polishing step; keep it only if it does not make things worse.
                residual = gn;
                hessian(h);
                const Vec step = Eigen::PartialPivLU<Mat>(h).solve(g);
                if (step.allFinite()) {
                    trial = u - step;
                    const double n2 = gradient(trial, gt);
                    if (std::isfinite(n2) && n2 < gn) {
                        u = trial;
                        residual = n2;
                    }
                }
                return NewtonOutcome::converged;
            }
            if (it == cfg_.max_iter) return NewtonOutcome::stalled;
            hessian(h);
            const Eigen::PartialPivLU<Mat> lu(h);
            if (!invertible(lu)) return NewtonOutcome::singular;
            const Vec step = lu.solve(g);
            if (!step.allFinite()) return NewtonOutcome::singular;
            // Backtracking: halve the step while the gradient norm grows.
            double scale = 1.0;
            double tn = 0.0;
            for (int b = 0; b < 8; ++b) {
                trial = u - scale * step;
                tn = gradient(trial, gt);
                if (std::isfinite(tn) && tn < gn) break;
                scale *= 0.5;
            }
            u = trial;
            for (Eigen::Index j = 0; j < k_; ++j) {
                if (std::abs(u(j).real()) > cfg_.divergence_bound) return NewtonOutcome::diverged;
                // keep the imaginary part in [-pi, pi]; the gradient is 2*pi*i periodic
                u(j) = Complex(u(j).real(), std::remainder(u(j).imag(), two_pi));
            }
            g = gt;
            gn = tn;
        }
        return NewtonOutcome::stalled;
    }

private:
    // Fills terms_ at u and writes the log gradient into g; returns its norm.
    double gradient(const Vec& u, Vec& g)
    {
        g.setZero();
        for (std::size_t m = 0; m < coeff_.size(); ++m) {
            const double* e = &exps_[m * static_cast<std::size_t>(k_)];
            Complex phase(0.0, 0.0);
            for (Eigen::Index j = 0; j < k_; ++j) phase += e[j] * u(j);
            terms_[m] = coeff_[m] * std::exp(phase);
            for (Eigen::Index j = 0; j < k_; ++j) g(j) += e[j] * terms_[m];
        }
        return g.norm();
    }

    // Pivot ratio test equivalent in spirit to FullPivLU::isInvertible.
    static bool invertible(const Eigen::PartialPivLU<Mat>& lu)
    {
        const auto d = lu.matrixLU().diagonal().cwiseAbs();
        const double big = d.maxCoeff();
        return big > 0 && d.minCoeff() > big * 1e-13;
    }

    // Log Hessian from the terms of the last gradient() call.
    void hessian(Mat& h) const
    {
        h.setZero();
        for (std::size_t m = 0; m < coeff_.size(); ++m) {
            const double* e = &exps_[m * static_cast<std::size_t>(k_)];
            for (Eigen::Index i = 0; i < k_; ++i)
                for (Eigen::Index j = 0; j < k_; ++j) h(i, j) += e[i] * e[j] * terms_[m];
        }
    }

    Eigen::Index k_;
    const CriticalSearchConfig& cfg_;
    std::vector<Complex> coeff_;
    std::vector<double> exps_;
    std::vector<Complex> terms_;
};

template <int MaxK>
CriticalSearchResult multistart(const SuperpotentialPoly& w, const CriticalSearchConfig& cfg)
{
    const std::size_t k = w.num_vars();
    const std::size_t per_var = static_cast<std::size_t>(cfg.grid_density) * cfg.moduli.size();
    std::vector<Complex> seeds;
    seeds.reserve(per_var);
    for (int a = 0; a < cfg.grid_density; ++a) {
        const double theta = 2.0 * std::numbers::pi * a / cfg.grid_density;
        for (double r : cfg.moduli) seeds.emplace_back(std::log(r), theta);
    }

    LogNewton<MaxK> newton(w, cfg);
    typename LogNewton<MaxK>::Vec u(static_cast<Eigen::Index>(k));
    CriticalSearchResult result;
    std::vector<CriticalPointReport> found;
    std::vector<std::size_t> index(k, 0);
    std::vector<Complex> z(k);
    while (true) {
        ++result.starts;
        for (std::size_t j = 0; j < k; ++j) u(static_cast<Eigen::Index>(j)) = seeds[index[j]];
        double residual = 0.0;
        switch (newton.solve(u, residual)) {
        case NewtonOutcome::diverged: ++result.diverged; break;
        case NewtonOutcome::stalled: ++result.stalled; break;
        case NewtonOutcome::singular: ++result.singular; break;
        case NewtonOutcome::converged: {
            ++result.converged;
            for (std::size_t j = 0; j < k; ++j) z[j] = std::exp(u(static_cast<Eigen::Index>(j)));
            // Certification is only needed for new points or better representatives.
            const LocalSystem candidate(z);
            auto near = std::find_if(found.begin(), found.end(), [&](const CriticalPointReport& f) {
                return wrapped_log_distance(f.point, candidate) < cfg.dedupe_radius;
            });
            if (near == found.end() || residual < near->residual) {
                CriticalPointReport rep = certify_critical_point(w, candidate, cfg.nondegeneracy_tol);
                if (rep.residual <= cfg.newton_tol) {
                    if (near == found.end())
                        found.push_back(std::move(rep));
                    else if (rep.residual < near->residual)
                        *near = std::move(rep);
                }
            }
            break;
        }
        }

        std::size_t j = 0;
        while (j < k && ++index[j] == per_var) index[j++] = 0;
        if (j == k) break;
    }
    std::sort(found.begin(), found.end(), canonical_less);
    result.points = std::move(found);
    return result;
}

} // namespace detail

/// Damped Newton iteration on the log gradient in u = log z from a grid of
/// (argument, modulus) starts; converged points are deduplicated and sorted
/// canonically, so the result is independent of the start order. Completeness
/// of the critical set is not guaranteed.
inline CriticalSearchResult find_critical_points(const SuperpotentialPoly& w, const CriticalSearchConfig& cfg = {})
{
    if (w.num_vars() == 0) throw std::invalid_argument("find_critical_points needs at least one variable");
    if (cfg.grid_density < 1 || cfg.moduli.empty() || cfg.max_iter < 1 || !(cfg.newton_tol > 0) ||
        !(cfg.dedupe_radius > 0))
        throw std::invalid_argument("invalid critical-point search configuration");
    for (double r : cfg.moduli)
        if (!(r > 0)) throw std::invalid_argument("starting moduli must be positive");
    if (w.num_vars() <= 8) return detail::multistart<8>(w, cfg);
    return detail::multistart<Eigen::Dynamic>(w, cfg);
}

/// Names accepted by builtin().
inline const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{"clifford_cp", "gz_quadric", "chekanov_cp3", "chekanov_q2"};
    return names;
}

/// Built-in superpotentials of monotone tori.
///   clifford_cp(n):  z_1 + ... + z_n + 1/(z_1...z_n),                        n >= 1
///   gz_quadric(n):   1/z_n + z_n/z_{n-1} + ... + z_2/z_1 + 2 z_2 + z_1 z_2,   n >= 2
///   chekanov_cp3:    (z_1 + z_1/z_2 + z_2/z_1 + 1/z_1)/z_3 + z_3,             n = 3
///   chekanov_q2:     z_1 + z_1/z_2 + z_2/z_1 + 1/z_1,                         n = 2
/// For the fixed-dimension families n = 0 means "the only valid value".
inline SuperpotentialPoly builtin(std::string_view name, int n = 0)
{
    auto unit = [](std::size_t k, std::size_t j, int power) {
        Exponents e(k, 0);
        e[j] = power;
        return e;
    };
    if (name == "clifford_cp") {
        if (n < 1) throw std::invalid_argument("clifford_cp needs n >= 1");
        const auto k = static_cast<std::size_t>(n);
        std::vector<Monomial> ms;
        for (std::size_t j = 0; j < k; ++j) ms.push_back({unit(k, j, 1), 1.0});
        ms.push_back({Exponents(k, -1), 1.0});
        return SuperpotentialPoly(k, std::move(ms));
    }
    if (name == "gz_quadric") {
        if (n < 2) throw std::invalid_argument("gz_quadric needs n >= 2");
        const auto k = static_cast<std::size_t>(n);
        std::vector<Monomial> ms;
        ms.push_back({unit(k, k - 1, -1), 1.0});
        for (std::size_t j = k - 1; j >= 1; --j) {
            Exponents e(k, 0);
            e[j] = 1;
            e[j - 1] = -1;
            ms.push_back({e, 1.0});
        }
        ms.push_back({unit(k, 1, 1), 2.0});
        Exponents e12(k, 0);
        e12[0] = 1;
        e12[1] = 1;
        ms.push_back({e12, 1.0});
        return SuperpotentialPoly(k, std::move(ms));
    }
    if (name == "chekanov_q2") {
        if (n != 0 && n != 2) throw std::invalid_argument("chekanov_q2 is only defined for n = 2");
        return SuperpotentialPoly(2, {{{1, 0}, 1.0}, {{1, -1}, 1.0}, {{-1, 1}, 1.0}, {{-1, 0}, 1.0}});
    }
    if (name == "chekanov_cp3") {
        if (n != 0 && n != 3) throw std::invalid_argument("chekanov_cp3 is only defined for n = 3");
        return SuperpotentialPoly(
            3, {{{1, 0, -1}, 1.0}, {{1, -1, -1}, 1.0}, {{-1, 1, -1}, 1.0}, {{-1, 0, -1}, 1.0}, {{0, 0, 1}, 1.0}});
    }
    throw std::invalid_argument("unknown superpotential family '" + std::string(name) + "'");
}

} // namespace gysinkit
