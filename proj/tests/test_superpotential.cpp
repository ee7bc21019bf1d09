#include "gysinkit/superpotential.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace gysinkit;
using namespace gysinkit::testing;

namespace {

SuperpotentialPoly z_plus_inverse() { return SuperpotentialPoly(1, {{{1}, 1.0}, {{-1}, 1.0}}); }

} // namespace

TEST(Superpotential, EvaluateExamples)
{
    EXPECT_EQ(evaluate(z_plus_inverse(), LocalSystem({1.0})), Complex(2.0, 0.0));
    EXPECT_LT(std::abs(evaluate(z_plus_inverse(), LocalSystem({Complex(0.0, 1.0)}))), 1e-15);
    for (int n = 1; n <= 6; ++n)
        EXPECT_EQ(evaluate(builtin("clifford_cp", n), LocalSystem(std::vector<Complex>(n, 1.0))),
                  Complex(n + 1.0, 0.0));
    EXPECT_THROW((void)evaluate(z_plus_inverse(), LocalSystem({1.0, 1.0})), DimensionMismatch);
}

TEST(Superpotential, GradientAndHessianExamples)
{
    EXPECT_EQ(log_gradient(z_plus_inverse(), LocalSystem({1.0}))(0), Complex(0.0, 0.0));
    EXPECT_EQ(log_hessian(z_plus_inverse(), LocalSystem({1.0}))(0, 0), Complex(2.0, 0.0));
    for (int n = 1; n <= 5; ++n)
        EXPECT_EQ(log_gradient(builtin("clifford_cp", n), LocalSystem(std::vector<Complex>(n, 1.0))).norm(), 0.0);
}

TEST(Superpotential, RejectsZeroEntriesAndDuplicateMonomialsMerge)
{
    EXPECT_THROW(LocalSystem({1.0, 0.0}), std::invalid_argument);
    const SuperpotentialPoly w(1, {{{1}, 1.0}, {{1}, -1.0}, {{2}, 3.0}});
    ASSERT_EQ(w.monomials().size(), 1u);
    EXPECT_EQ(w.monomials()[0].exponents, Exponents{2});
}

TEST(Superpotential, BuiltinTranscriptions)
{
    const auto c2 = builtin("clifford_cp", 2);
    const std::vector<Monomial> want_c2{{{-1, -1}, 1.0}, {{0, 1}, 1.0}, {{1, 0}, 1.0}};
    EXPECT_EQ(c2.monomials(), want_c2);

    const auto q2 = builtin("chekanov_q2");
    const std::vector<Monomial> want_q2{{{-1, 0}, 1.0}, {{-1, 1}, 1.0}, {{1, -1}, 1.0}, {{1, 0}, 1.0}};
    EXPECT_EQ(q2.monomials(), want_q2);

    const auto gz = builtin("gz_quadric", 3);
    const std::vector<Monomial> want_gz{
        {{0, -1, 1}, 1.0}, {{0, 0, -1}, 1.0}, {{0, 1, 0}, 2.0}, {{-1, 1, 0}, 1.0}, {{1, 1, 0}, 1.0}};
    auto sorted = want_gz;
    std::sort(sorted.begin(), sorted.end(), [](const Monomial& a, const Monomial& b) { return a.exponents < b.exponents; });
    EXPECT_EQ(gz.monomials(), sorted);

    const auto cp3 = builtin("chekanov_cp3");
    EXPECT_EQ(cp3.num_vars(), 3u);
    EXPECT_EQ(cp3.monomials().size(), 5u);

    EXPECT_THROW((void)builtin("nope"), std::invalid_argument);
    EXPECT_THROW((void)builtin("clifford_cp", 0), std::invalid_argument);
    EXPECT_THROW((void)builtin("chekanov_q2", 3), std::invalid_argument);
}

TEST(SuperpotentialProperty, DerivativesMatchFiniteDifferences)
{
    Rng rng(21);
    for (const auto& name : builtin_names()) {
        const auto w = name == "clifford_cp" ? builtin(name, 3) : name == "gz_quadric" ? builtin(name, 3) : builtin(name);
        for (int i = 0; i < 50; ++i) {
            const auto rho = random_local_system(rng, w.num_vars());
            const ComplexVector g = log_gradient(w, rho);
            const ComplexVector fg = fd_gradient(w, rho);
            EXPECT_LT((g - fg).norm() / std::max(1.0, g.norm()), 1e-6) << name;
            const ComplexMatrix h = log_hessian(w, rho);
            const ComplexMatrix fh = fd_hessian(w, rho);
            EXPECT_LT((h - fh).norm() / std::max(1.0, h.norm()), 1e-5) << name;
        }
    }
}

TEST(SuperpotentialProperty, HessianIsSymmetric)
{
    Rng rng(22);
    for (int i = 0; i < 50; ++i) {
        const std::size_t k = 1 + rng() % 4;
        const auto w = random_poly(rng, k);
        const auto h = log_hessian(w, random_local_system(rng, k));
        EXPECT_EQ((h - h.transpose()).norm(), 0.0);
    }
}

TEST(CriticalSearch, CliffordCP1)
{
    const auto r = find_critical_points(z_plus_inverse());
    ASSERT_EQ(r.points.size(), 2u);
    EXPECT_LT(std::abs(r.points[0].point[0] - 1.0), 1e-12);
    EXPECT_LT(std::abs(r.points[1].point[0] + 1.0), 1e-12);
    EXPECT_LT(rel_err(r.points[0].critical_value, 2.0), 1e-12);
    EXPECT_LT(rel_err(r.points[1].critical_value, -2.0), 1e-12);
    EXPECT_TRUE(r.points[0].nondegenerate && r.points[1].nondegenerate);
}

TEST(CriticalSearch, CliffordMatchesSymmetryReduction)
{
    for (int n = 1; n <= 3; ++n) {
        const auto r = find_critical_points(builtin("clifford_cp", n));
        ASSERT_EQ(r.points.size(), static_cast<std::size_t>(n + 1)) << "n = " << n;
        // symmetry reduction: z_j = zeta with zeta^{n+1} = 1, value (n+1) zeta
        for (int j = 0; j <= n; ++j) {
            const Complex zeta = std::polar(1.0, 2.0 * std::numbers::pi * j / (n + 1));
            bool hit = false;
            for (const auto& p : r.points) {
                bool same = true;
                for (std::size_t i = 0; i < p.point.size(); ++i) same = same && std::abs(p.point[i] - zeta) < 1e-9;
                if (!same) continue;
                hit = true;
                EXPECT_LT(std::abs(p.critical_value - static_cast<double>(n + 1) * zeta), 1e-9);
                EXPECT_LT(p.residual, 1e-10);
                EXPECT_TRUE(p.nondegenerate);
            }
            EXPECT_TRUE(hit) << "n = " << n << ", root " << j;
        }
    }
}

TEST(CriticalSearch, CliffordSetIsSymmetric)
{
    const auto r = find_critical_points(builtin("clifford_cp", 3));
    for (const auto& p : r.points) {
        auto swapped = p.point.point();
        std::swap(swapped[0], swapped[2]);
        bool found = false;
        for (const auto& q : r.points)
            found = found || detail::wrapped_log_distance(q.point, LocalSystem(swapped)) < 1e-9;
        EXPECT_TRUE(found);
    }
}

TEST(CriticalSearch, ChekanovQ2)
{
    const auto r = find_critical_points(builtin("chekanov_q2"));
    ASSERT_EQ(r.points.size(), 4u);
    std::vector<double> values;
    for (const auto& p : r.points) {
        EXPECT_LT(std::abs(p.critical_value.imag()), 1e-9);
        values.push_back(p.critical_value.real());
        EXPECT_LT(std::abs(std::abs(p.point[0]) - 1.0), 1e-9);
        EXPECT_LT(std::abs(std::abs(p.point[1]) - 1.0), 1e-9);
    }
    std::sort(values.begin(), values.end());
    const std::vector<double> want{-4.0, 0.0, 0.0, 4.0};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(values[i], want[i], 1e-9);
}

TEST(CriticalSearch, CountsAgreeWithResultantOracle)
{
    for (const auto& w : {builtin("clifford_cp", 2), builtin("chekanov_q2"), builtin("gz_quadric", 2)}) {
        const auto oracle = resultant_critical_points(w);
        const auto r = find_critical_points(w);
        ASSERT_EQ(r.points.size(), oracle.size());
        for (const auto& [z1, z2] : oracle) {
            bool hit = false;
            for (const auto& p : r.points) hit = hit || (std::abs(p.point[0] - z1) < 1e-6 && std::abs(p.point[1] - z2) < 1e-6);
            EXPECT_TRUE(hit) << z1 << ", " << z2;
        }
    }
}

TEST(CriticalSearch, ResultsIndependentOfStartOrder)
{
    CriticalSearchConfig a;
    CriticalSearchConfig b;
    b.moduli = {2.0, 1.0, 0.5};
    for (const auto& w : {builtin("clifford_cp", 2), builtin("chekanov_q2"), builtin("gz_quadric", 2)}) {
        const auto ra = find_critical_points(w, a);
        const auto rb = find_critical_points(w, b);
        ASSERT_EQ(ra.points.size(), rb.points.size());
        for (std::size_t i = 0; i < ra.points.size(); ++i)
            EXPECT_LT(detail::wrapped_log_distance(ra.points[i].point, rb.points[i].point), 1e-9);
    }
}

TEST(CriticalSearch, ReportsSatisfyTolerance)
{
    CriticalSearchConfig cfg;
    for (const auto& w : {builtin("gz_quadric", 3), builtin("chekanov_cp3")}) {
        const auto r = find_critical_points(w, cfg);
        EXPECT_FALSE(r.points.empty());
        for (const auto& p : r.points) {
            EXPECT_LE(p.residual, cfg.newton_tol);
            EXPECT_EQ(p.nondegenerate, std::abs(p.log_hessian_det) > cfg.nondegeneracy_tol);
        }
        EXPECT_EQ(r.starts, r.converged + r.diverged + r.stalled + r.singular);
    }
}

TEST(CriticalSearch, ConstantHasNoNondegeneratePoint)
{
    const SuperpotentialPoly w(2, {{{0, 0}, 1.0}});
    const auto r = find_critical_points(w);
    for (const auto& p : r.points) EXPECT_FALSE(p.nondegenerate);
    EXPECT_THROW((void)find_critical_points(SuperpotentialPoly(0, {})), std::invalid_argument);
}
