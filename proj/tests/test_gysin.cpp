#include "gysinkit/gysin.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

using namespace gysinkit;
using gysinkit::testing::Rng;

namespace {

LocalSystem ones(std::size_t k) { return LocalSystem(std::vector<Complex>(k, Complex(1.0, 0.0))); }

// Reference rank of a small complex matrix over C, by Gaussian elimination.
std::size_t complex_rank(std::vector<std::vector<Complex>> a, double tol = 1e-12)
{
    std::size_t r = 0;
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t best = r;
        for (std::size_t i = r; i < rows; ++i)
            if (std::abs(a[i][c]) > std::abs(a[best][c])) best = i;
        if (std::abs(a[best][c]) <= tol) continue;
        std::swap(a[r], a[best]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const Complex f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

// Degree-m homology rank of the torus complex, from its leading coefficients.
std::size_t reference_homology_rank(const TorusPearlComplex& c, int m)
{
    const auto d = c.differential();
    auto block = [&](int from, int to) {
        std::vector<std::size_t> src, dst;
        for (std::uint32_t s = 0; s < c.rank(); ++s) {
            if (TorusPearlComplex::degree(s) == from) src.push_back(s);
            if (TorusPearlComplex::degree(s) == to) dst.push_back(s);
        }
        std::vector<std::vector<Complex>> out(dst.size(), std::vector<Complex>(src.size()));
        for (std::size_t i = 0; i < dst.size(); ++i)
            for (std::size_t j = 0; j < src.size(); ++j)
                out[i][j] = d.at(dst[i], src[j]).is_zero() ? Complex(0.0, 0.0) : d.at(dst[i], src[j]).leading_coefficient();
        return std::pair{out, src.size()};
    };
    // the differential lowers the subset size: x_S -> x_{S minus j}
    const auto [down, dim] = block(m, m - 1);
    const auto [in, unused] = block(m + 1, m);
    (void)unused;
    const std::size_t rank_out = dim == 0 || down.empty() ? 0 : complex_rank(down);
    const std::size_t rank_in = in.empty() || in[0].empty() ? 0 : complex_rank(in);
    return dim - rank_out - rank_in;
}

} // namespace

TEST(TorusComplex, CriticalPointHasZeroDifferential)
{
    const auto c = build_torus_complex(builtin("clifford_cp", 1), ones(1), Rational(1, 2));
    EXPECT_TRUE(c.critical);
    EXPECT_TRUE(c.differential().is_exactly_zero());
    EXPECT_EQ(homology_rank(c, 0) + homology_rank(c, 1), 2u);
    EXPECT_EQ(c.lattice.denominator(), 2);
}

TEST(TorusComplex, NonCriticalSystemHasNonzeroDifferential)
{
    const SuperpotentialPoly w(1, {{{1}, 1.0}});
    const auto c = build_torus_complex(w, ones(1), Rational(1));
    EXPECT_FALSE(c.critical);
    EXPECT_FALSE(c.differential().is_exactly_zero());
    EXPECT_EQ(homology_rank(c, 0), 0u);
    EXPECT_EQ(homology_rank(c, 1), 0u);
}

TEST(TorusComplex, ChekanovBaseIsCritical)
{
    const auto c = build_torus_complex(builtin("chekanov_q2"), ones(2), Rational(1, 2));
    EXPECT_TRUE(c.critical);
    EXPECT_TRUE(c.differential().is_exactly_zero());
}

TEST(TorusComplex, HomologyAboveDegreeOneIsNotModeledOffCritical)
{
    const auto c = build_torus_complex(builtin("clifford_cp", 2), LocalSystem({2.0, 1.0}), Rational(1, 3));
    ASSERT_FALSE(c.critical);
    EXPECT_THROW((void)homology_rank(c, 2), NonCriticalLocalSystem);
}

TEST(TorusComplexProperty, HomologyRankMatchesElimination)
{
    Rng rng(41);
    for (int i = 0; i < 40; ++i) {
        const std::size_t k = 1 + rng() % 4;
        const auto w = gysinkit::testing::random_poly(rng, k, 3);
        const auto rho = gysinkit::testing::random_local_system(rng, k);
        const auto c = build_torus_complex(w, rho, Rational(1, 2));
        EXPECT_TRUE((c.differential() * c.differential()).is_exactly_zero());
        for (int m = 0; m <= 1; ++m) EXPECT_EQ(homology_rank(c, m), reference_homology_rank(c, m)) << "sample " << i;
    }
    for (std::size_t k = 1; k <= 4; ++k) {
        const auto c = build_torus_complex(builtin("clifford_cp", static_cast<int>(k)), ones(k), Rational(1));
        for (int m = 0; m <= static_cast<int>(k); ++m) EXPECT_EQ(homology_rank(c, m), reference_homology_rank(c, m));
    }
}

TEST(ChainMaps, UnitGoesToUnit)
{
    const auto pairs = builtin_pairs();
    const auto& pair = pairs.back(); // cp3_q2
    const auto c = build_torus_complex(pair.base, ones(2), pair.kappa);
    const auto lifted = build_lifted_complex(c, pair.lifted, LocalSystem({1.0, 1.0, 2.0}));
    const auto i = chain_i(c, lifted);
    EXPECT_EQ(i.at(0, 0), NovikovScalar::one(c.lattice, c.truncation));
    for (std::size_t r = 1; r < i.rows; ++r) EXPECT_TRUE(i.at(r, 0).is_zero());
}

TEST(ChainMaps, ExactAtCriticalBuiltinPairs)
{
    for (const auto& pair : builtin_pairs()) {
        const std::size_t k = pair.base.num_vars();
        std::vector<std::pair<LocalSystem, LocalSystem>> points;
        if (pair.name == "cpn") {
            // base at the identity, lift at (omega, ..., omega) with omega^{n+1} = 1
            for (int j = 0; j <= pair.n; ++j)
                points.emplace_back(ones(k), LocalSystem(std::vector<Complex>(
                                                 k + 1, std::polar(1.0, 2.0 * std::numbers::pi * j / (pair.n + 1)))));
        } else if (pair.name == "cp3_q2") {
            points.emplace_back(ones(2), LocalSystem({1.0, 1.0, 2.0}));
            points.emplace_back(ones(2), LocalSystem({1.0, 1.0, -2.0}));
        } else {
            // no lifted critical point of the quadric lies over a base critical point
            const auto base = find_critical_points(pair.base);
            const auto lifted = find_critical_points(pair.lifted);
            ASSERT_FALSE(base.points.empty());
            for (const auto& pt : lifted.points) {
                std::vector<Complex> proj(pt.point.point().begin(), pt.point.point().begin() + static_cast<long>(k));
                const auto c = build_torus_complex(pair.base, LocalSystem(proj), pair.kappa);
                EXPECT_FALSE(c.critical) << pair.name;
                EXPECT_THROW((void)verify_gysin_exactness(c, build_lifted_complex(c, pair.lifted, pt.point)),
                             NonCriticalLocalSystem);
            }
            continue;
        }
        for (const auto& [b, l] : points) {
            const auto c = build_torus_complex(pair.base, b, pair.kappa);
            const auto lifted = build_lifted_complex(c, pair.lifted, l);
            ASSERT_TRUE(c.critical && lifted.critical) << pair.name;
            const auto r = chain_map_residuals(c, lifted);
            EXPECT_TRUE(r.i_exact_zero) << pair.name;
            EXPECT_TRUE(r.p_exact_zero) << pair.name;
            EXPECT_TRUE(verify_gysin_exactness(c, lifted).passed) << pair.name;
        }
    }
}

TEST(ChainMaps, NonCriticalLiftIsRejected)
{
    const auto pair = builtin_pairs().back();
    const auto c = build_torus_complex(pair.base, ones(2), pair.kappa);
    // critical along the base directions, not along the fiber
    const auto fiber_off = build_lifted_complex(c, pair.lifted, LocalSystem({1.0, 1.0, 1.0}));
    EXPECT_FALSE(fiber_off.critical);
    EXPECT_THROW((void)verify_gysin_exactness(c, fiber_off), NonCriticalLocalSystem);
    EXPECT_TRUE(chain_map_residuals(c, fiber_off).p_exact_zero);
    // z1 dW/dz1 at (2, 1, 2) is (2 + 2 - 1/2 - 1/2) / 2 = 3/2, so i stops being a chain map
    const auto base_off = build_lifted_complex(c, pair.lifted, LocalSystem({2.0, 1.0, 2.0}));
    EXPECT_NEAR(chain_map_residuals(c, base_off).i_residual, 1.5, 1e-12);
}

TEST(ChainMaps, MismatchedBaseIsRejected)
{
    const auto c = build_torus_complex(builtin("clifford_cp", 1), ones(1), Rational(1, 2));
    const auto other = build_torus_complex(builtin("clifford_cp", 1), ones(1), Rational(1, 3));
    const auto lifted = build_lifted_complex(other, builtin("clifford_cp", 2), ones(2));
    EXPECT_THROW((void)chain_i(c, lifted), std::invalid_argument);
    EXPECT_THROW((void)build_lifted_complex(c, builtin("clifford_cp", 3), ones(3)), DimensionMismatch);
}

TEST(ConnectingClass, VanishesExactlyAtCriticalFiberWithZeroEuler)
{
    const auto w = builtin("chekanov_cp3");
    const LocalSystem rho({1.0, 1.0, 2.0});
    const auto zero = connecting_class(w, rho, 0, Rational(1, 2));
    EXPECT_TRUE(zero.vanishes());
    const auto euler = connecting_class(w, rho, 3, Rational(1, 2));
    EXPECT_FALSE(euler.vanishes());
    EXPECT_EQ(euler.euler_part, 3);
    EXPECT_TRUE(euler.quantum_part.is_zero());
}

TEST(ConnectingClass, QuantumPartIsFiberDerivative)
{
    // z3 dW/dz3 at (1, 1, 1) is -4 + 1 = -3
    const auto cc = connecting_class(builtin("chekanov_cp3"), ones(3), 0, Rational(1, 2));
    ASSERT_FALSE(cc.vanishes());
    ASSERT_EQ(cc.quantum_part.terms().size(), 1u);
    EXPECT_EQ(cc.quantum_part.terms()[0].exponent, Rational(1, 2));
    EXPECT_LT(std::abs(cc.quantum_part.terms()[0].coefficient - Complex(-3.0, 0.0)), 1e-12);
    EXPECT_EQ(cc.quantum_part.lattice().denominator(), 2);
}

TEST(Exactness, RankIdentityAndSubspacesForAllSmallRanks)
{
    for (std::size_t k = 0; k <= 8; ++k) {
        const auto rep = verify_gysin_exactness(k, k <= 4);
        EXPECT_TRUE(rep.passed) << "k = " << k;
        EXPECT_EQ(rep.rank_identity.size(), k + 2);
        if (k <= 4) {
            EXPECT_EQ(rep.subspace_equality.size(), k + 2);
            EXPECT_TRUE(rep.p_after_i_zero && rep.i_injective && rep.p_surjective);
        }
        for (bool ok : rep.per_degree()) EXPECT_TRUE(ok);
    }
}

TEST(Exactness, SampledCriticalLiftsOfCliffordTori)
{
    // the Clifford critical points are z_j = omega for omega^{n+1} = 1
    for (int n = 2; n <= 4; ++n) {
        const auto k = static_cast<std::size_t>(n - 1);
        for (int j = 0; j <= n; ++j) {
            const Complex omega = std::polar(1.0, 2.0 * std::numbers::pi * j / (n + 1));
            const auto lifted_pt = LocalSystem(std::vector<Complex>(static_cast<std::size_t>(n), omega));
            const auto c = build_torus_complex(builtin("clifford_cp", n - 1), ones(k),
                                               Rational(1, 2 * n));
            const auto lifted = build_lifted_complex(c, builtin("clifford_cp", n), lifted_pt);
            EXPECT_TRUE(lifted.critical);
            EXPECT_TRUE(chain_map_residuals(c, lifted).i_exact_zero);
        }
    }
}

TEST(SampleLocalSystems, DeterministicAndInRange)
{
    const auto a = sample_local_systems(3, 10, 7);
    const auto b = sample_local_systems(3, 10, 7);
    ASSERT_EQ(a.size(), 10u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].point(), b[i].point());
        for (const auto& z : a[i].point()) {
            EXPECT_LE(std::abs(std::log(std::abs(z))), 1.0);
        }
    }
}
