#pragma once

// Seeded random inputs for the property tests.

#include "gysinkit/coeff_fields.hpp"
#include "gysinkit/superpotential.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gysinkit::testing {

using Rng = std::mt19937_64;

inline Complex random_complex(Rng& rng, double scale = 2.0)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    return {d(rng), d(rng)};
}

/// Up to `max_terms` terms with exponents in [lo, hi]/d; never zero when nonzero is set.
inline NovikovScalar random_scalar(Rng& rng, ExponentLattice lat, Rational truncation, int lo = -4, int hi = 8,
                                   int max_terms = 4, bool nonzero = false)
{
    const auto d = static_cast<int>(lat.denominator());
    std::uniform_int_distribution<int> expo(lo * d, hi * d);
    std::uniform_int_distribution<int> count(nonzero ? 1 : 0, max_terms);
    while (true) {
        std::vector<NovikovTerm> terms;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) {
            const Rational e(expo(rng), d);
            if (e < truncation) terms.push_back({e, random_complex(rng)});
        }
        NovikovScalar s(lat, truncation, std::move(terms));
        if (!nonzero || !s.is_zero()) return s;
    }
}

/// A point of (C*)^k with log-moduli in [-0.7, 0.7].
inline LocalSystem random_local_system(Rng& rng, std::size_t k)
{
    std::uniform_real_distribution<double> lm(-0.7, 0.7);
    std::uniform_real_distribution<double> arg(-3.14, 3.14);
    std::vector<Complex> z;
    for (std::size_t j = 0; j < k; ++j) z.push_back(std::polar(std::exp(lm(rng)), arg(rng)));
    return LocalSystem(std::move(z));
}

/// Random Laurent polynomial with exponents in [-2, 2].
inline SuperpotentialPoly random_poly(Rng& rng, std::size_t k, int monomials = 5)
{
    std::uniform_int_distribution<int> e(-2, 2);
    std::vector<Monomial> ms;
    for (int m = 0; m < monomials; ++m) {
        Exponents ex(k);
        for (auto& x : ex) x = e(rng);
        ms.push_back({ex, random_complex(rng)});
    }
    return SuperpotentialPoly(k, std::move(ms));
}

} // namespace gysinkit::testing
