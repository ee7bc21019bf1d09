#pragma once

// Exact rational linear algebra for small combinatorial matrices.

#include "gysinkit/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace gysinkit::detail {

using RationalMatrix = std::vector<std::vector<Rational>>; // row-major

inline std::size_t rank(RationalMatrix a)
{
    if (a.empty()) return 0;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == Rational(0)) ++piv;
        if (piv == rows) continue;
        std::swap(a[r], a[piv]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (a[i][c] == Rational(0)) continue;
            const Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

inline RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b)
{
    const std::size_t n = a.size(), inner = b.size(), m = b.empty() ? 0 : b[0].size();
    RationalMatrix out(n, std::vector<Rational>(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < inner; ++l) {
            if (a[i][l] == Rational(0)) continue;
            for (std::size_t j = 0; j < m; ++j) out[i][j] += a[i][l] * b[l][j];
        }
    return out;
}

/// Columns `cols` of a, all rows.
inline RationalMatrix select_columns(const RationalMatrix& a, const std::vector<std::size_t>& cols)
{
    RationalMatrix out(a.size(), std::vector<Rational>(cols.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out[i][j] = a[i][cols[j]];
    return out;
}

inline bool is_zero(const RationalMatrix& a)
{
    for (const auto& row : a)
        for (const auto& x : row)
            if (x != Rational(0)) return false;
    return true;
}

} // namespace gysinkit::detail
