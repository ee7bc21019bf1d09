#pragma once

#include <boost/integer/common_factor.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gysinkit {

/// Exact rational number used for Novikov exponents and rational constants.
using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

/// Formats as "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& q)
{
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

/// Parses "p/q" or an integer "p". Throws std::invalid_argument on malformed text.
inline Rational parse_rational(std::string_view text)
{
    auto parse_int = [&](std::string_view s) -> std::int64_t {
        if (s.empty()) throw std::invalid_argument("empty integer in rational '" + std::string(text) + "'");
        std::size_t used = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(std::string(s), &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        }
        if (used != s.size()) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in rational '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash)), den);
}

inline std::int64_t lcm64(std::int64_t a, std::int64_t b)
{
    return boost::integer::lcm(a, b);
}

} // namespace gysinkit
