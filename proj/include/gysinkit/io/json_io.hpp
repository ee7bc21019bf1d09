#pragma once

// JSON encodings of the core types.

#include "gysinkit/filtered.hpp"
#include "gysinkit/gysin.hpp"
#include "gysinkit/quantum_algebra.hpp"
#include "gysinkit/superpotential.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gysinkit::io {

using nlohmann::json;

class FormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j)
{
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw FormatError("complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Rational rational_from_json(const json& j)
{
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (!j.is_string()) throw FormatError("rational must be a string \"p/q\" or an integer");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

inline json to_json(const NovikovScalar& s)
{
    json terms = json::array();
    for (const auto& t : s.terms()) terms.push_back(json::array({to_string(t.exponent), to_json(t.coefficient)}));
    return {{"lattice_denominator", s.lattice().denominator()},
            {"truncation", to_string(s.truncation())},
            {"terms", terms}};
}

inline std::vector<NovikovTerm> terms_from_json(const json& j)
{
    if (!j.is_array()) throw FormatError("scalar terms must be an array");
    std::vector<NovikovTerm> terms;
    for (const auto& t : j) {
        if (!t.is_array() || t.size() != 2) throw FormatError("scalar term must be [exponent, [re, im]]");
        terms.push_back({rational_from_json(t[0]), complex_from_json(t[1])});
    }
    return terms;
}

/// Full scalar object, or a bare term list using the given defaults.
inline NovikovScalar scalar_from_json(const json& j, ExponentLattice default_lattice = {},
                                      Rational default_truncation = Rational(kDefaultTruncation))
{
    try {
        if (j.is_array()) return NovikovScalar(default_lattice, default_truncation, terms_from_json(j));
        if (j.is_number()) return NovikovScalar::constant(j.get<double>(), default_lattice, default_truncation);
        if (!j.is_object()) throw FormatError("scalar must be an object or a term list");
        const ExponentLattice lat(j.value("lattice_denominator", default_lattice.denominator()));
        const Rational trunc = j.contains("truncation") ? rational_from_json(j["truncation"]) : default_truncation;
        return NovikovScalar(lat, trunc, terms_from_json(j.at("terms")));
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad scalar: ") + e.what());
    } catch (const LatticeMismatch& e) {
        throw FormatError(e.what());
    }
}

inline json to_json(const SuperpotentialPoly& w)
{
    json mons = json::array();
    for (const auto& m : w.monomials()) mons.push_back(json::array({m.exponents, to_json(m.coefficient)}));
    return {{"vars", w.num_vars()}, {"monomials", mons}};
}

inline SuperpotentialPoly poly_from_json(const json& j)
{
    try {
        const auto k = j.at("vars").get<std::size_t>();
        if (k == 0) throw FormatError("superpotential needs at least one variable");
        std::vector<Monomial> mons;
        for (const auto& m : j.at("monomials")) {
            if (!m.is_array() || m.size() != 2) throw FormatError("monomial must be [[e1, ...], [re, im]]");
            mons.push_back({m[0].get<Exponents>(), complex_from_json(m[1])});
        }
        return SuperpotentialPoly(k, std::move(mons));
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad superpotential: ") + e.what());
    } catch (const DimensionMismatch& e) {
        throw FormatError(e.what());
    }
}

inline json to_json(const LocalSystem& rho)
{
    json out = json::array();
    for (const auto& z : rho.point()) out.push_back(to_json(z));
    return out;
}

inline json to_json(const CriticalPointReport& r)
{
    return {{"point", to_json(r.point)},
            {"residual", r.residual},
            {"critical_value", to_json(r.critical_value)},
            {"log_hessian_det", to_json(r.log_hessian_det)},
            {"nondegenerate", r.nondegenerate}};
}

inline json to_json(const AlgebraElement& a)
{
    json out = json::array();
    for (const auto& s : a.coefficients) out.push_back(to_json(s));
    return out;
}

inline AlgebraPresentation presentation_from_json(const json& j)
{
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "cyclic") {
            CyclicPresentation p;
            p.m = j.at("m").get<int>();
            if (p.m < 1) throw FormatError("cyclic presentation needs m >= 1");
            p.c = complex_from_json(j.at("c"));
            p.lambda = rational_from_json(j.at("lambda"));
            return p;
        }
        if (type == "table") {
            const auto dim = j.at("dim").get<std::size_t>();
            if (dim == 0) throw FormatError("table dimension must be positive");
            const ExponentLattice lat(j.value("lattice_denominator", std::int64_t{1}));
            const Rational trunc =
                j.contains("truncation") ? rational_from_json(j["truncation"]) : Rational(kDefaultTruncation);
            TablePresentation::Products prod(
                dim, std::vector<std::vector<NovikovScalar>>(dim, std::vector<NovikovScalar>()));
            for (const auto& entry : j.at("products")) {
                if (!entry.is_array() || entry.size() != 3) throw FormatError("product entry must be [i, j, [scalars]]");
                const auto a = entry[0].get<std::size_t>(), b = entry[1].get<std::size_t>();
                if (a >= dim || b >= dim) throw FormatError("product index out of range");
                if (!entry[2].is_array() || entry[2].size() != dim)
                    throw FormatError("product coordinates must have length dim");
                std::vector<NovikovScalar> coords;
                for (const auto& s : entry[2]) coords.push_back(scalar_from_json(s, lat, trunc));
                prod[a][b] = std::move(coords);
            }
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t b = 0; b < dim; ++b)
                    if (prod[a][b].empty()) {
                        if (prod[b][a].empty())
                            throw FormatError("missing product b" + std::to_string(a) + " * b" + std::to_string(b));
                        prod[a][b] = prod[b][a];
                    }
            return TablePresentation(lat, std::move(prod));
        }
        throw FormatError("unknown presentation type '" + type + "'");
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad presentation: ") + e.what());
    }
}

inline json to_json(const FilteredComplex& c)
{
    json gens = json::array();
    for (const auto& g : c.generators()) gens.push_back({{"id", g.id}, {"deg", g.degree}, {"action", g.action}});
    json diff = json::array();
    for (const auto& e : c.entries())
        diff.push_back(json::array({c.generators()[e.from].id, c.generators()[e.to].id, to_json(e.value)}));
    return {{"generators", gens}, {"differential", diff}};
}

inline FilteredComplex filtered_from_json(const json& j, ExponentLattice lattice = {},
                                         Rational truncation = Rational(kDefaultTruncation))
{
    try {
        std::vector<Generator> gens;
        for (const auto& g : j.at("generators"))
            gens.push_back({g.at("id").get<std::string>(), g.at("deg").get<int>(), g.at("action").get<double>()});
        auto index = [&](const json& id) {
            const auto s = id.get<std::string>();
            for (std::size_t i = 0; i < gens.size(); ++i)
                if (gens[i].id == s) return i;
            throw FormatError("unknown generator '" + s + "'");
        };
        std::vector<DifferentialEntry> d;
        if (j.contains("differential"))
            for (const auto& e : j["differential"]) {
                if (!e.is_array() || e.size() != 3) throw FormatError("differential entry must be [from, to, scalar]");
                const NovikovScalar s = scalar_from_json(e[2], lattice, truncation);
                if (!(s.lattice() == lattice)) throw FormatError("differential scalar off the complex lattice");
                d.push_back({index(e[0]), index(e[1]), s});
            }
        return FilteredComplex(std::move(gens), lattice, truncation, d);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad filtered complex: ") + e.what());
    }
}

inline json to_json(const ConnectingClass& c)
{
    return {{"euler", c.euler_part}, {"quantum", to_json(c.quantum_part)}};
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("malformed JSON in '" + path + "': " + e.what());
    }
}

/// FNV-1a 64 of the compact dump (object keys are sorted by nlohmann::json).
inline std::string config_hash(const json& config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

} // namespace gysinkit::io
