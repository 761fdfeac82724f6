#pragma once

// Closed-form lower and upper bounds on palette sizes, evaluated in exact rational arithmetic.

#include <grc/core.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace grc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_binomial(std::uint64_t n, std::uint64_t r)
{
    if (r > n)
        return 0;
    BigInt acc = 1;
    for (std::uint64_t i = 0; i < r; ++i)
        acc = acc * (n - i) / (i + 1);
    return acc;
}

inline BigInt ceil_of(const Rational & x)
{
    BigInt num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    BigInt q = num / den;
    if (q * den < num)
        ++q;
    return q;
}

inline BigInt floor_of(const Rational & x)
{
    BigInt num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    BigInt q = num / den;
    if (q * den > num)
        --q;
    return q;
}

/// Decimal rendering rounded half-up to `digits` places, trailing zeros trimmed to one.
inline std::string decimal(const Rational & x, int digits = 6)
{
    BigInt num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    bool neg = num < 0;
    if (neg)
        num = -num;
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i)
        scale *= 10;
    BigInt scaled = (num * scale * 2 + den) / (den * 2);
    BigInt whole = scaled / scale, frac = scaled % scale;
    std::string f = frac.str();
    f.insert(0, std::size_t(digits) - f.size(), '0');
    while (f.size() > 1 && f.back() == '0')
        f.pop_back();
    return (neg ? "-" : "") + whole.str() + "." + f;
}

inline BigInt isqrt(const BigInt & x)
{
    return boost::multiprecision::sqrt(x);
}

/// Largest path-free edge count: ex(n, P_k) = q C(k-1, 2) + C(r, 2) with n = q(k-1) + r.
inline BigInt ex_path(std::uint64_t n, std::uint64_t k)
{
    if (k < 2)
        throw ConfigError("ex(n, P_k) needs k >= 2");
    const std::uint64_t q = n / (k - 1), r = n % (k - 1);
    return BigInt(q) * big_binomial(k - 1, 2) + big_binomial(r, 2);
}

/// Colors needed when no color class may contain a P_k: ceil(C(n,2) / ex(n, P_k)).
inline BigInt cycle_lower(std::uint64_t n, std::uint64_t k)
{
    if (k < 4 || n < k)
        throw ConfigError("cycle bound needs n >= k >= 4");
    return ceil_of(Rational(big_binomial(n, 2), ex_path(n, k)));
}

/// a(k) = floor((2k - 1 + sqrt(8k - 7)) / 2).
inline std::uint64_t a_of_k(std::uint64_t k)
{
    if (k < 3)
        throw ConfigError("a(k) needs k >= 3");
    BigInt s = isqrt(BigInt(8 * k - 7));
    return static_cast<std::uint64_t>((BigInt(2 * k - 1) + s) / 2);
}

/// p(k) = (a - 1) / (2(k - 1)) + (k - 2) / (2a).
inline Rational p_of_k(std::uint64_t k)
{
    const std::uint64_t a = a_of_k(k);
    return Rational(a - 1, 2 * (k - 1)) + Rational(k - 2, 2 * a);
}

struct RationalPair {
    Rational lower, upper;
};

/// Leading terms n/(2(k-1)) and (1/(2(k-1)) + 1/(2a)) n.
inline RationalPair bipartite_bounds(std::uint64_t n, std::uint64_t k)
{
    const std::uint64_t a = a_of_k(k);
    Rational lo(n, 2 * (k - 1));
    return {lo, lo + Rational(n, 2 * a)};
}

/// (k - 1/(k+1)) C(n,k) / C(n,k-1): exact lower bound for K_{k+2}^k-colorings with C(k+2,k)-1 colors per copy.
inline Rational hyper_clique_lower(std::uint64_t n, std::uint64_t k)
{
    if (k < 2 || n < k + 2)
        throw ConfigError("clique bound needs k >= 2 and n >= k + 2");
    return (Rational(k) - Rational(1, k + 1)) * Rational(big_binomial(n, k), big_binomial(n, k - 1));
}

inline Rational hyper_clique_upper_coeff(std::uint64_t k)
{
    return Rational(k * k + k - 1, k * k + k);
}

/// ceil(7/15 C(n,2)); binds proper (P_8, 5)-colorings.
inline BigInt p8_lower(std::uint64_t n)
{
    return ceil_of(Rational(7, 15) * Rational(big_binomial(n, 2)));
}

/// Leading terms 2n/(k l + l - 1) and n/(l - k) for tight cycles C_l^k.
inline RationalPair tight_cycle_bounds(std::uint64_t n, std::uint64_t k, std::uint64_t ell)
{
    if (ell <= k)
        throw ConfigError("tight cycle needs l > k");
    return {Rational(2 * n, k * ell + ell - 1), Rational(n, ell - k)};
}

/// ((k l + l - 1) / 2k) C(n, k-1): cap on edges of a tight-path-free k-graph.
inline Rational tight_path_ex_cap(std::uint64_t n, std::uint64_t k, std::uint64_t ell)
{
    return Rational(k * ell + ell - 1, 2 * k) * Rational(big_binomial(n, k - 1));
}

// ---------------------------------------------------------------------------

enum class Direction { Lower, Upper, Value };
enum class Exactness { Exact, Asymptotic };

inline const char * direction_name(Direction d)
{
    return d == Direction::Lower ? "lower" : d == Direction::Upper ? "upper" : "value";
}

inline const char * exactness_name(Exactness e) { return e == Exactness::Exact ? "exact" : "asymptotic"; }

struct BoundEntry {
    std::string name;
    Rational value;
    Direction direction;
    Exactness exactness;
};

struct BoundsReport {
    HostMode mode;
    std::uint64_t n = 0, k = 0;
    std::optional<std::uint64_t> ell, q;
    std::vector<BoundEntry> entries;

    const BoundEntry * find(const std::string & name) const
    {
        for (const auto & e : entries)
            if (e.name == name)
                return &e;
        return nullptr;
    }
};

/// Every bound that applies to the host: cycles and paths for K_n, C_2k for K_{n,n},
/// cliques and tight cycles for K_n^k.
inline BoundsReport bounds_report(HostMode mode, std::uint64_t n, std::uint64_t k, std::optional<std::uint64_t> ell = {},
    std::optional<std::uint64_t> q = {})
{
    BoundsReport r{mode, n, k, ell, q, {}};
    auto add = [&](std::string name, Rational v, Direction d, Exactness e) {
        r.entries.push_back({std::move(name), std::move(v), d, e});
    };
    using D = Direction;
    using E = Exactness;
    switch (mode) {
    case HostMode::Complete:
        if (k >= 2)
            add("ex_path", Rational(ex_path(n, k)), D::Value, E::Exact);
        if (k >= 4 && n >= k) {
            add("cycle_lower", Rational(cycle_lower(n, k)), D::Lower, E::Exact);
            add("cycle_upper", Rational(n, k - 2), D::Upper, E::Asymptotic);
        }
        add("p4_q3", Rational(big_binomial(n, 2)), D::Value, E::Exact);
        add("p5_q4", Rational(big_binomial(n, 2)), D::Value, E::Exact);
        add("p6_q4", Rational(n * n, 4), D::Value, E::Asymptotic);
        add("p7_q5", Rational(n * n, 2), D::Value, E::Asymptotic);
        add("p7_q5_upper", Rational(big_binomial(n, 2)), D::Upper, E::Exact);
        add("p8_q5_proper_lower", Rational(p8_lower(n)), D::Lower, E::Exact);
        add("p8_q5_proper", Rational(7 * n * n, 30), D::Value, E::Asymptotic);
        break;
    case HostMode::Bipartite: {
        if (k < 3)
            throw ConfigError("bipartite bounds need k >= 3");
        add("a", Rational(a_of_k(k)), D::Value, E::Exact);
        add("p", p_of_k(k), D::Value, E::Exact);
        auto b = bipartite_bounds(n, k);
        add("bipartite_lower", b.lower, D::Lower, E::Asymptotic);
        add("bipartite_upper", b.upper, D::Upper, E::Asymptotic);
        break;
    }
    case HostMode::UniformComplete:
        if (n >= k + 2) {
            add("hyper_clique_lower", hyper_clique_lower(n, k), D::Lower, E::Exact);
            add("hyper_clique_lower_ceil", Rational(ceil_of(hyper_clique_lower(n, k))), D::Lower, E::Exact);
        }
        add("hyper_clique_upper_coeff", hyper_clique_upper_coeff(k), D::Value, E::Exact);
        add("hyper_clique_upper", hyper_clique_upper_coeff(k) * n, D::Upper, E::Asymptotic);
        if (ell && *ell > k) {
            auto t = tight_cycle_bounds(n, k, *ell);
            add("tight_cycle_lower", t.lower, D::Lower, E::Asymptotic);
            add("tight_cycle_upper", t.upper, D::Upper, E::Asymptotic);
            add("tight_path_ex_cap", tight_path_ex_cap(n, k, *ell), D::Upper, E::Asymptotic);
        }
        break;
    }
    return r;
}

} // namespace grc
