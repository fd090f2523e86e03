#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chabauty {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Integer num(const Rational &q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational &q) { return boost::multiprecision::denominator(q); }

inline Rational make_rational(const Integer &n, const Integer &d) { return Rational(n, d); }

inline Rational abs(const Rational &q) { return q < 0 ? Rational(-q) : q; }

inline Integer floor_div(const Integer &a, const Integer &b) {
    Integer q = a / b;
    Integer r = a - q * b;
    if (r != 0 && ((r < 0) != (b < 0)))
        q -= 1;
    return q;
}

inline Integer floor(const Rational &q) { return floor_div(num(q), den(q)); }

inline Integer ceil(const Rational &q) { return -floor(Rational(-q)); }

/// Representative in [0,1).
inline Rational frac(const Rational &q) { return q - Rational(floor(q)); }

/// Distance to the nearest integer, in [0,1/2].
inline Rational circle_dist(const Rational &q) {
    Rational f = frac(q);
    Rational g = Rational(1) - f;
    return f < g ? f : g;
}

inline Integer mod(const Integer &a, const Integer &m) {
    Integer r = a % m;
    if (r < 0)
        r += m;
    return r;
}

inline Integer gcd(Integer a, Integer b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Integer t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline Integer lcm(const Integer &a, const Integer &b) {
    if (a == 0 || b == 0)
        return 0;
    Integer l = a / gcd(a, b) * b;
    return l < 0 ? Integer(-l) : l;
}

inline std::string to_string(const Rational &q) {
    if (den(q) == 1)
        return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

/// Accepts "3", "-2/5" and plain decimals such as "0.25".
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty rational");
    auto slash = s.find('/');
    auto dot = s.find('.');
    try {
        if (slash != std::string::npos) {
            Integer n(s.substr(0, slash));
            Integer d(s.substr(slash + 1));
            if (d == 0)
                throw std::invalid_argument("zero denominator");
            return Rational(n, d);
        }
        if (dot != std::string::npos) {
            bool neg = !s.empty() && s[0] == '-';
            std::string whole = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
            std::string fracPart = s.substr(dot + 1);
            if (whole.empty())
                whole = "0";
            Integer scale = 1;
            for (std::size_t i = 0; i < fracPart.size(); ++i)
                scale *= 10;
            Integer n = Integer(whole) * scale + (fracPart.empty() ? Integer(0) : Integer(fracPart));
            Rational r(n, scale);
            return neg ? Rational(-r) : r;
        }
        return Rational(Integer(s));
    } catch (const std::runtime_error &) {
        throw std::invalid_argument("not a rational: " + s);
    }
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

/// Prime factorisation, primes ascending.
inline std::map<std::uint64_t, unsigned> factorize(std::uint64_t n) {
    std::map<std::uint64_t, unsigned> out;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        while (n % d == 0) {
            ++out[d];
            n /= d;
        }
    if (n > 1)
        ++out[n];
    return out;
}

inline std::uint64_t ipow(std::uint64_t base, unsigned e) {
    std::uint64_t r = 1;
    while (e--)
        r *= base;
    return r;
}

/// Smallest prime dividing n (n >= 2).
inline std::uint64_t smallest_prime_factor(std::uint64_t n) {
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return d;
    return n;
}

/// The first `count` primes.
inline std::vector<std::uint64_t> first_primes(std::size_t count) {
    std::vector<std::uint64_t> ps;
    for (std::uint64_t n = 2; ps.size() < count; ++n)
        if (is_prime(n))
            ps.push_back(n);
    return ps;
}

} // namespace chabauty
