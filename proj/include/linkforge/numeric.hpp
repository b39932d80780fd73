#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <climits>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace linkforge {

// Exact arithmetic used throughout the library. Linking numbers, bound
// formulas and pipeline parameters can exceed any fixed width, so every
// quantity that participates in a proof-side computation is a cpp_int.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline int sign_of(const Int& x) { return x.sign(); }
inline int sign_of(const Rat& x) { return x.sign(); }

// Least non-negative residue; q must be positive.
inline Int floor_mod(const Int& a, const Int& q) {
    if (q <= 0) throw std::invalid_argument("floor_mod: modulus must be positive");
    Int r = a % q;
    if (r < 0) r += q;
    return r;
}

inline Int ceil_div(const Int& a, const Int& b) {
    if (b <= 0) throw std::invalid_argument("ceil_div: divisor must be positive");
    Int q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return q;
}

inline Int ipow(const Int& base, std::uint64_t e) {
    Int r = 1, b = base;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// Conversion helpers; throw instead of truncating.
inline std::size_t to_size(const Int& x, const char* what = "value") {
    if (x < 0 || x > Int(SIZE_MAX))
        throw std::overflow_error(std::string(what) + " does not fit in size_t");
    return static_cast<std::size_t>(x);
}

inline long long to_ll(const Int& x, const char* what = "value") {
    if (x < Int(LLONG_MIN) || x > Int(LLONG_MAX))
        throw std::overflow_error(std::string(what) + " does not fit in long long");
    return static_cast<long long>(x);
}

// "a/b" with b > 0 after normalization, or plain "a" when b == 1.
inline std::string format_rational(const Rat& x) {
    const Int num = boost::multiprecision::numerator(x);
    const Int den = boost::multiprecision::denominator(x);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline Rat parse_rational(std::string_view s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rat(Int(std::string(s)));
        Int num{std::string(s.substr(0, slash))};
        Int den{std::string(s.substr(slash + 1))};
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_rational: malformed rational '" + std::string(s) + "'");
    }
}

// -------- deterministic hashing --------

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (0x9e3779b97f4a7c15ull + b + (a << 6) + (a >> 2)));
}

// Bounded sampling with an explicit rejection loop so results do not depend
// on the standard library's unspecified distribution algorithms.
template <class Rng>
std::uint64_t uniform_u64(Rng& rng, std::uint64_t bound) {  // in [0, bound)
    if (bound == 0) throw std::invalid_argument("uniform_u64: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        std::uint64_t r = rng();
        if (r < limit) return r % bound;
    }
}

template <class Rng>
long long uniform_int(Rng& rng, long long lo, long long hi) {  // inclusive
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    return lo + static_cast<long long>(
                    uniform_u64(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

}  // namespace linkforge
