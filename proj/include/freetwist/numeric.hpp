#pragma once
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>

namespace freetwist {

// Arbitrary-precision integers: twist powers compose multiplicatively, so
// matrix entries outgrow 64 bits quickly on longer words.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(Rat const& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(Rat const& r) { return boost::multiprecision::denominator(r); }

// floor of a rational (denominator is kept positive by cpp_rational).
inline Int rat_floor(Rat const& r) {
    Int n = rat_num(r), d = rat_den(r);
    Int q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q;
}

inline Int abs_int(Int const& v) { return v < 0 ? Int(-v) : v; }

inline double to_double(Int const& v) { return v.convert_to<double>(); }
inline double to_double(Rat const& v) { return v.convert_to<double>(); }

// Extended gcd on Int: returns g = gcd(a,b) and x, y with a*x + b*y = g.
struct Egcd {
    Int g, x, y;
};
inline Egcd egcd(Int a, Int b) {
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = a / b, r = a % b;
        if (r < 0) { r += abs_int(b); q = (a - r) / b; }
        a = b; b = r;
        Int nx = x0 - q * x1, ny = y0 - q * y1;
        x0 = x1; y0 = y1; x1 = nx; y1 = ny;
    }
    if (a < 0) { a = -a; x0 = -x0; y0 = -y0; }
    return {a, x0, y0};
}

inline std::size_t hash_int(Int const& v) {
    auto const& b = v.backend();
    std::size_t h = v.sign() < 0 ? 0x9e3779b97f4a7c15ull : 0x7f4a7c159e3779b9ull;
    for (unsigned i = 0; i < b.size(); ++i)
        h = (h * 1099511628211ull) ^ static_cast<std::size_t>(b.limbs()[i]);
    return h;
}

inline std::size_t hash_mix(std::size_t a, std::size_t b) {
    return a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
}

} // namespace freetwist
