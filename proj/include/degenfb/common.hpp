#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace degenfb {

/// Thrown when an operation's preconditions are violated (bad arguments,
/// invalid parameter combinations, unresolvable configurations).
class precondition_error : public std::invalid_argument {
public:
    explicit precondition_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when a numerical procedure fails (divergence, NaN, quadrature
/// breakdown) as opposed to being called incorrectly.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw precondition_error(msg);
}

/// Deterministic 64-bit generator (splitmix64). Used for all sampling so
/// that runs are reproducible from a single seed across platforms and
/// standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

/// |x|^e with fast paths for the exponents that dominate the solver's
/// inner loop (1, 2, 1/2, 3/2, 3).
inline double pow_abs(double x, double e) {
    const double a = std::fabs(x);
    if (e == 1.0) return a;
    if (e == 2.0) return a * a;
    if (e == 0.5) return std::sqrt(a);
    if (e == 1.5) return a * std::sqrt(a);
    if (e == 3.0) return a * a * a;
    if (a == 0.0) return 0.0;
    return std::pow(a, e);
}

/// Real m-th root for odd m (sign-preserving).
inline double odd_root(double v, int m) {
    if (m == 1) return v;
    if (m == 3) return std::cbrt(v);
    const double r = std::pow(std::fabs(v), 1.0 / static_cast<double>(m));
    return v < 0.0 ? -r : r;
}

/// Integer power with odd-sign preservation, |e| small.
inline double odd_pow(double x, int m) {
    double r = 1.0;
    double b = x;
    int e = m;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

}  // namespace degenfb
