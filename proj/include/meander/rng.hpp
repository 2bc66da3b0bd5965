#pragma once

// Seeded random streams and the handful of variate generators the simulators
// need. Every transform here is written out explicitly (instead of using the
// <random> distributions) so that a given seed yields the same stream on every
// standard library.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace meander {

using Engine = std::mt19937_64;
using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`: master XOR splitmix64(index).
/// Substreams compose, so derive_seed(derive_seed(s, purpose), replicate)
/// names an independent stream per purpose and replicate.
constexpr Seed derive_seed(Seed master, std::uint64_t index) noexcept {
    return master ^ splitmix64(index);
}

inline Engine make_engine(Seed seed) { return Engine(seed); }

/// Uniform on the open interval (0,1) with 53 random bits.
inline double uniform_open(Engine& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1p-53;
}

inline double exponential(Engine& g) { return -std::log(uniform_open(g)); }

/// Standard normal via the Marsaglia polar method (no cached second value,
/// so the output is a pure function of the engine state).
inline double standard_normal(Engine& g) {
    for (;;) {
        const double u = 2.0 * uniform_open(g) - 1.0;
        const double v = 2.0 * uniform_open(g) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
}

namespace detail {

// Marsaglia–Tsang squeeze/rejection for shape >= 1.
inline double gamma_shape_ge1(double shape, Engine& g) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = standard_normal(g);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open(g);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace detail

/// Logarithm of a Gamma(shape, 1) variate. Shapes below one use
/// G(a) = G(a + 1) * U^(1/a), kept in log space so tiny shapes do not
/// underflow.
inline double log_gamma_variate(double shape, Engine& g) {
    if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
    if (shape >= 1.0) return std::log(detail::gamma_shape_ge1(shape, g));
    const double boosted = detail::gamma_shape_ge1(shape + 1.0, g);
    return std::log(boosted) + std::log(uniform_open(g)) / shape;
}

inline double gamma_variate(double shape, Engine& g) {
    return std::exp(log_gamma_variate(shape, g));
}

/// Beta(a, b) as X / (X + Y) for independent Gamma(a), Gamma(b).
inline double beta_variate(double a, double b, Engine& g) {
    const double lx = log_gamma_variate(a, g);
    const double ly = log_gamma_variate(b, g);
    return 1.0 / (1.0 + std::exp(ly - lx));
}

/// Poisson by sequential CDF inversion; intended for moderate means.
inline std::uint64_t poisson_variate(double mean, Engine& g) {
    if (!(mean > 0.0) || mean > 500.0) {
        throw std::domain_error("poisson_variate: mean must lie in (0, 500]");
    }
    const double u = uniform_open(g);
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0 && cdf < u) break;  // rounding guard deep in the tail
    }
    return k;
}

}  // namespace meander
