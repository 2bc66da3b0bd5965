#pragma once

// Limit laws: Pitman–Yor stick-breaking, the generalized arcsine law of the
// age, the Mittag–Leffler law of the inverse local time, the Fréchet law of
// normalized maxima and the joint age/overshoot density.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "partition.hpp"
#include "rng.hpp"

namespace meander {

namespace detail {

inline void check_alpha(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error(std::string(what) + ": alpha must lie in (0, 1)");
}

inline double arcsine_constant(double alpha) { return std::sin(std::numbers::pi * alpha) / std::numbers::pi; }

}  // namespace detail

/// Size-biased sticks U_i = xi_i prod_{j<i} (1 - xi_j), xi_i ~ Beta(1 - alpha, i alpha).
struct StickSample {
    double alpha = 0.5;
    std::vector<double> sticks;
    double residual = 1.0;

    /// Sticks in descending order (the residual is not a component).
    RankedPartition ranked() const { return RankedPartition::rank(sticks, 1.0); }
};

inline StickSample stick_breaking(double alpha, std::size_t n, Engine& g) {
    detail::check_alpha(alpha, "stick_breaking");
    if (n == 0) throw std::domain_error("stick_breaking: need at least one stick");
    StickSample out{alpha, {}, 1.0};
    out.sticks.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double xi = beta_variate(1.0 - alpha, static_cast<double>(i) * alpha, g);
        out.sticks.push_back(xi * out.residual);
        out.residual *= 1.0 - xi;
    }
    return out;
}

inline StickSample stick_breaking(double alpha, std::size_t n, Seed seed) {
    Engine g = make_engine(seed);
    return stick_breaking(alpha, n, g);
}

/// Generalized arcsine density (sin(pi alpha)/pi) u^-alpha (1-u)^(alpha-1).
inline double arcsine_pdf(double alpha, double u) {
    detail::check_alpha(alpha, "arcsine_pdf");
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("arcsine_pdf: u must lie in (0, 1)");
    return detail::arcsine_constant(alpha) * std::pow(u, -alpha) * std::pow(1.0 - u, alpha - 1.0);
}

/// I_u(1 - alpha, alpha) by tanh-sinh quadrature of the density, which
/// absorbs the algebraic endpoint singularities. Integrates over [0, u] for
/// u <= 1/2 and over [u, 1] (complement) otherwise, so only one singular
/// endpoint is ever inside the range.
inline double arcsine_cdf(double alpha, double u) {
    detail::check_alpha(alpha, "arcsine_cdf");
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("arcsine_cdf: u must lie in [0, 1]");
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 1.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    const double c = detail::arcsine_constant(alpha);
    if (u <= 0.5) {
        auto f = [&](double x) { return c * std::pow(x, -alpha) * std::pow(1.0 - x, alpha - 1.0); };
        return integrator.integrate(f, 0.0, u, 1e-13);
    }
    // Reflected: int_u^1 q(x) dx = int_0^{1-u} q(1 - w) dw, singular only at w = 0.
    auto g = [&](double w) { return c * std::pow(1.0 - w, -alpha) * std::pow(w, alpha - 1.0); };
    return 1.0 - integrator.integrate(g, 0.0, 1.0 - u, 1e-13);
}

/// E[L^n] = n! / (Gamma(1-alpha)^n Gamma(1 + n alpha)) for L = inf{t : S(t) > 1}.
inline double mittag_leffler_moment(double alpha, int n) {
    detail::check_alpha(alpha, "mittag_leffler_moment");
    return std::tgamma(n + 1.0) / (std::pow(std::tgamma(1.0 - alpha), n) * std::tgamma(1.0 + n * alpha));
}

/// Draw of L = inf{t : S(t) > 1} for the subordinator with Levy measure
/// alpha x^(-alpha-1) dx: Gamma(1-alpha)^-1 sigma^-alpha, where sigma is the
/// standard positive stable variate (Laplace transform exp(-lambda^alpha))
/// from Kanter's representation.
inline double mittag_leffler_sample(double alpha, Engine& g) {
    detail::check_alpha(alpha, "mittag_leffler_sample");
    const double u = std::numbers::pi * uniform_open(g);
    const double e = exponential(g);
    // Kanter: sigma = (A(u) / e)^((1-alpha)/alpha), hence sigma^-alpha = (e / A(u))^(1-alpha).
    const double kanter = std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) * std::sin((1.0 - alpha) * u) /
                          std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    return std::pow(e / kanter, 1.0 - alpha) / std::tgamma(1.0 - alpha);
}

inline double mittag_leffler_sample(double alpha, Seed seed) {
    Engine g = make_engine(seed);
    return mittag_leffler_sample(alpha, g);
}

/// Standard Fréchet CDF exp(-x^-alpha).
inline double frechet_cdf(double alpha, double x) {
    if (!(alpha > 0.0)) throw std::domain_error("frechet_cdf: alpha must be positive");
    if (!(x > 0.0)) throw std::domain_error("frechet_cdf: x must be positive");
    return std::exp(-std::pow(x, -alpha));
}

/// Joint density of the limiting (age, overshoot):
/// (alpha sin(pi alpha)/pi) (1-a)^(alpha-1) (a+b)^(-alpha-1).
inline double joint_age_overshoot_pdf(double alpha, double a, double b) {
    detail::check_alpha(alpha, "joint_age_overshoot_pdf");
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("joint_age_overshoot_pdf: a must lie in (0, 1)");
    if (!(b > 0.0)) throw std::domain_error("joint_age_overshoot_pdf: b must be positive");
    return alpha * detail::arcsine_constant(alpha) * std::pow(1.0 - a, alpha - 1.0) * std::pow(a + b, -alpha - 1.0);
}

/// P(a0 <= A <= a1, B > b) = int_{a0}^{a1} (sin(pi alpha)/pi) (1-a)^(alpha-1) (a+b)^-alpha da.
/// With v = (1-a)^alpha the integrand becomes (c/alpha) (1 - v^(1/alpha) + b)^-alpha,
/// bounded for b > 0. At b = 0 the rectangle is just an arcsine interval.
inline double joint_age_overshoot_tail(double alpha, double a0, double a1, double b) {
    detail::check_alpha(alpha, "joint_age_overshoot_tail");
    if (!(0.0 <= a0 && a0 <= a1 && a1 <= 1.0) || !(b >= 0.0)) {
        throw std::domain_error("joint_age_overshoot_tail: invalid rectangle");
    }
    if (a0 == a1) return 0.0;
    if (b == 0.0) return arcsine_cdf(alpha, a1) - arcsine_cdf(alpha, a0);
    const double c = detail::arcsine_constant(alpha);
    auto f = [&](double v) { return c / alpha * std::pow(1.0 - std::pow(v, 1.0 / alpha) + b, -alpha); };
    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    return Rule::integrate(f, std::pow(1.0 - a1, alpha), std::pow(1.0 - a0, alpha), 20, 1e-13);
}

/// P(B <= b) for the limiting overshoot. B/(1+B) has the generalized arcsine law.
inline double overshoot_cdf(double alpha, double b) {
    detail::check_alpha(alpha, "overshoot_cdf");
    if (!(b >= 0.0)) throw std::domain_error("overshoot_cdf: b must be nonnegative");
    if (std::isinf(b)) return 1.0;
    return arcsine_cdf(alpha, b / (1.0 + b));
}

/// Quantile of the limiting overshoot, by bisection to relative 1e-10.
inline double overshoot_quantile(double alpha, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("overshoot_quantile: p must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    while (overshoot_cdf(alpha, hi) < p) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (overshoot_cdf(alpha, mid) < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Quantile of the generalized arcsine law, by bisection down to adjacent
/// doubles (the density is unbounded at both ends).
inline double arcsine_quantile(double alpha, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("arcsine_quantile: p must lie in (0, 1)");
    double lo = 0.0;
    double hi = 1.0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (arcsine_cdf(alpha, mid) < p) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace meander
