#pragma once

// Regular-variation primitives: tail models of the renewal steps, the
// normalizing function d(t) with its asymptotic inverse, and the right
// continuous generalized inverse of nondecreasing paths.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace meander {

/// Thrown when a nondecreasing path never rises above the requested level.
class LevelNotCrossed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Family { ExactPareto, StochVol, SsrwExcursion };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::ExactPareto: return "pareto";
        case Family::StochVol: return "stochvol";
        case Family::SsrwExcursion: return "ssrw";
    }
    return "unknown";
}

/// Step law with tail index alpha in (0,1).
///
/// ExactPareto: P(Y > x) = x^-alpha for x >= 1.
/// StochVol:    Y_n = exp(eta_n) Z_n, eta a stationary unit-variance Gaussian
///              AR(1) with coefficient phi, Z_n iid exact Pareto.
/// SsrwExcursion: return times to zero of a simple symmetric random walk
///              (alpha is 1/2).
class TailModel {
public:
    static TailModel exact_pareto(double alpha) {
        check_alpha(alpha);
        return TailModel(alpha, Family::ExactPareto, 0.0);
    }

    static TailModel stoch_vol(double alpha, double phi) {
        check_alpha(alpha);
        if (!(phi > -1.0 && phi < 1.0)) {
            throw std::domain_error("StochVol coefficient phi must lie in (-1, 1)");
        }
        return TailModel(alpha, Family::StochVol, phi);
    }

    static TailModel ssrw_excursion() { return TailModel(0.5, Family::SsrwExcursion, 0.0); }

    double alpha() const noexcept { return alpha_; }
    Family family() const noexcept { return family_; }
    double phi() const noexcept { return phi_; }

    friend bool operator==(const TailModel&, const TailModel&) = default;

private:
    TailModel(double alpha, Family family, double phi) : alpha_(alpha), family_(family), phi_(phi) {}

    static void check_alpha(double alpha) {
        if (!(alpha > 0.0 && alpha < 1.0)) {
            throw std::domain_error("tail index alpha must lie in (0, 1)");
        }
    }

    double alpha_;
    Family family_;
    double phi_;
};

/// Exact Pareto draw u^(-1/alpha); P(X > x) = x^-alpha for x >= 1.
inline double pareto_sample(double alpha, double u) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("pareto_sample: alpha must lie in (0, 1)");
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("pareto_sample: u must lie in (0, 1)");
    return std::pow(u, -1.0 / alpha);
}

/// P(T > 2m) = C(2m, m) / 4^m for the first return time T of a simple
/// symmetric random walk. Exact product for small m, asymptotic series
/// (relative error below 1e-9) beyond.
inline double ssrw_return_tail(double m) {
    if (m <= 0.0) return 1.0;
    constexpr double kExactLimit = 64.0;
    if (m < kExactLimit) {
        const auto mi = static_cast<int>(std::floor(m));
        double r = 1.0;
        for (int j = 1; j <= mi; ++j) r *= (2.0 * j - 1.0) / (2.0 * j);
        return r;
    }
    const double inv = 1.0 / m;
    const double series = 1.0 - inv / 8.0 + inv * inv / 128.0 + 5.0 * inv * inv * inv / 1024.0 -
                          21.0 * inv * inv * inv * inv / 32768.0;
    return series / std::sqrt(std::numbers::pi * m);
}

/// P(Y > x) for the model's step law.
inline double tail_probability(const TailModel& model, double x) {
    const double a = model.alpha();
    switch (model.family()) {
        case Family::ExactPareto:
            return x < 1.0 ? 1.0 : std::pow(x, -a);
        case Family::StochVol: {
            if (x <= 0.0) return 1.0;
            // eta ~ N(0,1): P(Y > x) = P(eta > ln x) + x^-a e^{a^2/2} Phi(ln x - a)
            const double lx = std::log(x);
            const double upper = 0.5 * std::erfc(lx / std::numbers::sqrt2);
            const double lower = 0.5 * std::erfc(-(lx - a) / std::numbers::sqrt2);
            return upper + std::exp(-a * lx + 0.5 * a * a) * lower;
        }
        case Family::SsrwExcursion:
            return x < 0.0 ? 1.0 : ssrw_return_tail(std::floor(x / 2.0));
    }
    return 1.0;
}

namespace detail {

// inf{x >= 0 : n P(Y > x) <= 1}, bisection to relative tolerance 1e-6.
inline double solve_scaling(const TailModel& model, double n) {
    if (n * tail_probability(model, 0.0) <= 1.0) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (n * tail_probability(model, hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (n * tail_probability(model, mid) > 1.0) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace detail

/// Normalizing function d(n) = d_floor(n) with d_0 = 1, pinned by
/// n P(Y > d_n) = 1. Exact Pareto gives n^(1/alpha); other families solve
/// the tail equation numerically. Values are floored at 1.
inline double scaling_d(const TailModel& model, double n) {
    if (!(n >= 0.0)) throw std::domain_error("scaling_d: argument must be nonnegative");
    const double whole = std::floor(n);
    if (whole < 1.0) return 1.0;
    if (model.family() == Family::ExactPareto) return std::pow(whole, 1.0 / model.alpha());
    return std::max(1.0, detail::solve_scaling(model, whole));
}

/// Asymptotic inverse of scaling_d. For exact Pareto t^alpha; otherwise the
/// inverse of the continuous tail equation, 1 / P(Y > t).
inline double scaling_dtilde(const TailModel& model, double t) {
    if (!(t >= 0.0)) throw std::domain_error("scaling_dtilde: argument must be nonnegative");
    if (model.family() == Family::ExactPareto) return std::pow(t, model.alpha());
    return 1.0 / tail_probability(model, t);
}

/// Right-continuous pure-jump nondecreasing path:
/// path(v) = initial for v < jump_times[0], values[k] on [jump_times[k], jump_times[k+1]).
struct StepPath {
    double initial = 0.0;
    std::vector<double> jump_times;
    std::vector<double> values;

    double operator()(double v) const {
        const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), v);
        if (it == jump_times.begin()) return initial;
        return values[static_cast<std::size_t>(it - jump_times.begin()) - 1];
    }

    /// Partial sums of `increments` placed at times 1, 2, 3, ...
    static StepPath partial_sums(const std::vector<double>& increments) {
        StepPath p;
        p.jump_times.reserve(increments.size());
        p.values.reserve(increments.size());
        double s = 0.0;
        for (std::size_t i = 0; i < increments.size(); ++i) {
            s += increments[i];
            p.jump_times.push_back(static_cast<double>(i + 1));
            p.values.push_back(s);
        }
        return p;
    }
};

/// inf{v : path(v) > u}, by binary search over the stored jumps.
inline double generalized_inverse(const StepPath& path, double u) {
    if (!(u >= 0.0)) throw std::domain_error("generalized_inverse: level must be nonnegative");
    if (path.values.size() != path.jump_times.size()) {
        throw std::invalid_argument("generalized_inverse: jump_times and values differ in length");
    }
    if (path.initial > u) return 0.0;
    const auto it = std::upper_bound(path.values.begin(), path.values.end(), u);
    if (it == path.values.end()) throw LevelNotCrossed("level never crossed");
    return path.jump_times[static_cast<std::size_t>(it - path.values.begin())];
}

/// inf{v in [lo, hi] : path(v) > u} for an arbitrary nondecreasing callable,
/// located by bisection to absolute width `tol`.
template <class Path>
double generalized_inverse(const Path& path, double u, double lo, double hi, double tol = 1e-12) {
    if (!(u >= 0.0)) throw std::domain_error("generalized_inverse: level must be nonnegative");
    if (path(lo) > u) return lo;
    if (!(path(hi) > u)) throw LevelNotCrossed("level never crossed");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (path(mid) > u) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace meander
