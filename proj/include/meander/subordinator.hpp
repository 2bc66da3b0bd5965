#pragma once

// The alpha-stable subordinator S(t) = sum_{T_i <= t} P_i built from a
// Poisson random measure with intensity Leb x mu, mu(x, inf) = x^-alpha,
// truncated to jumps above a cutoff; its inverse local time L and the ranked
// jumps V(s) including the meander.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "partition.hpp"
#include "rng.hpp"
#include "tailcore.hpp"

namespace meander {

class HorizonTooShort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BeyondHorizon : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Points of a PRM(Leb x mu) restricted to [0, horizon] x (cutoff, inf],
/// sorted by time.
struct PrmRealization {
    double alpha = 0.5;
    double horizon = 1.0;
    double cutoff = 1.0;
    MarkedPointMeasure points;
};

/// Expected mass per unit time of the discarded jumps below `cutoff`:
/// int_0^cutoff x alpha x^(-alpha-1) dx.
inline double truncation_bias_rate(double alpha, double cutoff) {
    return alpha * std::pow(cutoff, 1.0 - alpha) / (1.0 - alpha);
}

/// Expected discarded mass over the realization's horizon.
inline double truncation_bias_bound(const PrmRealization& prm) {
    return truncation_bias_rate(prm.alpha, prm.cutoff) * prm.horizon;
}

/// Cutoff making the expected discarded mass over [0, horizon] equal to
/// relative_bias * level.
inline double default_cutoff(double alpha, double level, double horizon, double relative_bias = 1e-4) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(level > 0.0) || !(horizon > 0.0) || !(relative_bias > 0.0)) {
        throw std::domain_error("default_cutoff: invalid parameters");
    }
    return std::pow(relative_bias * level * (1.0 - alpha) / (alpha * horizon), 1.0 / (1.0 - alpha));
}

namespace detail {

inline void check_prm_parameters(double alpha, double horizon, double cutoff) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("PRM: alpha must lie in (0, 1)");
    if (!(horizon > 0.0)) throw std::domain_error("PRM: horizon must be positive");
    if (!(cutoff > 0.0)) throw std::domain_error("PRM: cutoff must be positive");
}

// Arrivals of the truncated PRM in time order: exponential gaps with rate
// cutoff^-alpha, sizes cutoff * U^(-1/alpha).
class PrmArrivals {
public:
    PrmArrivals(double alpha, double cutoff, Seed seed)
        : alpha_(alpha), cutoff_(cutoff), rate_(std::pow(cutoff, -alpha)), engine_(make_engine(seed)) {}

    MarkedPoint next() {
        time_ += exponential(engine_) / rate_;
        const double u = uniform_open(engine_);
        const double size = alpha_ == 0.5 ? cutoff_ / (u * u) : cutoff_ * std::pow(u, -1.0 / alpha_);
        return {time_, size};
    }

private:
    double alpha_;
    double cutoff_;
    double rate_;
    Engine engine_;
    double time_ = 0.0;
};

}  // namespace detail

/// Realization on [0, horizon] with all jumps above `cutoff`.
inline PrmRealization sample_prm(double alpha, double horizon, double cutoff, Seed seed) {
    detail::check_prm_parameters(alpha, horizon, cutoff);
    PrmRealization prm{alpha, horizon, cutoff, {}};
    detail::PrmArrivals arrivals(alpha, cutoff, seed);
    for (auto p = arrivals.next(); p.time <= horizon; p = arrivals.next()) prm.points.points.push_back(p);
    return prm;
}

/// Realization guaranteed to carry S above `level`. Starts on
/// [0, initial_horizon] and doubles the window with fresh points (up to 20
/// times) while S(horizon) <= level. With `stop_at_crossing` the realization
/// ends at the jump that crosses the level, which becomes the horizon.
inline PrmRealization sample_prm_to_level(double alpha, double cutoff, double level, Seed seed,
                                          double initial_horizon = 1.0, bool stop_at_crossing = true) {
    detail::check_prm_parameters(alpha, initial_horizon, cutoff);
    if (!(level > 0.0)) throw std::domain_error("sample_prm_to_level: level must be positive");
    PrmRealization prm{alpha, initial_horizon, cutoff, {}};
    detail::PrmArrivals arrivals(alpha, cutoff, seed);
    auto pending = arrivals.next();
    double sum = 0.0;
    for (int doublings = 0;; ++doublings) {
        while (pending.time <= prm.horizon) {
            prm.points.points.push_back(pending);
            sum += pending.size;
            if (stop_at_crossing && sum > level) {
                prm.horizon = pending.time;
                return prm;
            }
            pending = arrivals.next();
        }
        if (sum > level) return prm;
        if (doublings == 20) throw HorizonTooShort("horizon too short: level not crossed after 20 doublings");
        prm.horizon *= 2.0;
    }
}

/// S(t) = sum of sizes with time <= t.
inline double subordinator_value(const PrmRealization& prm, double t) {
    if (!(t >= 0.0)) throw std::domain_error("subordinator_value: time must be nonnegative");
    if (t > prm.horizon) throw BeyondHorizon("beyond horizon");
    double s = 0.0;
    for (const auto& p : prm.points.points) {
        if (p.time > t) break;
        s += p.size;
    }
    return s;
}

/// Path of S as a pure jump function.
inline StepPath subordinator_path(const PrmRealization& prm) {
    StepPath path;
    path.jump_times.reserve(prm.points.size());
    path.values.reserve(prm.points.size());
    double s = 0.0;
    for (const auto& p : prm.points.points) {
        s += p.size;
        path.jump_times.push_back(p.time);
        path.values.push_back(s);
    }
    return path;
}

/// L(s) = inf{t : S(t) > s}.
inline double local_time(const PrmRealization& prm, double s) {
    if (!(s > 0.0)) throw std::domain_error("local_time: level must be positive");
    try {
        return generalized_inverse(subordinator_path(prm), s);
    } catch (const LevelNotCrossed&) {
        throw HorizonTooShort("horizon too short: S never exceeds the level");
    }
}

/// V(s): jumps completed before L(s) together with the meander
/// A_s = s - sum_{T_i < L(s)} P_i, ranked; total s. Discarded small jumps are
/// absorbed by the meander.
inline RankedPartition ranked_jumps(const PrmRealization& prm, double s) {
    const double crossing = local_time(prm, s);
    std::vector<double> parts;
    double completed = 0.0;
    for (const auto& p : prm.points.points) {
        if (p.time >= crossing) break;
        parts.push_back(p.size);
        completed += p.size;
    }
    const std::size_t meander = parts.size();
    parts.push_back(s - completed);
    return RankedPartition::rank(std::move(parts), s, meander);
}

/// V(S(t)) / S(t): jumps up to time t ranked and normalized by S(t).
inline RankedPartition pitman_yor_at_inverse_time(const PrmRealization& prm, double t) {
    if (!(t > 0.0)) throw std::domain_error("pitman_yor_at_inverse_time: time must be positive");
    if (t > prm.horizon) throw BeyondHorizon("beyond horizon");
    std::vector<double> parts;
    double total = 0.0;
    for (const auto& p : prm.points.points) {
        if (p.time > t) break;
        parts.push_back(p.size);
        total += p.size;
    }
    if (parts.empty()) throw std::domain_error("pitman_yor_at_inverse_time: no jumps up to t");
    for (double& x : parts) x /= total;
    return RankedPartition::rank(std::move(parts), 1.0);
}

}  // namespace meander
