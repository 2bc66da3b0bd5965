#pragma once

// Value types shared by the renewal and subordinator simulators.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace meander {

struct MarkedPoint {
    double time;
    double size;

    friend bool operator==(const MarkedPoint&, const MarkedPoint&) = default;
};

/// Finite point measure on [0, inf) x (0, inf], one point per time.
struct MarkedPointMeasure {
    std::vector<MarkedPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Number of points in [t0, t1] x (y, inf].
    std::size_t count_in(double t0, double t1, double y) const {
        return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const MarkedPoint& p) {
            return p.time >= t0 && p.time <= t1 && p.size > y;
        }));
    }

    friend bool operator==(const MarkedPointMeasure&, const MarkedPointMeasure&) = default;
};

/// Nonincreasing sequence of nonnegative interval lengths with known total.
/// `meander_index`, when present, locates the final incomplete interval.
struct RankedPartition {
    std::vector<double> components;
    double total = 0.0;
    std::optional<std::size_t> meander_index;

    /// Ranks `parts` in descending order (stable). `meander` is the index in
    /// `parts` of the meander component, if any.
    static RankedPartition rank(std::vector<double> parts, double total,
                                std::optional<std::size_t> meander = std::nullopt) {
        for (double p : parts) {
            if (!(p >= 0.0)) throw std::domain_error("partition components must be nonnegative");
        }
        std::vector<std::size_t> order(parts.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return parts[a] > parts[b]; });
        RankedPartition out;
        out.total = total;
        out.components.reserve(parts.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            out.components.push_back(parts[order[k]]);
            if (meander && order[k] == *meander) out.meander_index = k;
        }
        return out;
    }

    /// Largest `k` components, zero-padded.
    std::vector<double> top(std::size_t k) const {
        std::vector<double> out(k, 0.0);
        std::copy_n(components.begin(), std::min(k, components.size()), out.begin());
        return out;
    }

    double sum() const { return std::accumulate(components.begin(), components.end(), 0.0); }
};

}  // namespace meander
