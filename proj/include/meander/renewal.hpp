#pragma once

// Renewal processes with regularly varying steps: step simulation, first
// passage quantities, the scaled point measure N_t and the ranked partition of
// [0,1] formed by the steps completed before the passage together with the age.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "partition.hpp"
#include "rng.hpp"
#include "tailcore.hpp"

namespace meander {

class InsufficientSteps : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StepSequence {
    TailModel model;
    std::vector<double> steps;
    Seed seed = 0;
};

/// First return time to zero of a simple symmetric random walk, sampled
/// exactly by inverting P(T > 2m) = C(2m, m) / 4^m.
inline double ssrw_excursion_length(Engine& g) {
    const double u = uniform_open(g);
    double r = 1.0;
    for (int m = 1; m < 64; ++m) {
        r *= (2.0 * m - 1.0) / (2.0 * m);
        if (r <= u) return 2.0 * m;
    }
    // Beyond the exact range: bisection on the continuous tail series.
    double lo = 63.0;
    double hi = std::max(128.0, 2.0 / (std::numbers::pi * u * u));
    while (ssrw_return_tail(hi) > u) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 0.5; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ssrw_return_tail(mid) > u) lo = mid;
        else hi = mid;
    }
    double m = std::ceil(hi);
    if (m < 0x1p52) {
        while (m > 64.0 && ssrw_return_tail(m - 1.0) <= u) m -= 1.0;
        while (ssrw_return_tail(m) > u) m += 1.0;
    }
    return 2.0 * m;
}

/// Excursion lengths recorded from an explicit +-1 walk. The walk stops once
/// `count` excursions completed or `max_steps` steps were taken; an unfinished
/// final excursion is dropped.
inline std::vector<double> ssrw_walk_excursions(std::size_t count, Engine& g,
                                                std::uint64_t max_steps = std::uint64_t{1} << 32) {
    std::vector<double> out;
    out.reserve(count);
    std::int64_t position = 0;
    std::uint64_t since_zero = 0;
    std::uint64_t bits = 0;
    int bits_left = 0;
    for (std::uint64_t step = 0; step < max_steps && out.size() < count; ++step) {
        if (bits_left == 0) {
            bits = g();
            bits_left = 64;
        }
        position += (bits & 1U) ? 1 : -1;
        bits >>= 1;
        --bits_left;
        ++since_zero;
        if (position == 0) {
            out.push_back(static_cast<double>(since_zero));
            since_zero = 0;
        }
    }
    return out;
}

/// Sequential generator of a step sequence. Successive calls continue the
/// same stream, so a prefix never depends on how many steps follow it.
class StepGenerator {
public:
    StepGenerator(TailModel model, Seed seed) : model_(model), seed_(seed), engine_(make_engine(seed)) {}

    double next() {
        switch (model_.family()) {
            case Family::ExactPareto:
                return pareto_sample(model_.alpha(), uniform_open(engine_));
            case Family::StochVol: {
                const double phi = model_.phi();
                const double z = standard_normal(engine_);
                eta_ = started_ ? phi * eta_ + std::sqrt(1.0 - phi * phi) * z : z;
                started_ = true;
                return std::exp(eta_) * pareto_sample(model_.alpha(), uniform_open(engine_));
            }
            case Family::SsrwExcursion:
                return ssrw_excursion_length(engine_);
        }
        return 0.0;
    }

    void append(std::vector<double>& out, std::size_t count) {
        out.reserve(out.size() + count);
        for (std::size_t i = 0; i < count; ++i) out.push_back(next());
    }

    const TailModel& model() const noexcept { return model_; }
    Seed seed() const noexcept { return seed_; }

private:
    TailModel model_;
    Seed seed_;
    Engine engine_;
    double eta_ = 0.0;
    bool started_ = false;
};

/// `count` steps of the model, deterministic in (model, seed, count).
inline StepSequence simulate_steps(const TailModel& model, std::size_t count, Seed seed) {
    if (count == 0) throw std::domain_error("simulate_steps: count must be positive");
    StepGenerator gen(model, seed);
    StepSequence seq{model, {}, seed};
    gen.append(seq.steps, count);
    return seq;
}

struct PassageSummary {
    double t = 0.0;
    std::size_t tau = 0;
    double age = 0.0;
    double overshoot = 0.0;
    double scaled_passage = 0.0;
    std::vector<double> prepassage_steps;
};

/// tau = inf{k : Y_1 + ... + Y_k > t} and the normalized quantities around it.
inline PassageSummary first_passage(const StepSequence& seq, double t) {
    if (!(t > 0.0)) throw std::domain_error("first_passage: level must be positive");
    double before = 0.0;
    for (std::size_t k = 0; k < seq.steps.size(); ++k) {
        const double after = before + seq.steps[k];
        if (after > t) {
            PassageSummary s;
            s.t = t;
            s.tau = k + 1;
            s.age = (t - before) / t;
            s.overshoot = (after - t) / t;
            s.scaled_passage = static_cast<double>(s.tau) / scaling_dtilde(seq.model, t);
            s.prepassage_steps.reserve(k);
            for (std::size_t i = 0; i < k; ++i) s.prepassage_steps.push_back(seq.steps[i] / t);
            return s;
        }
        before = after;
    }
    throw InsufficientSteps("insufficient steps: the prefix never crosses the level");
}

struct Passage {
    StepSequence steps;
    PassageSummary summary;
};

/// Simulates steps in geometrically growing batches until the level is
/// crossed (at most 2^40 steps in total).
inline Passage simulate_passage(const TailModel& model, double t, Seed seed) {
    if (!(t > 0.0)) throw std::domain_error("simulate_passage: level must be positive");
    constexpr std::size_t kCap = std::size_t{1} << 40;
    StepGenerator gen(model, seed);
    StepSequence seq{model, {}, seed};
    const double guess = std::ceil(scaling_dtilde(model, t));
    std::size_t batch = guess < 16.0 ? 16 : guess > 65536.0 ? 65536 : static_cast<std::size_t>(guess);
    double sum = 0.0;
    while (seq.steps.size() < kCap) {
        const std::size_t start = seq.steps.size();
        gen.append(seq.steps, std::min(batch, kCap - start));
        for (std::size_t i = start; i < seq.steps.size(); ++i) sum += seq.steps[i];
        if (sum > t) return {seq, first_passage(seq, t)};
        batch *= 2;
    }
    throw InsufficientSteps("insufficient steps: level not crossed within 2^40 steps");
}

/// N_t = sum_i delta_(i / dtilde(t), Y_i / t).
inline MarkedPointMeasure point_measure_Nt(const StepSequence& seq, double t) {
    if (!(t >= 1.0)) throw std::domain_error("point_measure_Nt: level must be at least 1");
    const double dt = scaling_dtilde(seq.model, t);
    MarkedPointMeasure m;
    m.points.reserve(seq.steps.size());
    for (std::size_t i = 0; i < seq.steps.size(); ++i) {
        m.points.push_back({static_cast<double>(i + 1) / dt, seq.steps[i] / t});
    }
    return m;
}

/// Points with time < passage_time, or <= passage_time when inclusive.
inline MarkedPointMeasure restrict_before_passage(const MarkedPointMeasure& measure, double passage_time,
                                                  bool inclusive) {
    MarkedPointMeasure out;
    for (const auto& p : measure.points) {
        if (p.time < passage_time || (inclusive && p.time == passage_time)) out.points.push_back(p);
    }
    return out;
}

/// {age} together with the normalized pre-passage steps, ranked; total 1.
inline RankedPartition prepassage_partition(const PassageSummary& summary) {
    std::vector<double> parts;
    parts.reserve(summary.prepassage_steps.size() + 1);
    parts.push_back(summary.age);
    parts.insert(parts.end(), summary.prepassage_steps.begin(), summary.prepassage_steps.end());
    return RankedPartition::rank(std::move(parts), 1.0, std::size_t{0});
}

}  // namespace meander
