#pragma once

// Exact worked examples for every module, runnable from the command line.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "partition.hpp"
#include "pitmanyor.hpp"
#include "renewal.hpp"
#include "subordinator.hpp"
#include "tailcore.hpp"
#include "verify.hpp"

namespace meander {

struct SelfTestCase {
    std::string name;
    std::function<bool()> check;
};

namespace detail {

inline bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

inline bool near_all(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-12) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!near(a[i], b[i], tol)) return false;
    }
    return true;
}

template <class Fn>
bool throws(Fn fn) {
    try {
        fn();
    } catch (...) {
        return true;
    }
    return false;
}

inline PrmRealization prm_of(std::vector<MarkedPoint> pts, double horizon = 1.0) {
    return {0.5, horizon, 1e-3, MarkedPointMeasure{std::move(pts)}};
}

inline StepSequence seq_of(std::vector<double> steps, TailModel model = TailModel::exact_pareto(0.5)) {
    return {model, std::move(steps), 0};
}

}  // namespace detail

inline std::vector<SelfTestCase> selftest_cases() {
    using detail::near;
    using detail::near_all;
    using detail::prm_of;
    using detail::seq_of;
    const auto pareto = TailModel::exact_pareto(0.5);
    std::vector<SelfTestCase> cases;
    auto add = [&](std::string name, std::function<bool()> fn) { cases.push_back({std::move(name), std::move(fn)}); };

    // tailcore
    add("pareto_sample(0.5, 0.25) = 16", [] { return near(pareto_sample(0.5, 0.25), 16.0); });
    add("pareto_sample near u = 1 tends to 1", [] { return near(pareto_sample(0.5, 1.0 - 1e-12), 1.0, 1e-11); });
    add("pareto_sample rejects u outside (0,1)", [] { return detail::throws([] { pareto_sample(0.5, 1.0); }); });
    add("scaling_d(pareto 0.5, 100) = 10000", [=] { return near(scaling_d(pareto, 100.0), 1e4); });
    add("scaling_d(., 0) = 1", [=] { return scaling_d(pareto, 0.0) == 1.0; });
    add("n P(Y > d_n x) = x^-alpha", [=] {
        const double n = 50.0;
        const double x = 3.0;
        return near(n * tail_probability(pareto, scaling_d(pareto, n) * x), std::pow(x, -0.5));
    });
    add("scaling_dtilde(pareto 0.5, 1e6) = 1e3", [=] { return near(scaling_dtilde(pareto, 1e6), 1e3); });
    add("dtilde(100) = 10 and d(10) = 100", [=] {
        return near(scaling_dtilde(pareto, 100.0), 10.0) && near(scaling_d(pareto, 10.0), 100.0);
    });
    add("generalized_inverse of a unit step at 1, level 1", [] {
        return generalized_inverse(StepPath{0.0, {1.0}, {2.0}}, 1.0) == 1.0;
    });
    add("generalized_inverse of the identity at 3.7", [] {
        return near(generalized_inverse([](double v) { return v; }, 3.7, 0.0, 10.0), 3.7, 1e-11);
    });
    add("generalized_inverse of partial sums [3,7,12] at 6 is 2", [] {
        return generalized_inverse(StepPath{0.0, {1.0, 2.0, 3.0}, {3.0, 7.0, 12.0}}, 6.0) == 2.0;
    });

    // renewal
    add("simulate_steps is reproducible", [=] {
        const auto a = simulate_steps(pareto, 3, 7);
        const auto b = simulate_steps(pareto, 3, 7);
        return a.steps == b.steps && a.steps.size() == 3 && a.steps[0] >= 1.0 && a.steps[1] >= 1.0 &&
               a.steps[2] >= 1.0;
    });
    add("first_passage([3,4,5], 6)", [] {
        const auto s = first_passage(seq_of({3, 4, 5}), 6.0);
        return s.tau == 2 && near(s.age, 0.5) && near(s.overshoot, 1.0 / 6.0) &&
               near_all(s.prepassage_steps, {0.5});
    });
    add("first_passage([3], 2) crosses at once", [] {
        const auto s = first_passage(seq_of({3}), 2.0);
        return s.tau == 1 && s.age == 1.0 && near(s.overshoot, 0.5) && s.prepassage_steps.empty();
    });
    add("first_passage([1,1,1,1], 2.5)", [] {
        const auto s = first_passage(seq_of({1, 1, 1, 1}), 2.5);
        return s.tau == 3 && near(s.age, 0.2) && near_all(s.prepassage_steps, {0.4, 0.4});
    });
    add("point_measure_Nt([3,4], 100)", [] {
        const auto m = point_measure_Nt(seq_of({3, 4}), 100.0);
        return m.size() == 2 && near(m.points[0].time, 0.1) && near(m.points[0].size, 0.03) &&
               near(m.points[1].time, 0.2) && near(m.points[1].size, 0.04);
    });
    add("point_measure_Nt of no steps is empty", [] { return point_measure_Nt(seq_of({}), 100.0).empty(); });
    add("restrict_before_passage exclusive / inclusive / at 0", [] {
        const MarkedPointMeasure m{{{0.1, 2}, {0.5, 3}, {0.9, 1}}};
        return restrict_before_passage(m, 0.5, false) == MarkedPointMeasure{{{0.1, 2}}} &&
               restrict_before_passage(m, 0.5, true) == MarkedPointMeasure{{{0.1, 2}, {0.5, 3}}} &&
               restrict_before_passage(m, 0.0, false).empty();
    });
    add("prepassage_partition([3,4,5], 6) = [0.5, 0.5]", [] {
        const auto p = prepassage_partition(first_passage(seq_of({3, 4, 5}), 6.0));
        return near_all(p.components, {0.5, 0.5}) && near(p.sum(), 1.0);
    });
    add("prepassage_partition when tau = 1 is [1]", [] {
        return prepassage_partition(first_passage(seq_of({3}), 2.0)).components == std::vector<double>{1.0};
    });

    // subordinator
    add("discarded mass rate at alpha 0.5, cutoff 1e-4 is 0.01", [] {
        return near(truncation_bias_rate(0.5, 1e-4), 0.01);
    });
    add("S(0.5) = 2 and S(1) = 7", [] {
        const auto prm = prm_of({{0.3, 2.0}, {0.7, 5.0}});
        return subordinator_value(prm, 0.5) == 2.0 && subordinator_value(prm, 1.0) == 7.0 &&
               subordinator_value(prm, 0.0) == 0.0;
    });
    add("local_time examples", [] {
        return local_time(prm_of({{0.3, 2.0}}), 1.0) == 0.3 &&
               local_time(prm_of({{0.3, 0.5}, {0.6, 0.7}}), 1.0) == 0.6;
    });
    add("ranked_jumps examples", [] {
        const auto a = ranked_jumps(prm_of({{0.3, 0.6}, {0.8, 2.0}}), 1.0);
        const auto b = ranked_jumps(prm_of({{0.3, 2.0}}), 1.0);
        return near_all(a.components, {0.6, 0.4}) && a.meander_index == std::size_t{1} &&
               b.components == std::vector<double>{1.0};
    });
    add("pitman_yor_at_inverse_time examples", [] {
        const auto a = pitman_yor_at_inverse_time(prm_of({{0.3, 2.0}, {0.7, 6.0}}), 1.0);
        const auto b = pitman_yor_at_inverse_time(prm_of({{0.3, 2.0}}), 1.0);
        return near_all(a.components, {0.75, 0.25}) && !a.meander_index && b.components == std::vector<double>{1.0};
    });

    // pitmanyor
    add("arcsine_pdf(0.5, 0.5) = 2/pi", [] { return near(arcsine_pdf(0.5, 0.5), 2.0 / std::numbers::pi); });
    add("arcsine_pdf(0.5, .) symmetric at 0.2", [] {
        return near(arcsine_pdf(0.5, 0.2), arcsine_pdf(0.5, 0.8)) && near(arcsine_pdf(0.5, 0.2), 0.795774715459477);
    });
    add("arcsine_cdf(0.5, 0.5) = 0.5", [] { return near(arcsine_cdf(0.5, 0.5), 0.5, 1e-12); });
    add("arcsine_cdf endpoints", [] {
        return arcsine_cdf(0.3, 0.0) == 0.0 && arcsine_cdf(0.3, 1.0) == 1.0 && arcsine_cdf(0.8, 1.0) == 1.0;
    });
    add("mittag_leffler_sample is positive", [] {
        Engine g = make_engine(1);
        for (int i = 0; i < 1000; ++i) {
            if (!(mittag_leffler_sample(0.5, g) > 0.0)) return false;
        }
        return true;
    });
    add("frechet_cdf(0.5, 1) = 1/e", [] { return near(frechet_cdf(0.5, 1.0), std::exp(-1.0)); });
    add("frechet_cdf tends to 1", [] { return frechet_cdf(0.5, 1e300) > 1.0 - 1e-12; });
    add("joint density positive on a grid", [] {
        for (int i = 1; i < 10; ++i) {
            for (int j = 1; j < 100; ++j) {
                if (!(joint_age_overshoot_pdf(0.5, 0.1 * i, 0.1 * j) > 0.0)) return false;
            }
        }
        return true;
    });

    // verify
    add("KS of exact quantiles is 0.5/n", [] {
        std::vector<double> xs;
        const int n = 40;
        for (int i = 1; i <= n; ++i) xs.push_back((i - 0.5) / n);
        return near(ks_distance(xs, [](double x) { return x; }), 0.5 / n);
    });
    add("KS of [1,2,3] against Uniform[0,4] is 0.25", [] {
        const std::vector<double> xs{1, 2, 3};
        return near(ks_distance(xs, [](double x) { return x / 4.0; }), 0.25);
    });
    add("two-sample KS examples", [] {
        const std::vector<double> a{1, 2}, b{3, 4}, c{1, 3}, d{2, 4};
        return ks_distance(a, a) == 0.0 && ks_distance(a, b) == 1.0 && ks_distance(c, d) == 0.5;
    });
    add("chi-square with a single cell fails", [] {
        const std::vector<std::uint64_t> counts(5, 1);
        return detail::throws([&] { chi_square_poisson(counts, 1.0); });
    });
    add("hill([8,4,2,1], 3) = 1/(2 ln 2)", [] {
        const std::vector<double> xs{8, 4, 2, 1};
        const std::vector<double> scaled{136, 68, 34, 17};
        return near(hill_estimator(xs, 3), 1.0 / (2.0 * std::numbers::ln2)) &&
               near(hill_estimator(scaled, 3), hill_estimator(xs, 3));
    });
    add("extremal index of isolated / clustered exceedances", [] {
        std::vector<double> isolated(20000, 0.0);
        for (std::size_t i = 0; i < isolated.size(); i += 200) isolated[i] = 10.0;
        const std::vector<double> clustered(500, 10.0);
        return extremal_index_runs(isolated, 1.0, 100) == 1.0 && extremal_index_runs(clustered, 1.0, 10) == 0.0;
    });
    return cases;
}

}  // namespace meander
