#pragma once

// Statistical checks used to turn limit theorems into pass/fail tests:
// Kolmogorov–Smirnov distances, chi-square goodness of fit, the Hill
// estimator and a runs estimator of the extremal index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace meander {

class EmptySample : public std::invalid_argument {
public:
    EmptySample() : std::invalid_argument("empty sample") {}
};

class BinningError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class TooFewExceedances : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Outcome of one check. Distances pass when statistic <= threshold;
/// p-values and other lower-bounded quantities pass when statistic >= threshold.
struct TestReport {
    enum class Bound { AtMost, AtLeast };

    std::string description;
    double statistic = 0.0;
    double threshold = 0.0;
    Bound bound = Bound::AtMost;
    std::vector<std::size_t> sample_sizes;
    bool passed = false;

    static TestReport at_most(std::string description, double statistic, double threshold,
                              std::vector<std::size_t> sizes = {}) {
        return {std::move(description), statistic, threshold, Bound::AtMost, std::move(sizes),
                statistic <= threshold};
    }

    static TestReport at_least(std::string description, double statistic, double threshold,
                               std::vector<std::size_t> sizes = {}) {
        return {std::move(description), statistic, threshold, Bound::AtLeast, std::move(sizes),
                statistic >= threshold};
    }
};

/// sup_x |F_n(x) - cdf(x)|, evaluated on both sides of every sample point.
inline double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw EmptySample();
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

inline TestReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                                double threshold = 0.01, std::string description = "ks-one-sample") {
    return TestReport::at_most(std::move(description), ks_distance(sample, cdf), threshold, {sample.size()});
}

/// sup_x |F_a(x) - F_b(x)| over the pooled sample.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EmptySample();
    std::vector<double> xa(a.begin(), a.end());
    std::vector<double> xb(b.begin(), b.end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const double na = static_cast<double>(xa.size());
    const double nb = static_cast<double>(xb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < xa.size() && j < xb.size()) {
        const double x = std::min(xa[i], xb[j]);
        while (i < xa.size() && xa[i] == x) ++i;
        while (j < xb.size() && xb[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

inline TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double threshold = 0.03,
                                std::string description = "ks-two-sample") {
    return TestReport::at_most(std::move(description), ks_distance(a, b), threshold, {a.size(), b.size()});
}

/// Upper tail probability of a chi-square variable with `df` degrees of freedom.
inline double chi_square_pvalue(double statistic, double df) {
    if (!(df > 0.0)) throw std::domain_error("chi-square needs positive degrees of freedom");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

/// Pearson statistic of observed cell counts against cell probabilities
/// (which must sum to one); df = cells - 1 - estimated_parameters.
inline ChiSquareResult chi_square_cells(std::span<const double> observed, std::span<const double> probabilities,
                                        int estimated_parameters = 0) {
    if (observed.size() != probabilities.size()) throw std::invalid_argument("chi-square: cell count mismatch");
    if (observed.size() < 2) throw BinningError("chi-square: need at least two cells");
    double n = 0.0;
    for (double o : observed) n += o;
    ChiSquareResult r;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double e = n * probabilities[k];
        if (!(e > 0.0)) throw BinningError("chi-square: cell with zero expected count");
        r.statistic += (observed[k] - e) * (observed[k] - e) / e;
    }
    r.df = static_cast<double>(observed.size()) - 1.0 - estimated_parameters;
    r.p_value = chi_square_pvalue(r.statistic, r.df);
    return r;
}

/// Goodness of fit of integer counts to Poisson(mean). Cells {0}, {1}, ...,
/// {k}, {>= k+1}, with k the largest value whose cell and tail both keep an
/// expected count of at least 5.
inline TestReport chi_square_poisson(std::span<const std::uint64_t> counts, double mean, double threshold = 0.01,
                                     std::string description = "chi-square-poisson") {
    if (counts.empty()) throw EmptySample();
    if (!(mean > 0.0)) throw std::domain_error("chi_square_poisson: mean must be positive");
    const double n = static_cast<double>(counts.size());
    std::vector<double> probs;
    double p = std::exp(-mean);
    double tail = 1.0;
    for (std::uint64_t j = 0;; ++j) {
        if (j > 0) p *= mean / static_cast<double>(j);
        if (n * p < 5.0 || n * (tail - p) < 5.0) break;
        probs.push_back(p);
        tail -= p;
    }
    probs.push_back(tail);
    if (probs.size() < 2) throw BinningError("chi_square_poisson: binning leaves a single cell");
    const std::uint64_t last = probs.size() - 1;
    std::vector<double> observed(probs.size(), 0.0);
    for (std::uint64_t c : counts) observed[std::min(c, last)] += 1.0;
    const auto r = chi_square_cells(observed, probs);
    return TestReport::at_least(std::move(description), r.p_value, threshold, {counts.size()});
}

/// k / sum_{i<=k} log(X_(i) / X_(k+1)) over descending order statistics.
inline double hill_estimator(std::span<const double> sample, std::size_t k) {
    if (k == 0 || k >= sample.size()) throw std::out_of_range("hill_estimator: k out of range");
    std::vector<double> xs(sample.begin(), sample.end());
    for (double x : xs) {
        if (!(x > 0.0)) throw std::domain_error("hill_estimator: sample must be positive");
    }
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end(), std::greater<>());
    const double pivot = xs[k];
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += std::log(xs[i] / pivot);
    return static_cast<double>(k) / sum;
}

/// ceil(2 n^(2/3)) capped at n/10.
inline std::size_t hill_default_k(std::size_t n) {
    const auto k = static_cast<std::size_t>(std::ceil(2.0 * std::pow(static_cast<double>(n), 2.0 / 3.0)));
    return std::max<std::size_t>(1, std::min(k, n / 10));
}

/// Fraction of exceedances of `threshold` not followed by another exceedance
/// within the next `block` observations; only indices i with i + block inside
/// the sample take part.
inline double extremal_index_runs(std::span<const double> sample, double threshold, std::size_t block) {
    if (block == 0 || block >= sample.size()) throw std::out_of_range("extremal_index_runs: block out of range");
    const std::size_t last = sample.size() - block;
    std::size_t exceed = 0;
    std::size_t isolated = 0;
    // Index of the next exceedance strictly after i, scanned right to left.
    std::size_t next = sample.size();
    for (std::size_t i = sample.size(); i-- > 0;) {
        if (sample[i] > threshold) {
            if (i < last) {
                ++exceed;
                if (next > i + block) ++isolated;
            }
            next = i;
        }
    }
    if (exceed < 50) throw TooFewExceedances("too few exceedances");
    return static_cast<double>(isolated) / static_cast<double>(exceed);
}

/// Empirical quantile (order statistic at floor(p * (n - 1))).
inline double empirical_quantile(std::span<const double> sample, double p) {
    if (sample.empty()) throw EmptySample();
    std::vector<double> xs(sample.begin(), sample.end());
    const auto idx = static_cast<std::size_t>(std::floor(std::clamp(p, 0.0, 1.0) * static_cast<double>(xs.size() - 1)));
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(idx), xs.end());
    return xs[idx];
}

}  // namespace meander
