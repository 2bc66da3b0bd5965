#pragma once

// Named Monte Carlo experiments, their JSON configuration and CSV outputs.
// Each replicate draws from its own substream derived from (seed, purpose,
// replicate index), so outputs do not depend on the number of worker threads
// and any prefix of replicates matches a shorter run.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <json.hpp>

#include "parallel.hpp"
#include "partition.hpp"
#include "pitmanyor.hpp"
#include "renewal.hpp"
#include "rng.hpp"
#include "subordinator.hpp"
#include "tailcore.hpp"
#include "verify.hpp"

namespace meander {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentInfo {
    std::string_view name;
    std::string_view summary;
    double default_level;
};

inline constexpr std::array<ExperimentInfo, 8> kExperiments{{
    {"dynkin-lamperti", "age at the passage of level t against the generalized arcsine law", 1e5},
    {"main-theorem", "ranked pre-passage steps and age against Pitman-Yor stick-breaking and subordinator jumps", 1e5},
    {"point-process", "counts of N_t on [0,1]x(1,inf] against Poisson(1)", 1e6},
    {"joint-limit", "(age, overshoot, scaled passage time) against the joint limit law and Mittag-Leffler", 1e5},
    {"pitman-yor-identity", "V(s)/s against V(S(t))/S(t) for the stable subordinator", 1.0},
    {"ssrw-excursions", "ranked excursion lengths of the simple random walk against Pitman-Yor(1/2)", 1e6},
    {"dependence", "stochastic-volatility steps: Hill, extremal index, then the arcsine law of the age", 1e5},
    {"frechet-max", "normalized maxima M_n/d_n against the Frechet law", 1e5},
}};

inline const ExperimentInfo* find_experiment(std::string_view name) {
    for (const auto& e : kExperiments) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

// Acceptance thresholds and fixed experiment sizes.
namespace limits {
inline constexpr double kAgeArcsineKs = 0.02;
inline constexpr double kAgeMeanError = 0.01;
inline constexpr double kRankedKs = 0.03;
inline constexpr double kPoissonPValue = 0.01;
inline constexpr double kCountMeanError = 0.03;
inline constexpr double kPassageVsMittagLefflerKs = 0.03;
inline constexpr double kMittagLefflerMeanError = 0.005;
inline constexpr double kMarginalizationError = 1e-6;
inline constexpr double kJointPValue = 0.01;
inline constexpr double kMarginalKs = 0.02;
inline constexpr double kIdentityKs = 0.03;
inline constexpr double kTruncationBias = 1e-4;
inline constexpr double kSsrwKs = 0.04;
inline constexpr double kHillError = 0.05;
inline constexpr double kExtremalIndex = 0.9;
inline constexpr double kDependentAgeKs = 0.03;
inline constexpr double kFrechetKs = 0.02;

inline constexpr std::size_t kTopComponents = 5;
inline constexpr std::size_t kSticks = 200;
inline constexpr std::size_t kMittagLefflerMeanDraws = 1'000'000;
inline constexpr std::size_t kMittagLefflerKsDraws = 10'000;
inline constexpr std::size_t kDependenceSteps = 1'000'000;
inline constexpr std::size_t kHillK = 2000;
inline constexpr std::size_t kRunsBlock = 100;
inline constexpr double kRunsQuantile = 0.999;
inline constexpr std::size_t kJointGrid = 10;
}  // namespace limits

struct CutoffPolicy {
    /// Expected discarded small-jump mass as a fraction of the target level.
    double relative_bias = 1e-4;
    /// Planning horizon, in units of s^alpha, used to size the cutoff.
    double planning_horizon = 2.0;
};

struct ExperimentConfig {
    std::string experiment;
    TailModel model = TailModel::exact_pareto(0.5);
    std::vector<double> t_levels;
    std::size_t replicates = 1;
    Seed seed = 0;
    CutoffPolicy cutoff;
    std::filesystem::path output_path;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

inline TailModel parse_model(const nlohmann::json& j, std::optional<double> alpha, const std::string& experiment) {
    std::string family;
    if (experiment == "dependence") family = "stochvol";
    else if (experiment == "ssrw-excursions") family = "ssrw";
    else family = "pareto";
    double phi = 0.7;
    if (!j.is_null()) {
        require(j.is_object(), "model must be an object");
        for (const auto& [key, value] : j.items()) {
            if (key == "family") {
                require(value.is_string(), "model.family must be a string");
                family = value.get<std::string>();
            } else if (key == "phi") {
                require(value.is_number(), "model.phi must be a number");
                phi = value.get<double>();
            } else {
                throw ConfigError("unknown field model." + key);
            }
        }
    }
    if (experiment == "dependence") require(family == "stochvol", "dependence requires model.family = stochvol");
    if (experiment == "ssrw-excursions") require(family == "ssrw", "ssrw-excursions requires model.family = ssrw");
    try {
        if (family == "pareto") return TailModel::exact_pareto(alpha.value_or(0.5));
        if (family == "stochvol") return TailModel::stoch_vol(alpha.value_or(0.5), phi);
        if (family == "ssrw") {
            require(!alpha || *alpha == 0.5, "ssrw model has alpha fixed to 0.5");
            return TailModel::ssrw_excursion();
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown model.family " + family);
}

}  // namespace detail

/// Parses and validates a configuration document. Unknown fields are rejected.
inline ExperimentConfig parse_config(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    using detail::require;
    require(j.is_object(), "configuration must be a JSON object");
    static constexpr std::array<std::string_view, 8> kKnown{"experiment", "alpha",    "model",         "t_levels",
                                                            "replicates", "seed",     "cutoff_policy", "output_path"};
    for (const auto& [key, value] : j.items()) {
        require(std::find(kKnown.begin(), kKnown.end(), key) != kKnown.end(), "unknown field " + key);
    }
    ExperimentConfig cfg;
    require(j.contains("experiment") && j["experiment"].is_string(), "experiment must be a string");
    cfg.experiment = j["experiment"].get<std::string>();
    const auto* info = find_experiment(cfg.experiment);
    require(info != nullptr, "unknown experiment " + cfg.experiment);

    std::optional<double> alpha;
    if (j.contains("alpha")) {
        require(j["alpha"].is_number(), "alpha must be a number");
        alpha = j["alpha"].get<double>();
    }
    cfg.model = detail::parse_model(j.contains("model") ? j["model"] : nlohmann::json(), alpha, cfg.experiment);

    if (j.contains("t_levels")) {
        require(j["t_levels"].is_array() && !j["t_levels"].empty(), "t_levels must be a nonempty array");
        for (const auto& v : j["t_levels"]) {
            require(v.is_number() && v.get<double>() > 0.0, "t_levels must be positive numbers");
            const double t = v.get<double>();
            require(cfg.t_levels.empty() || t > cfg.t_levels.back(), "t_levels must be increasing");
            cfg.t_levels.push_back(t);
        }
    } else {
        cfg.t_levels = {info->default_level};
    }

    require(j.contains("replicates") && j["replicates"].is_number_integer() && j["replicates"].get<std::int64_t>() >= 1,
            "replicates must be a positive integer");
    cfg.replicates = j["replicates"].get<std::size_t>();
    require(j.contains("seed") && j["seed"].is_number_unsigned(), "seed must be a nonnegative 64-bit integer");
    cfg.seed = j["seed"].get<std::uint64_t>();

    if (j.contains("cutoff_policy")) {
        const auto& c = j["cutoff_policy"];
        require(c.is_object(), "cutoff_policy must be an object");
        for (const auto& [key, value] : c.items()) {
            require(value.is_number() && value.get<double>() > 0.0, "cutoff_policy." + key + " must be positive");
            if (key == "relative_bias") cfg.cutoff.relative_bias = value.get<double>();
            else if (key == "planning_horizon") cfg.cutoff.planning_horizon = value.get<double>();
            else throw ConfigError("unknown field cutoff_policy." + key);
        }
    }

    require(j.contains("output_path") && j["output_path"].is_string() && !j["output_path"].get<std::string>().empty(),
            "output_path must be a nonempty string");
    cfg.output_path = j["output_path"].get<std::string>();
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

/// One replicate's raw values. Fields that do not apply stay empty.
struct SampleRow {
    std::string source;
    std::size_t replicate = 0;
    std::optional<double> t;
    std::optional<std::size_t> tau;
    std::optional<double> age;
    std::optional<double> overshoot;
    std::optional<double> scaled_passage;
    std::vector<double> top;
    std::optional<double> value;
};

struct ExperimentResult {
    std::vector<SampleRow> rows;
    std::vector<TestReport> reports;

    bool passed() const {
        return std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.passed; });
    }
};

/// Shortest round-trip-safe decimal with 17 significant digits, '.' separator.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

inline std::string samples_csv(const ExperimentResult& result) {
    std::string out = "source,replicate,t,tau,age,overshoot,scaled_passage,v1,v2,v3,v4,v5,value\n";
    auto opt = [&](const std::optional<double>& v) {
        if (v) out += format_double(*v);
        out += ',';
    };
    for (const auto& r : result.rows) {
        out += r.source;
        out += ',';
        out += std::to_string(r.replicate);
        out += ',';
        opt(r.t);
        if (r.tau) out += std::to_string(*r.tau);
        out += ',';
        opt(r.age);
        opt(r.overshoot);
        opt(r.scaled_passage);
        for (std::size_t k = 0; k < limits::kTopComponents; ++k) {
            if (k < r.top.size()) out += format_double(r.top[k]);
            out += ',';
        }
        if (r.value) out += format_double(*r.value);
        out += '\n';
    }
    return out;
}

/// description,statistic,threshold,passed
inline std::string report_csv_row(const TestReport& r) {
    return r.description + ',' + format_double(r.statistic) + ',' + format_double(r.threshold) + ',' +
           (r.passed ? "true" : "false") + '\n';
}

inline std::string reports_csv(const ExperimentResult& result) {
    std::string out = "description,statistic,threshold,passed\n";
    for (const auto& r : result.reports) out += report_csv_row(r);
    return out;
}

namespace detail {

enum Purpose : std::uint64_t {
    kRenewalStream = 1,
    kStickStream = 2,
    kSubordinatorStream = 3,
    kMittagLefflerStream = 4,
    kSequenceStream = 5,
    kInverseTimeStream = 6,
    kMaximaStream = 7,
};

inline Seed stream_seed(Seed master, Purpose purpose, std::size_t level, std::size_t replicate) {
    return derive_seed(derive_seed(derive_seed(master, purpose), level), replicate);
}

struct RenewalDraw {
    double t = 0.0;
    std::size_t tau = 0;
    double age = 0.0;
    double overshoot = 0.0;
    double scaled_passage = 0.0;
    std::vector<double> top;
};

struct JumpDraw {
    std::vector<double> top;
    double meander = 0.0;
    double horizon = 0.0;
    double bias = 0.0;
};

class Runner {
public:
    Runner(const ExperimentConfig& cfg, unsigned threads) : cfg_(cfg), threads_(threads) {}

    ExperimentResult run() {
        const auto& name = cfg_.experiment;
        for (std::size_t level = 0; level < cfg_.t_levels.size(); ++level) {
            level_ = level;
            const double t = cfg_.t_levels[level];
            if (name == "dynkin-lamperti") dynkin_lamperti(t);
            else if (name == "main-theorem") main_theorem(t);
            else if (name == "point-process") point_process(t);
            else if (name == "joint-limit") joint_limit(t);
            else if (name == "pitman-yor-identity") pitman_yor_identity(t);
            else if (name == "ssrw-excursions") ssrw_excursions(t);
            else if (name == "dependence") dependence(t);
            else if (name == "frechet-max") frechet_max(t);
            else throw ConfigError("unknown experiment " + name);
        }
        return std::move(result_);
    }

private:
    double alpha() const { return cfg_.model.alpha(); }

    std::string label(std::string base) const {
        if (cfg_.t_levels.size() > 1) base += "@t=" + format_double(cfg_.t_levels[level_]);
        return base;
    }

    Seed seed(Purpose p, std::size_t replicate) const { return stream_seed(cfg_.seed, p, level_, replicate); }

    std::vector<RenewalDraw> renewal_draws(const TailModel& model, double t, std::size_t n) {
        return run_replicates(n, threads_, [&](std::size_t i) {
            const auto passage = simulate_passage(model, t, seed(kRenewalStream, i));
            const auto& s = passage.summary;
            return RenewalDraw{t, s.tau, s.age, s.overshoot, s.scaled_passage,
                               prepassage_partition(s).top(limits::kTopComponents)};
        });
    }

    void add_renewal_rows(const std::vector<RenewalDraw>& draws, const std::string& source) {
        for (std::size_t i = 0; i < draws.size(); ++i) {
            const auto& d = draws[i];
            result_.rows.push_back({source, i, d.t, d.tau, d.age, d.overshoot, d.scaled_passage, d.top, std::nullopt});
        }
    }

    // Ranked jumps V(s)/s of the truncated subordinator, s = 1.
    std::vector<JumpDraw> jump_draws(double a, std::size_t n) {
        const double horizon = cfg_.cutoff.planning_horizon;
        const double eps = default_cutoff(a, 1.0, horizon, cfg_.cutoff.relative_bias);
        return run_replicates(n, threads_, [&](std::size_t i) {
            const auto prm = sample_prm_to_level(a, eps, 1.0, seed(kSubordinatorStream, i), horizon);
            const auto v = ranked_jumps(prm, 1.0);
            return JumpDraw{v.top(limits::kTopComponents), v.components[*v.meander_index], prm.horizon,
                            truncation_bias_bound(prm)};
        });
    }

    void add_jump_rows(const std::vector<JumpDraw>& draws, const std::string& source) {
        for (std::size_t i = 0; i < draws.size(); ++i) {
            const auto& d = draws[i];
            result_.rows.push_back(
                {source, i, 1.0, std::nullopt, d.meander, std::nullopt, d.horizon, d.top, d.bias});
        }
    }

    template <class Getter>
    static std::vector<double> column(const auto& draws, Getter get) {
        std::vector<double> out;
        out.reserve(draws.size());
        for (const auto& d : draws) out.push_back(get(d));
        return out;
    }

    static double mean(const std::vector<double>& xs) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s / static_cast<double>(xs.size());
    }

    void age_reports(const std::vector<RenewalDraw>& draws, const std::string& prefix, double ks_limit,
                     bool with_mean) {
        const double a = alpha();
        const auto ages = column(draws, [](const RenewalDraw& d) { return d.age; });
        result_.reports.push_back(ks_one_sample(
            ages, [a](double u) { return arcsine_cdf(a, std::clamp(u, 0.0, 1.0)); }, ks_limit,
            label(prefix + "age-vs-arcsine-KS")));
        if (with_mean) {
            result_.reports.push_back(TestReport::at_most(label(prefix + "age-mean-error"),
                                                          std::abs(mean(ages) - (1.0 - a)), limits::kAgeMeanError,
                                                          {ages.size()}));
        }
    }

    void dynkin_lamperti(double t) {
        const auto draws = renewal_draws(cfg_.model, t, cfg_.replicates);
        add_renewal_rows(draws, "renewal");
        age_reports(draws, "", limits::kAgeArcsineKs, true);
    }

    void main_theorem(double t) {
        const double a = alpha();
        const auto renewal = renewal_draws(cfg_.model, t, cfg_.replicates);
        const auto sticks = run_replicates(cfg_.replicates, threads_, [&](std::size_t i) {
            const auto s = stick_breaking(a, limits::kSticks, seed(kStickStream, i));
            return std::pair{s.ranked().top(limits::kTopComponents), s.residual};
        });
        const auto jumps = jump_draws(a, cfg_.replicates);
        add_renewal_rows(renewal, "renewal");
        for (std::size_t i = 0; i < sticks.size(); ++i) {
            result_.rows.push_back({"stick", i, std::nullopt, std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                    sticks[i].first, sticks[i].second});
        }
        add_jump_rows(jumps, "subordinator");
        for (std::size_t k = 0; k < limits::kTopComponents; ++k) {
            const auto r = column(renewal, [k](const RenewalDraw& d) { return d.top[k]; });
            const auto s = column(sticks, [k](const auto& d) { return d.first[k]; });
            const auto j = column(jumps, [k](const JumpDraw& d) { return d.top[k]; });
            const std::string v = "V" + std::to_string(k + 1);
            result_.reports.push_back(ks_two_sample(r, s, limits::kRankedKs, label(v + "-renewal-vs-stick-KS")));
            result_.reports.push_back(ks_two_sample(j, s, limits::kRankedKs, label(v + "-subordinator-vs-stick-KS")));
        }
    }

    void point_process(double t) {
        const auto model = cfg_.model;
        const auto steps = static_cast<std::size_t>(std::max(1.0, std::floor(scaling_dtilde(model, t))));
        const auto counts = run_replicates(cfg_.replicates, threads_, [&](std::size_t i) {
            const auto seq = simulate_steps(model, steps, seed(kRenewalStream, i));
            return static_cast<std::uint64_t>(point_measure_Nt(seq, t).count_in(0.0, 1.0, 1.0));
        });
        std::vector<double> as_double;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            as_double.push_back(static_cast<double>(counts[i]));
            result_.rows.push_back({"Nt", i, t, std::nullopt, std::nullopt, std::nullopt, std::nullopt, {},
                                    static_cast<double>(counts[i])});
        }
        result_.reports.push_back(
            chi_square_poisson(counts, 1.0, limits::kPoissonPValue, label("Nt-count-chi2-pvalue")));
        result_.reports.push_back(TestReport::at_most(label("Nt-count-mean-error"), std::abs(mean(as_double) - 1.0),
                                                      limits::kCountMeanError, {counts.size()}));
    }

    static double marginalization_error(double a) {
        thread_local boost::math::quadrature::exp_sinh<double> integrator;
        double worst = 0.0;
        for (int k = 1; k <= 9; ++k) {
            const double u = 0.1 * k;
            const double m =
                integrator.integrate([&](double b) { return joint_age_overshoot_pdf(a, u, b); }, 0.0,
                                     std::numeric_limits<double>::infinity(), 1e-12);
            worst = std::max(worst, std::abs(m - arcsine_pdf(a, u)));
        }
        return worst;
    }

    void joint_limit(double t) {
        const double a = alpha();
        const auto draws = renewal_draws(cfg_.model, t, cfg_.replicates);
        add_renewal_rows(draws, "renewal");

        // Scaled passage time against direct Mittag-Leffler draws.
        const std::size_t ks_n = std::min(draws.size(), limits::kMittagLefflerKsDraws);
        std::vector<double> passage;
        for (std::size_t i = 0; i < ks_n; ++i) passage.push_back(draws[i].scaled_passage);
        const auto ml = mittag_leffler_draws(a, limits::kMittagLefflerKsDraws, 0);
        result_.reports.push_back(
            ks_two_sample(passage, ml, limits::kPassageVsMittagLefflerKs, label("L-vs-mittag-leffler-KS")));
        const auto ml_many = mittag_leffler_draws(a, limits::kMittagLefflerMeanDraws, 1);
        result_.reports.push_back(TestReport::at_most(label("mittag-leffler-mean-error"),
                                                      std::abs(mean(ml_many) - mittag_leffler_moment(a, 1)),
                                                      limits::kMittagLefflerMeanError, {ml_many.size()}));

        // Marginals.
        age_reports(draws, "", limits::kMarginalKs, false);
        const auto overshoots = column(draws, [](const RenewalDraw& d) { return d.overshoot; });
        result_.reports.push_back(ks_one_sample(
            overshoots, [a](double b) { return overshoot_cdf(a, std::max(b, 0.0)); }, limits::kMarginalKs,
            label("overshoot-vs-limit-KS")));

        // Joint (A, B) on a 10x10 grid of marginal deciles, only once the
        // density integrates back to the arcsine law.
        const double marginal = marginalization_error(a);
        result_.reports.push_back(TestReport::at_most(label("joint-density-marginalization-error"), marginal,
                                                      limits::kMarginalizationError));
        if (marginal <= limits::kMarginalizationError) {
            result_.reports.push_back(TestReport::at_least(label("AB-joint-chi2-pvalue"),
                                                           joint_pvalue(a, draws), limits::kJointPValue,
                                                           {draws.size()}));
        } else {
            result_.reports.push_back(TestReport::at_least(label("AB-joint-chi2-pvalue"), 0.0, limits::kJointPValue,
                                                           {draws.size()}));
        }
    }

    static double joint_pvalue(double a, const std::vector<RenewalDraw>& draws) {
        const std::size_t g = limits::kJointGrid;
        std::vector<double> a_edges{0.0};
        std::vector<double> b_edges{0.0};
        for (std::size_t k = 1; k < g; ++k) {
            a_edges.push_back(arcsine_quantile(a, static_cast<double>(k) / g));
            b_edges.push_back(overshoot_quantile(a, static_cast<double>(k) / g));
        }
        a_edges.push_back(1.0);
        std::vector<double> probs(g * g);
        for (std::size_t i = 0; i < g; ++i) {
            for (std::size_t j = 0; j < g; ++j) {
                const double lower = joint_age_overshoot_tail(a, a_edges[i], a_edges[i + 1], b_edges[j]);
                const double upper =
                    j + 1 < g ? joint_age_overshoot_tail(a, a_edges[i], a_edges[i + 1], b_edges[j + 1]) : 0.0;
                probs[i * g + j] = lower - upper;
            }
        }
        std::vector<double> observed(g * g, 0.0);
        auto bin = [g](const std::vector<double>& edges, double x) {
            const auto it = std::upper_bound(edges.begin() + 1, edges.begin() + static_cast<std::ptrdiff_t>(g), x);
            return static_cast<std::size_t>(it - (edges.begin() + 1));
        };
        for (const auto& d : draws) observed[bin(a_edges, d.age) * g + bin(b_edges, d.overshoot)] += 1.0;
        return chi_square_cells(observed, probs).p_value;
    }

    std::vector<double> mittag_leffler_draws(double a, std::size_t n, std::size_t batch_offset) {
        constexpr std::size_t kChunk = 1000;
        const std::size_t chunks = (n + kChunk - 1) / kChunk;
        const auto parts = run_replicates(chunks, threads_, [&](std::size_t c) {
            Engine g = make_engine(seed(kMittagLefflerStream, batch_offset * 1'000'000'007ULL + c));
            std::vector<double> out;
            for (std::size_t i = c * kChunk; i < std::min(n, (c + 1) * kChunk); ++i) {
                out.push_back(mittag_leffler_sample(a, g));
            }
            return out;
        });
        std::vector<double> all;
        all.reserve(n);
        for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
        return all;
    }

    void pitman_yor_identity(double s) {
        const double a = alpha();
        const double horizon = cfg_.cutoff.planning_horizon * std::pow(s, a);
        const double eps = default_cutoff(a, s, horizon, cfg_.cutoff.relative_bias);
        const auto left = run_replicates(cfg_.replicates, threads_, [&](std::size_t i) {
            const auto prm = sample_prm_to_level(a, eps, s, seed(kSubordinatorStream, i), horizon);
            auto v = ranked_jumps(prm, s);
            for (double& c : v.components) c /= s;
            return JumpDraw{v.top(limits::kTopComponents), v.components[*v.meander_index], prm.horizon,
                            truncation_bias_bound(prm) / s};
        });
        // Right-hand side at t = 1, cutoff sized for level 1 over [0, 1].
        const double eps_right = default_cutoff(a, 1.0, 1.0, cfg_.cutoff.relative_bias);
        const auto right = run_replicates(cfg_.replicates, threads_, [&](std::size_t i) {
            for (std::uint64_t attempt = 0;; ++attempt) {
                const auto prm = sample_prm(a, 1.0, eps_right, derive_seed(seed(kInverseTimeStream, i), attempt));
                if (!prm.points.empty()) return pitman_yor_at_inverse_time(prm, 1.0).top(limits::kTopComponents);
            }
        });
        add_jump_rows(left, "meander");
        for (std::size_t i = 0; i < right.size(); ++i) {
            result_.rows.push_back({"inverse-time", i, 1.0, std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                    right[i], std::nullopt});
        }
        const auto d1_left = column(left, [](const JumpDraw& d) { return d.top[0]; });
        const auto d1_right = column(right, [](const auto& d) { return d[0]; });
        result_.reports.push_back(ks_two_sample(d1_left, d1_right, limits::kIdentityKs, label("D1-identity-KS")));
        const auto bias = column(left, [](const JumpDraw& d) { return d.bias; });
        result_.reports.push_back(TestReport::at_most(label("truncation-bias-bound"), mean(bias),
                                                      limits::kTruncationBias, {bias.size()}));
    }

    void ssrw_excursions(double n) {
        const auto walks = renewal_draws(TailModel::ssrw_excursion(), n, cfg_.replicates);
        const auto jumps = jump_draws(0.5, cfg_.replicates);
        add_renewal_rows(walks, "ssrw");
        add_jump_rows(jumps, "subordinator");
        const auto d1_walk = column(walks, [](const RenewalDraw& d) { return d.top[0]; });
        const auto d1_jump = column(jumps, [](const JumpDraw& d) { return d.top[0]; });
        result_.reports.push_back(
            ks_two_sample(d1_walk, d1_jump, limits::kSsrwKs, label("D1-ssrw-vs-subordinator-KS")));
        age_reports(walks, "ssrw-", limits::kAgeArcsineKs, false);
    }

    void dependence(double t) {
        const double a = alpha();
        const auto seq = simulate_steps(cfg_.model, limits::kDependenceSteps, seed(kSequenceStream, 0));
        const std::size_t k =
            seq.steps.size() > 10 * limits::kHillK ? limits::kHillK : hill_default_k(seq.steps.size());
        const double hill = hill_estimator(seq.steps, k);
        result_.reports.push_back(TestReport::at_most(label("hill-alpha-error"), std::abs(hill - a),
                                                      limits::kHillError, {seq.steps.size()}));
        const double threshold = empirical_quantile(seq.steps, limits::kRunsQuantile);
        const double theta = extremal_index_runs(seq.steps, threshold, limits::kRunsBlock);
        result_.reports.push_back(TestReport::at_least(label("extremal-index-runs"), theta, limits::kExtremalIndex,
                                                       {seq.steps.size()}));
        const auto draws = renewal_draws(cfg_.model, t, cfg_.replicates);
        add_renewal_rows(draws, "renewal");
        age_reports(draws, "dependent-", limits::kDependentAgeKs, false);
    }

    void frechet_max(double level) {
        const double a = alpha();
        const auto n = static_cast<std::size_t>(std::max(1.0, std::floor(level)));
        const double dn = scaling_d(cfg_.model, static_cast<double>(n));
        const auto model = cfg_.model;
        const auto maxima = run_replicates(cfg_.replicates, threads_, [&](std::size_t i) {
            if (model.family() == Family::ExactPareto) {
                // The largest Pareto draw comes from the smallest uniform.
                Engine g = make_engine(seed(kMaximaStream, i));
                double u = 1.0;
                for (std::size_t k = 0; k < n; ++k) u = std::min(u, uniform_open(g));
                return pareto_sample(a, u) / dn;
            }
            StepGenerator gen(model, seed(kMaximaStream, i));
            double m = 0.0;
            for (std::size_t k = 0; k < n; ++k) m = std::max(m, gen.next());
            return m / dn;
        });
        for (std::size_t i = 0; i < maxima.size(); ++i) {
            result_.rows.push_back({"maximum", i, static_cast<double>(n), std::nullopt, std::nullopt, std::nullopt,
                                    std::nullopt, {}, maxima[i]});
        }
        result_.reports.push_back(ks_one_sample(
            maxima, [a](double x) { return x > 0.0 ? frechet_cdf(a, x) : 0.0; }, limits::kFrechetKs,
            label("max-vs-frechet-KS")));
    }

    const ExperimentConfig& cfg_;
    unsigned threads_;
    std::size_t level_ = 0;
    ExperimentResult result_;
};

}  // namespace detail

/// Runs the configured experiment in memory.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = default_thread_count()) {
    return detail::Runner(cfg, threads).run();
}

struct OutputPaths {
    std::filesystem::path samples;
    std::filesystem::path report;
};

/// Samples go to output_path, reports to <stem>_report<ext> beside it.
/// MEANDER_OUTPUT_DIR, when set, replaces the directory part.
inline OutputPaths output_paths(const ExperimentConfig& cfg) {
    std::filesystem::path samples = cfg.output_path;
    if (const char* dir = std::getenv("MEANDER_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        samples = std::filesystem::path(dir) / samples.filename();
    }
    auto report = samples;
    report.replace_filename(samples.stem().string() + "_report" + samples.extension().string());
    return {samples, report};
}

inline void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
    const auto paths = output_paths(cfg);
    if (paths.samples.has_parent_path()) std::filesystem::create_directories(paths.samples.parent_path());
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << text;
    };
    write(paths.samples, samples_csv(result));
    write(paths.report, reports_csv(result));
}

}  // namespace meander
