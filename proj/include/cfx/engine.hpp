#pragma once
// Monte Carlo harness: scenario runs, parameter sweeps, scenario comparison
// and confidence-threshold calibration.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "params.hpp"
#include "tally.hpp"

namespace cfx {

inline constexpr std::size_t kMaxSweepValues = 32;
inline constexpr std::size_t kMaxCompareScenarios = 5;

struct RunOptions {
    unsigned workers = 0;             // 0: hardware concurrency
    std::size_t keep_episodes = 0;    // retain the first N episodes for inspection
    bool sample_discovery = false;    // draw the discovered flag per episode
};

struct ScenarioResult {
    std::uint64_t n_cases = 0;
    std::uint64_t seed = 0;
    CounterfactualMatrix estimated_matrix;
    EUReport report;
    StandardErrors standard_errors;
    double mean_workload = 0.0;
    std::array<std::uint64_t, kBranchCount> branch_counts{};
    std::array<std::uint64_t, kCellCount> cell_counts{};
    std::optional<std::array<std::uint64_t, kCellCount>> discovered_counts;
    std::vector<Episode> episodes;

    bool operator==(const ScenarioResult&) const = default;
};

namespace detail {

inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline constexpr std::uint64_t kChunkSize = 16384;

/// Applies `per_case(rng, case_index, local_state)` to every case index in
/// [0, n) across `workers` threads, one local state per chunk; returns the
/// chunk states in chunk order.
template <typename State, typename Fn>
std::vector<State> for_each_case(std::uint64_t n, std::uint64_t seed, unsigned workers, Fn per_case) {
    const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<State> states(chunks);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
            const std::uint64_t end = std::min(n, (c + 1) * kChunkSize);
            for (std::uint64_t i = c * kChunkSize; i < end; ++i) {
                CaseRng rng(seed, i);
                per_case(rng, i, states[c]);
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    return states;
}

} // namespace detail

inline ScenarioResult run_scenario(const Scenario& s, std::uint64_t n_cases, std::uint64_t seed,
                                   const RunOptions& opts = {}) {
    if (n_cases == 0) throw Error(ErrorCode::InvalidScenario, "n_cases must be at least 1", "run.n_cases");
    validate_scenario(s);

    const auto partials = detail::for_each_case<EpisodeTally>(
        n_cases, seed, detail::resolve_workers(opts.workers),
        [&](CaseRng& rng, std::uint64_t, EpisodeTally& t) { t.add(simulate_case(s, rng, opts.sample_discovery)); });
    EpisodeTally total;
    for (const auto& p : partials) total.merge(p);

    ScenarioResult r;
    r.n_cases = n_cases;
    r.seed = seed;
    r.estimated_matrix = estimate_matrix(total);
    r.report = eu_from_tally(total, s.utilities);
    r.standard_errors = standard_errors(total, s.utilities);
    r.branch_counts = total.branch_counts;
    r.cell_counts = total.cell_counts();
    double work = 0.0;
    for (Branch b : kAllBranches) work += static_cast<double>(total.branch_counts[index(b)]) * s.workload[b];
    r.mean_workload = work / static_cast<double>(n_cases);
    if (opts.sample_discovery) r.discovered_counts = total.discovered;

    const std::uint64_t keep = std::min<std::uint64_t>(opts.keep_episodes, n_cases);
    r.episodes.reserve(keep);
    for (std::uint64_t i = 0; i < keep; ++i) {
        CaseRng rng(seed, i);
        r.episodes.push_back(simulate_case(s, rng, opts.sample_discovery));
    }
    return r;
}

enum class SeedPolicy { Common, PerPoint };

inline std::string_view name(SeedPolicy p) { return p == SeedPolicy::Common ? "common" : "per_point"; }

inline std::optional<SeedPolicy> parse_seed_policy(std::string_view s) {
    if (s == "common") return SeedPolicy::Common;
    if (s == "per_point") return SeedPolicy::PerPoint;
    return std::nullopt;
}

/// Seed for point `i`: the master seed itself under the common policy.
inline std::uint64_t point_seed(std::uint64_t seed, SeedPolicy policy, std::size_t i) {
    return policy == SeedPolicy::Common ? seed : mix64(seed + i);
}

struct SweepResult {
    std::string param_path;  // canonical "scenario.<path>"
    std::vector<double> values;
    SeedPolicy seed_policy = SeedPolicy::Common;
    std::vector<ScenarioResult> points;

    bool operator==(const SweepResult&) const = default;
};

inline const ParamInfo& require_numeric_parameter(std::string_view path) {
    const ParamInfo* p = find_parameter(path);
    if (!p || p->kind != ParamKind::Number)
        throw Error(ErrorCode::UnknownParameter, "not a numeric scenario parameter: " + std::string(path),
                    "sweep.param_path");
    return *p;
}

inline SweepResult sweep(const Scenario& base, std::string_view param_path, std::span<const double> values,
                         std::uint64_t n_cases, std::uint64_t seed, SeedPolicy policy = SeedPolicy::Common,
                         const RunOptions& opts = {}) {
    const ParamInfo& param = require_numeric_parameter(param_path);
    if (values.empty() || values.size() > kMaxSweepValues)
        throw Error(ErrorCode::ValidationError,
                    "a sweep needs between 1 and " + std::to_string(kMaxSweepValues) + " values", "sweep.values");
    SweepResult out;
    out.param_path = "scenario." + param.path;
    out.values.assign(values.begin(), values.end());
    out.seed_policy = policy;
    for (std::size_t i = 0; i < values.size(); ++i) {
        Scenario s = base;
        param.set(s, values[i]);
        out.points.push_back(run_scenario(s, n_cases, point_seed(seed, policy, i), opts));
    }
    return out;
}

inline std::vector<ScenarioResult> compare_scenarios(std::span<const Scenario> scenarios, std::uint64_t n_cases,
                                                     std::uint64_t seed, const RunOptions& opts = {}) {
    if (scenarios.size() > kMaxCompareScenarios)
        throw Error(ErrorCode::TooManyScenarios,
                    "at most " + std::to_string(kMaxCompareScenarios) + " scenarios can be compared");
    if (scenarios.empty()) throw Error(ErrorCode::ValidationError, "no scenarios to compare");
    std::vector<ScenarioResult> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(run_scenario(s, n_cases, seed, opts));
    return out;
}

enum class Judge { Ai, Dm };

struct ThresholdCalibration {
    double pos_threshold = 0.5;
    double neg_threshold = 0.5;
    double half_width = 0.0;     // thresholds are 0.5 +/- half_width
    double achieved_rate = 0.0;  // confident fraction on the calibration sample
};

inline std::vector<double> sample_final_strengths(const Scenario& s, Judge judge, std::uint64_t n,
                                                  std::uint64_t seed, unsigned workers = 0) {
    validate_scenario(s);
    using Chunk = std::vector<double>;
    const auto chunks = detail::for_each_case<Chunk>(n, seed, detail::resolve_workers(workers),
                                                     [&](CaseRng& rng, std::uint64_t, Chunk& out) {
                                                         const auto f = sample_strengths(s, rng);
                                                         out.push_back(judge == Judge::Ai ? f.ai_fs : f.dm_fs);
                                                     });
    std::vector<double> all;
    all.reserve(n);
    for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
    return all;
}

inline double confident_fraction(std::span<const double> strengths, double pos, double neg) {
    if (strengths.empty()) return 0.0;
    std::uint64_t k = 0;
    for (double x : strengths)
        if (confidence_class(x, pos, neg) != Confidence::Uncertain) ++k;
    return static_cast<double>(k) / static_cast<double>(strengths.size());
}

/// Symmetric thresholds 0.5 +/- h such that `target_rate` of the judge's final
/// strengths are confident, found by bisection over the sorted sample of
/// |strength - 0.5|.
inline ThresholdCalibration calibrate_thresholds(const Scenario& s, double target_rate, Judge judge = Judge::Ai,
                                                 std::uint64_t n = 100000, std::uint64_t seed = 0,
                                                 unsigned workers = 0) {
    if (!(target_rate > 0.0 && target_rate <= 1.0))
        throw Error(ErrorCode::ValidationError, "target rate must lie in (0,1]", "target_rate");
    if (n == 0) throw Error(ErrorCode::ValidationError, "calibration sample must be nonempty", "n");
    auto strengths = sample_final_strengths(s, judge, n, seed, workers);
    std::vector<double> distance(strengths.size());
    std::transform(strengths.begin(), strengths.end(), distance.begin(),
                   [](double x) { return std::abs(x - 0.5); });
    std::sort(distance.begin(), distance.end());

    // Smallest index whose distance, used as half-width, leaves at most
    // `target_rate` of the sample confident; step back by one to reach it.
    const auto rate_at = [&](std::size_t i) {
        const double h = distance[i];
        const auto first = std::lower_bound(distance.begin(), distance.end(), h);
        return static_cast<double>(distance.end() - first) / static_cast<double>(distance.size());
    };
    std::size_t lo = 0, hi = distance.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (rate_at(mid) > target_rate) lo = mid + 1;
        else hi = mid;
    }
    if (lo > 0 && std::abs(rate_at(lo - 1) - target_rate) < std::abs(rate_at(lo) - target_rate)) --lo;

    ThresholdCalibration c;
    c.half_width = distance[lo];
    c.pos_threshold = 0.5 + c.half_width;
    c.neg_threshold = 0.5 - c.half_width;
    c.achieved_rate = confident_fraction(strengths, c.pos_threshold, c.neg_threshold);
    return c;
}

} // namespace cfx
