#pragma once
// Episode aggregation. Every per-case quantity that enters an EU is a
// function of (cell, CU mode), so integer counts over those 16 classes carry
// everything needed for the estimates and their standard errors, and merging
// partial tallies is exact in any order.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

#include "eu.hpp"
#include "model.hpp"

namespace cfx {

struct EpisodeTally {
    std::array<std::array<std::uint64_t, 2>, kCellCount> counts{};  // [cell][CuMode]
    std::array<std::uint64_t, kBranchCount> branch_counts{};
    std::array<std::uint64_t, kCellCount> discovered{};
    std::uint64_t n = 0;

    void add(const Episode& e) {
        ++counts[index(e.cell)][static_cast<std::size_t>(cu_mode_of(e.branch))];
        ++branch_counts[index(e.branch)];
        if (e.discovered && *e.discovered) ++discovered[index(e.cell)];
        ++n;
    }

    void merge(const EpisodeTally& o) {
        for (std::size_t c = 0; c < kCellCount; ++c) {
            counts[c][0] += o.counts[c][0];
            counts[c][1] += o.counts[c][1];
            discovered[c] += o.discovered[c];
        }
        for (std::size_t b = 0; b < kBranchCount; ++b) branch_counts[b] += o.branch_counts[b];
        n += o.n;
    }

    std::uint64_t cell_count(CellKind c) const { return counts[index(c)][0] + counts[index(c)][1]; }

    std::array<std::uint64_t, kCellCount> cell_counts() const {
        std::array<std::uint64_t, kCellCount> out{};
        for (CellKind c : kAllCells) out[index(c)] = cell_count(c);
        return out;
    }

    bool operator==(const EpisodeTally&) const = default;
};

inline EpisodeTally tally(std::span<const Episode> episodes) {
    EpisodeTally t;
    for (const auto& e : episodes) t.add(e);
    return t;
}

inline void require_nonempty(const EpisodeTally& t) {
    if (t.n == 0) throw Error(ErrorCode::EmptyEpisodeSet, "no episodes");
}

inline CounterfactualMatrix estimate_matrix(const EpisodeTally& t) {
    require_nonempty(t);
    CounterfactualMatrix m;
    const double n = static_cast<double>(t.n);
    for (CellKind c : kAllCells) m[c] = static_cast<double>(t.cell_count(c)) / n;
    return m;
}

inline CounterfactualMatrix estimate_matrix(std::span<const Episode> episodes) {
    return estimate_matrix(tally(episodes));
}

/// Sample means over the tally. Counter EU uses d·CU in expectation, with
/// the CU matrix chosen by the branch that produced each case.
inline EUReport eu_from_tally(const EpisodeTally& t, const UtilityModel& u) {
    require_nonempty(t);
    const double n = static_cast<double>(t.n);
    // Confusion counts are summed as integers first, so equal marginal counts
    // give bit-equal estimates however they split across cells.
    std::array<std::array<std::uint64_t, 2>, 2> aided{}, unaided{};
    for (CellKind c : kAllCells) {
        const auto g = index(ground_truth_of(c));
        aided[g][index(aided_of(c))] += t.cell_count(c);
        unaided[g][index(unaided_of(c))] += t.cell_count(c);
    }
    EUReport r;
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision d : {Decision::T, Decision::F}) {
            const double pa = static_cast<double>(aided[index(g)][index(d)]) / n;
            const double pu = static_cast<double>(unaided[index(g)][index(d)]) / n;
            r.aided_cm.at(g, d) = pa;
            r.unaided_cm.at(g, d) = pu;
            r.outcome_eu += pa * u.outcome_u.at(g, d);
            r.unaided_eu += pu * u.outcome_u.at(g, d);
        }
    for (CellKind c : kAllCells)
        for (CuMode mode : {CuMode::Automated, CuMode::Reviewed}) {
            const double k = static_cast<double>(t.counts[index(c)][static_cast<std::size_t>(mode)]);
            r.counter_eu += k / n * u.counter_value(c, mode);
        }
    detail::fill_relative(r);
    detail::fill_accuracy(r);
    return r;
}

inline EUReport eu_from_episodes(std::span<const Episode> episodes, const UtilityModel& u) {
    return eu_from_tally(tally(episodes), u);
}

/// Standard errors of the sample-mean estimates (CLT over independent cases).
/// Relative quantities are paired per case, so their errors reflect the
/// correlation between the aided and unaided arms.
struct StandardErrors {
    double outcome_eu = 0.0;
    double counter_eu = 0.0;
    double usage_eu = 0.0;
    double unaided_eu = 0.0;
    double relative_outcome_eu = 0.0;
    double relative_usage_eu = 0.0;

    bool operator==(const StandardErrors&) const = default;
};

inline StandardErrors standard_errors(const EpisodeTally& t, const UtilityModel& u) {
    require_nonempty(t);
    const double n = static_cast<double>(t.n);
    // Accumulate first and second moments of each per-case quantity.
    std::array<double, 6> m1{}, m2{};
    for (CellKind c : kAllCells) {
        for (CuMode mode : {CuMode::Automated, CuMode::Reviewed}) {
            const double w = static_cast<double>(t.counts[index(c)][static_cast<std::size_t>(mode)]) / n;
            if (w == 0.0) continue;
            const double outcome = u.outcome(c);
            const double counter = u.counter_value(c, mode);
            const double unaided = u.unaided_outcome(c);
            const std::array<double, 6> x = {outcome, counter, outcome + counter, unaided, outcome - unaided,
                                             outcome + counter - unaided};
            for (std::size_t i = 0; i < x.size(); ++i) {
                m1[i] += w * x[i];
                m2[i] += w * x[i] * x[i];
            }
        }
    }
    auto se = [&](std::size_t i) { return std::sqrt(std::max(0.0, m2[i] - m1[i] * m1[i]) / n); };
    return {se(0), se(1), se(2), se(3), se(4), se(5)};
}

} // namespace cfx
