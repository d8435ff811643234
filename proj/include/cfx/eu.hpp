#pragma once
// Closed-form counterfactual expected utility.
//
//   usage_eu   = outcome_eu + counter_eu
//   outcome_eu = sum over cells of p * U(gt, aided)
//   counter_eu = sum over counterfactual cells of p * d * CU
//   unaided_eu = sum over cells of p * U(gt, unaided)

#include <cmath>
#include <optional>

#include "matrix.hpp"
#include "utility.hpp"

namespace cfx {

struct EUReport {
    double outcome_eu = 0.0;
    double counter_eu = 0.0;
    double usage_eu = 0.0;
    double unaided_eu = 0.0;

    ConfusionMatrix aided_cm;
    ConfusionMatrix unaided_cm;

    // Empty when the ground-truth row has no mass.
    std::optional<double> aided_sensitivity;
    std::optional<double> aided_specificity;
    std::optional<double> unaided_sensitivity;
    std::optional<double> unaided_specificity;

    // Unaided EU is the zero point. Counter EU has no unaided counterpart,
    // so its relative value equals counter_eu and
    // relative_usage_eu = relative_outcome_eu + relative_counter_eu.
    double relative_outcome_eu = 0.0;
    double relative_counter_eu = 0.0;
    double relative_usage_eu = 0.0;

    bool operator==(const EUReport&) const = default;
};

inline double outcome_eu(const CounterfactualMatrix& m, const UtilityModel& u) {
    require_valid(m);
    double s = 0.0;
    for (CellKind c : kAllCells) s += m[c] * u.outcome(c);
    return s;
}

inline double counter_eu(const CounterfactualMatrix& m, const UtilityModel& u, CuMode mode) {
    require_valid(m);
    double s = 0.0;
    for (CfCell c : kAllCfCells) s += m[cell_of(c)] * u.discovery_d[c] * u.cu(mode)[c];
    return s;
}

inline double usage_eu(const CounterfactualMatrix& m, const UtilityModel& u, CuMode mode) {
    return outcome_eu(m, u) + counter_eu(m, u, mode);
}

inline double unaided_eu(const CounterfactualMatrix& m, const UtilityModel& u) {
    const auto parts = partition(m);
    double s = 0.0;
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision d : {Decision::T, Decision::F})
            s += parts.unaided.at(g, d) * u.outcome_u.at(g, d);
    return s;
}

namespace detail {

template <typename F>
std::optional<double> defined_or_empty(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DegenerateMarginal) return std::nullopt;
        throw;
    }
}

inline void fill_accuracy(EUReport& r) {
    r.aided_sensitivity = defined_or_empty([&] { return sensitivity(r.aided_cm); });
    r.aided_specificity = defined_or_empty([&] { return specificity(r.aided_cm); });
    r.unaided_sensitivity = defined_or_empty([&] { return sensitivity(r.unaided_cm); });
    r.unaided_specificity = defined_or_empty([&] { return specificity(r.unaided_cm); });
}

inline void fill_relative(EUReport& r) {
    r.usage_eu = r.outcome_eu + r.counter_eu;
    r.relative_outcome_eu = r.outcome_eu - r.unaided_eu;
    r.relative_counter_eu = r.counter_eu;
    r.relative_usage_eu = r.usage_eu - r.unaided_eu;
}

} // namespace detail

inline EUReport build_report(const CounterfactualMatrix& m, const UtilityModel& u, CuMode mode) {
    EUReport r;
    const auto parts = partition(m);
    r.aided_cm = parts.aided;
    r.unaided_cm = parts.unaided;
    r.outcome_eu = outcome_eu(m, u);
    r.counter_eu = counter_eu(m, u, mode);
    r.unaided_eu = unaided_eu(m, u);
    detail::fill_relative(r);
    detail::fill_accuracy(r);
    return r;
}

struct CellContribution {
    CfCell cell;
    double probability;
    double discovery;
    double utility;
    double contribution;  // probability * discovery * utility

    bool operator==(const CellContribution&) const = default;
};

struct DiscoveryAnalysis {
    std::array<CellContribution, kCfCellCount> cells{};
    double counter_eu = 0.0;
    // At least one cell can actually be discovered (p > 0 and d > 0) and every
    // such cell carries a negative counterfactual utility.
    bool one_sided_negative = false;
    // Cell with the largest |contribution|; first in cell order on ties.
    CfCell dominant_cell = CfCell::CTP;

    bool operator==(const DiscoveryAnalysis&) const = default;
};

inline DiscoveryAnalysis discovery_analysis(const CounterfactualMatrix& m, const UtilityModel& u,
                                            CuMode mode) {
    require_valid(m);
    DiscoveryAnalysis a;
    bool any_discoverable = false;
    bool all_negative = true;
    double largest = -1.0;
    for (CfCell c : kAllCfCells) {
        auto& entry = a.cells[index(c)];
        entry.cell = c;
        entry.probability = m[cell_of(c)];
        entry.discovery = u.discovery_d[c];
        entry.utility = u.cu(mode)[c];
        entry.contribution = entry.probability * entry.discovery * entry.utility;
        a.counter_eu += entry.contribution;
        if (entry.probability > 0.0 && entry.discovery > 0.0) {
            any_discoverable = true;
            if (!(entry.utility < 0.0)) all_negative = false;
        }
        if (std::abs(entry.contribution) > largest) {
            largest = std::abs(entry.contribution);
            a.dominant_cell = c;
        }
    }
    a.one_sided_negative = any_discoverable && all_negative;
    return a;
}

/// Probability that at least one of two judges with independent errors is
/// right.
inline double independent_union_accuracy(double a1, double a2) {
    if (!(a1 >= 0.0 && a1 <= 1.0) || !(a2 >= 0.0 && a2 <= 1.0))
        throw Error(ErrorCode::ValidationError, "accuracies must lie in [0,1]");
    return 1.0 - (1.0 - a1) * (1.0 - a2);
}

} // namespace cfx
