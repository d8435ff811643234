#pragma once

#include <array>
#include <cmath>
#include <string>

#include "cells.hpp"
#include "error.hpp"

namespace cfx {

/// Which counterfactual-utility matrix applies: decisions that were an
/// unreviewed acceptance of the AI, or decisions the DM made or reviewed.
enum class CuMode : unsigned char { Automated, Reviewed };

inline std::string_view name(CuMode m) { return m == CuMode::Automated ? "automated" : "reviewed"; }

/// Values attached to the four counterfactual cells only. Non-counterfactual
/// cells have no entry at all.
class CfValues {
public:
    CfValues() = default;
    CfValues(double ctp, double cfn, double cfp, double ctn) : v_{ctp, cfn, cfp, ctn} {}

    double operator[](CfCell c) const { return v_[index(c)]; }
    double& operator[](CfCell c) { return v_[index(c)]; }

    bool operator==(const CfValues&) const = default;

private:
    std::array<double, kCfCellCount> v_{};
};

/// U(gt, verdict). The same table scores aided and unaided verdicts.
class OutcomeUtilities {
public:
    OutcomeUtilities() = default;
    OutcomeUtilities(double tp, double fn, double fp, double tn) {
        at(GroundTruth::T, Decision::T) = tp;
        at(GroundTruth::T, Decision::F) = fn;
        at(GroundTruth::F, Decision::T) = fp;
        at(GroundTruth::F, Decision::F) = tn;
    }

    double at(GroundTruth g, Decision d) const { return u_[index(g)][index(d)]; }
    double& at(GroundTruth g, Decision d) { return u_[index(g)][index(d)]; }

    bool operator==(const OutcomeUtilities&) const = default;

private:
    std::array<std::array<double, 2>, 2> u_{};
};

struct UtilityModel {
    OutcomeUtilities outcome_u;
    CfValues cu_automated;
    CfValues cu_reviewed;
    CfValues discovery_d;

    const CfValues& cu(CuMode mode) const {
        return mode == CuMode::Automated ? cu_automated : cu_reviewed;
    }

    /// Outcome utility of a cell: depends only on (gt, aided verdict).
    double outcome(CellKind c) const { return outcome_u.at(ground_truth_of(c), aided_of(c)); }
    double unaided_outcome(CellKind c) const { return outcome_u.at(ground_truth_of(c), unaided_of(c)); }

    /// Expected counterfactual utility d·CU of one case in cell `c`; zero
    /// for agreement cells.
    double counter_value(CellKind c, CuMode mode) const {
        const auto cf = counterfactual_of(c);
        if (!cf) return 0.0;
        return discovery_d[*cf] * cu(mode)[*cf];
    }

    bool operator==(const UtilityModel&) const = default;
};

inline void validate_utilities(const UtilityModel& u, const std::string& prefix = "utilities") {
    for (GroundTruth g : {GroundTruth::T, GroundTruth::F})
        for (Decision d : {Decision::T, Decision::F})
            if (!std::isfinite(u.outcome_u.at(g, d)))
                throw Error(ErrorCode::ValidationError, "outcome utility must be finite",
                            prefix + ".outcome_u." + std::string(name(g)) + "." + std::string(name(d)));
    for (CfCell c : kAllCfCells) {
        const std::string cell(name(c));
        if (!std::isfinite(u.cu_automated[c]))
            throw Error(ErrorCode::ValidationError, "must be finite", prefix + ".cu_automated." + cell);
        if (!std::isfinite(u.cu_reviewed[c]))
            throw Error(ErrorCode::ValidationError, "must be finite", prefix + ".cu_reviewed." + cell);
        const double d = u.discovery_d[c];
        if (!(d >= 0.0 && d <= 1.0))
            throw Error(ErrorCode::ValidationError, "discovery probability must lie in [0,1]",
                        prefix + ".discovery_d." + cell);
    }
}

/// Utilities, counterfactual utilities and discovery probabilities of the
/// running cancer-screening illustration.
inline UtilityModel screening_utilities() {
    UtilityModel u;
    u.outcome_u = OutcomeUtilities(2.0, -10.0, -1.0, 1.0);
    u.cu_automated = CfValues(5.0, -30.0, -2.0, 5.0);
    u.cu_reviewed = u.cu_automated;
    u.discovery_d = CfValues(0.01, 0.8, 0.1, 0.01);
    return u;
}

} // namespace cfx
