#pragma once
// Per-case signal and judgment model.
//
// A case has a ground truth and a base signal strength (BSS) on [0,1] that
// both judges can read. Each judge perceives the BSS with its own noise; the
// two standardized noises are correlated with rho = 1 - complementarity so
// the individual accuracies do not move with complementarity. Private
// evidence then shifts each judge's strength toward ground truth. The use
// pattern decides how the two final strengths become the aided verdict; the
// unaided verdict always comes from the DM's own final strength.

#include <algorithm>
#include <cmath>
#include <optional>

#include "cells.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace cfx {

inline double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

/// Verdict threshold: "T" iff strength >= 0.5.
inline constexpr double kVerdictThreshold = 0.5;

inline Decision decide(double strength) { return to_decision(strength >= kVerdictThreshold); }

enum class Confidence { ConfidentPositive, ConfidentNegative, Uncertain };

inline Confidence confidence_class(double strength, double pos_threshold, double neg_threshold) {
    if (strength >= pos_threshold) return Confidence::ConfidentPositive;
    if (strength <= neg_threshold) return Confidence::ConfidentNegative;
    return Confidence::Uncertain;
}

inline GroundTruth sample_ground_truth(double prior, CaseRng& rng) {
    return rng.uniform() < prior ? GroundTruth::T : GroundTruth::F;
}

inline double mean_bss(GroundTruth gt, double obviousness) {
    return is_positive(gt) ? 0.5 + obviousness / 2 : 0.5 - obviousness / 2;
}

inline double sample_bss(GroundTruth gt, double obviousness, double base_strength_std, CaseRng& rng) {
    return clamp_unit(mean_bss(gt, obviousness) + base_strength_std * rng.normal());
}

struct Perceptions {
    double ai = 0.0;
    double dm = 0.0;
    double z_ai = 0.0;  // standardized noises, before scaling and clamping
    double z_dm = 0.0;
};

inline Perceptions sample_perceptions(double bss, double ai_bss_std, double dm_bss_std,
                                      double complementarity, CaseRng& rng) {
    const double rho = 1.0 - complementarity;
    Perceptions p;
    p.z_ai = rng.normal();
    const double z_ind = rng.normal();
    p.z_dm = rho * p.z_ai + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * z_ind;
    p.ai = clamp_unit(bss + ai_bss_std * p.z_ai);
    p.dm = clamp_unit(bss + dm_bss_std * p.z_dm);
    return p;
}

/// Shift toward ground truth by a Normal(mean, std) draw. A negative draw
/// moves away from ground truth.
inline double shift_toward(double strength, GroundTruth gt, double mean, double std, CaseRng& rng) {
    const double shift = mean + std * rng.normal();
    return clamp_unit(is_positive(gt) ? strength + shift : strength - shift);
}

inline double apply_directional(double perceived, GroundTruth gt, double strength, double std, CaseRng& rng) {
    return shift_toward(perceived, gt, strength, std, rng);
}

/// Weighted combination of the two judges; `ai_weight` on the AI.
inline double anchored_combination(double ai_weight, double ai_fs, double dm_fs) {
    return ai_weight * ai_fs + (1.0 - ai_weight) * dm_fs;
}

struct UseOutcome {
    Decision aided = Decision::F;
    Branch branch = Branch::DmSolo;
    double workload = 0.0;
};

inline UseOutcome run_use_pattern(const Scenario& s, GroundTruth gt, double ai_fs, double dm_fs, CaseRng& rng) {
    UseOutcome out;
    auto settle = [&](Decision d, Branch b) {
        out.aided = d;
        out.branch = b;
        out.workload = s.workload[b];
        return out;
    };
    auto triage = [&]() -> std::optional<Decision> {
        switch (confidence_class(ai_fs, s.ai_pos_threshold, s.ai_neg_threshold)) {
            case Confidence::ConfidentPositive: return Decision::T;
            case Confidence::ConfidentNegative: return Decision::F;
            case Confidence::Uncertain: return std::nullopt;
        }
        return std::nullopt;
    };
    auto discriminate = [&] {
        const double combined = anchored_combination(0.5, ai_fs, dm_fs);
        return decide(shift_toward(combined, gt, s.directional_discrimination,
                                   s.directional_discrimination_std, rng));
    };

    switch (s.use_pattern) {
        case UsePattern::UP1:
            return settle(decide(ai_fs), Branch::AutoAccept);
        case UsePattern::UP2:
            if (auto d = triage()) return settle(*d, Branch::AutoAccept);
            return settle(decide(dm_fs), Branch::DmSolo);
        case UsePattern::UP3: {
            if (auto d = triage()) return settle(*d, Branch::AutoAccept);
            const double anchored = anchored_combination(s.anchor_weight, ai_fs, dm_fs);
            const double boosted =
                shift_toward(anchored, gt, s.explanatory_boost, s.explanatory_boost_std, rng);
            return settle(decide(boosted), Branch::DmReviewAi);
        }
        case UsePattern::UP4:
            if (auto d = triage()) return settle(*d, Branch::AutoAccept);
            return settle(discriminate(), Branch::DmReviewAi);
        case UsePattern::UP5:
            if (confidence_class(dm_fs, s.dm_pos_threshold, s.dm_neg_threshold) != Confidence::Uncertain)
                return settle(decide(dm_fs), Branch::DmSolo);
            return settle(discriminate(), Branch::DmSoloThenAi);
    }
    throw Error(ErrorCode::UnknownUsePattern,
                "unknown use pattern " + std::to_string(static_cast<int>(s.use_pattern)), "scenario.use_pattern");
}

struct Episode {
    GroundTruth gt = GroundTruth::F;
    double bss = 0.0;
    double ai_fs = 0.0;
    double dm_fs = 0.0;
    Decision ai_decision = Decision::F;
    Decision unaided_decision = Decision::F;
    Decision aided_decision = Decision::F;
    Branch branch = Branch::DmSolo;
    CellKind cell = CellKind::NTN;
    double workload = 0.0;
    std::optional<bool> discovered;

    bool operator==(const Episode&) const = default;
};

struct FinalStrengths {
    GroundTruth gt;
    double bss;
    double ai_fs;
    double dm_fs;
};

/// Everything up to the two final strengths. Draw order is fixed so the
/// unaided arm never depends on use-pattern parameters.
inline FinalStrengths sample_strengths(const Scenario& s, CaseRng& rng) {
    FinalStrengths f;
    f.gt = sample_ground_truth(s.prior, rng);
    f.bss = sample_bss(f.gt, s.obviousness, s.base_strength_std, rng);
    const auto seen = sample_perceptions(f.bss, s.ai_bss_std, s.dm_bss_std, s.algorithm_complementarity, rng);
    f.ai_fs = apply_directional(seen.ai, f.gt, s.ai_directional_strength, s.ai_directional_std, rng);
    f.dm_fs = apply_directional(seen.dm, f.gt, s.dm_directional_strength, s.dm_directional_std, rng);
    return f;
}

inline Episode simulate_case(const Scenario& s, CaseRng& rng, bool sample_discovery = false) {
    const auto f = sample_strengths(s, rng);
    Episode e;
    e.gt = f.gt;
    e.bss = f.bss;
    e.ai_fs = f.ai_fs;
    e.dm_fs = f.dm_fs;
    e.ai_decision = decide(f.ai_fs);
    e.unaided_decision = decide(f.dm_fs);
    const auto use = run_use_pattern(s, f.gt, f.ai_fs, f.dm_fs, rng);
    e.aided_decision = use.aided;
    e.branch = use.branch;
    e.workload = use.workload;
    e.cell = classify_cell(e.gt, e.aided_decision, e.unaided_decision);
    if (sample_discovery) {
        if (const auto cf = counterfactual_of(e.cell))
            e.discovered = rng.uniform() < s.utilities.discovery_d[*cf];
        else
            e.discovered = false;
    }
    return e;
}

} // namespace cfx
