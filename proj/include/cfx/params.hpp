#pragma once
// Registry of every Scenario field: dotted path, grouping, admissible range,
// default and a short description. JSON I/O, sweeps, validation and the
// service's schema endpoint all read from this one table.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "scenario.hpp"

namespace cfx {

enum class ParamKind { Number, UsePatternChoice };

struct ParamInfo {
    std::string path;   // relative to the scenario object, e.g. "utilities.cu_reviewed.CFN"
    std::string group;
    ParamKind kind = ParamKind::Number;
    double min = -std::numeric_limits<double>::infinity();
    double max = std::numeric_limits<double>::infinity();
    std::string doc;
    double& (*ref)(Scenario&) = nullptr;  // null for the use-pattern choice

    double get(const Scenario& s) const {
        if (kind == ParamKind::UsePatternChoice) return static_cast<double>(s.use_pattern);
        return ref(const_cast<Scenario&>(s));
    }
    void set(Scenario& s, double v) const {
        if (kind == ParamKind::UsePatternChoice)
            s.use_pattern = static_cast<UsePattern>(static_cast<int>(v));
        else
            ref(s) = v;
    }
    double default_value() const { return get(Scenario{}); }
};

namespace groups {
inline constexpr std::string_view kDomain = "problem domain";
inline constexpr std::string_view kJudgments = "judgments";
inline constexpr std::string_view kInteraction = "interaction";
inline constexpr std::string_view kCombination = "combination";
inline constexpr std::string_view kUtilities = "utilities & discovery";
inline constexpr std::string_view kWorkload = "workload";
} // namespace groups

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline ParamInfo num(std::string path, std::string_view group, double lo, double hi, std::string doc,
                     double& (*ref)(Scenario&)) {
    ParamInfo p;
    p.path = std::move(path);
    p.group = std::string(group);
    p.min = lo;
    p.max = hi;
    p.doc = std::move(doc);
    p.ref = ref;
    return p;
}

#define CFX_REF(expr) [](Scenario& s) -> double& { return expr; }

inline std::vector<ParamInfo> build_registry() {
    using namespace groups;
    std::vector<ParamInfo> r;
    r.push_back(num("prior", kDomain, 0, 1, "Base rate of positive cases (GT=T).", CFX_REF(s.prior)));
    r.push_back(num("obviousness", kDomain, 0, 1,
                    "Separation of mean base signal strength: 0.5 +/- obviousness/2.", CFX_REF(s.obviousness)));
    r.push_back(num("base_strength_std", kDomain, 0, kInf,
                    "Std of case noise on the base signal strength (before truncation).",
                    CFX_REF(s.base_strength_std)));

    r.push_back(num("ai_bss_std", kJudgments, 0, kInf, "Std of AI perception noise on the shared evidence.",
                    CFX_REF(s.ai_bss_std)));
    r.push_back(num("dm_bss_std", kJudgments, 0, kInf, "Std of DM perception noise on the shared evidence.",
                    CFX_REF(s.dm_bss_std)));
    r.push_back(num("algorithm_complementarity", kJudgments, 0, 1,
                    "0: AI and DM read shared evidence identically; 1: independent perception noise.",
                    CFX_REF(s.algorithm_complementarity)));
    r.push_back(num("ai_directional_strength", kJudgments, -1, 1,
                    "Mean shift of the AI strength toward ground truth (AI-private evidence).",
                    CFX_REF(s.ai_directional_strength)));
    r.push_back(num("ai_directional_std", kJudgments, 0, kInf, "Std of the AI directional shift.",
                    CFX_REF(s.ai_directional_std)));
    r.push_back(num("dm_directional_strength", kJudgments, -1, 1,
                    "Mean shift of the DM strength toward ground truth (DM-private evidence).",
                    CFX_REF(s.dm_directional_strength)));
    r.push_back(num("dm_directional_std", kJudgments, 0, kInf, "Std of the DM directional shift.",
                    CFX_REF(s.dm_directional_std)));

    ParamInfo up;
    up.path = "use_pattern";
    up.group = std::string(kInteraction);
    up.kind = ParamKind::UsePatternChoice;
    up.min = 1;
    up.max = 5;
    up.doc = "UP1 accept AI; UP2 triage else DM alone; UP3 triage else review AI explanation; "
             "UP4 triage else DM first then review AI; UP5 DM first, invoke AI when not confident.";
    r.push_back(up);
    r.push_back(num("ai_pos_threshold", kInteraction, -1, 2,
                    "AI strength at or above which an AI positive is confident. Values above 1 disable.",
                    CFX_REF(s.ai_pos_threshold)));
    r.push_back(num("ai_neg_threshold", kInteraction, -1, 2,
                    "AI strength at or below which an AI negative is confident. Negative values disable.",
                    CFX_REF(s.ai_neg_threshold)));
    r.push_back(num("dm_pos_threshold", kInteraction, -1, 2, "DM confidence threshold for positives (UP5).",
                    CFX_REF(s.dm_pos_threshold)));
    r.push_back(num("dm_neg_threshold", kInteraction, -1, 2, "DM confidence threshold for negatives (UP5).",
                    CFX_REF(s.dm_neg_threshold)));

    r.push_back(num("anchor_weight", kCombination, 0, 1,
                    "Weight on the AI strength when the DM sees the AI first (UP3).", CFX_REF(s.anchor_weight)));
    r.push_back(num("directional_discrimination", kCombination, -1, 1,
                    "Mean shift toward ground truth after averaging AI and DM strengths (UP4, UP5).",
                    CFX_REF(s.directional_discrimination)));
    r.push_back(num("directional_discrimination_std", kCombination, 0, kInf,
                    "Std of the directional discrimination shift.", CFX_REF(s.directional_discrimination_std)));
    r.push_back(num("explanatory_boost", kCombination, -1, 1,
                    "Mean shift toward ground truth from reviewing the AI explanation (UP3).",
                    CFX_REF(s.explanatory_boost)));
    r.push_back(num("explanatory_boost_std", kCombination, 0, kInf, "Std of the explanatory boost.",
                    CFX_REF(s.explanatory_boost_std)));

    r.push_back(num("utilities.outcome_u.T.T", kUtilities, -kInf, kInf, "Outcome utility of a true positive.",
                    CFX_REF(s.utilities.outcome_u.at(GroundTruth::T, Decision::T))));
    r.push_back(num("utilities.outcome_u.T.F", kUtilities, -kInf, kInf, "Outcome utility of a false negative.",
                    CFX_REF(s.utilities.outcome_u.at(GroundTruth::T, Decision::F))));
    r.push_back(num("utilities.outcome_u.F.T", kUtilities, -kInf, kInf, "Outcome utility of a false positive.",
                    CFX_REF(s.utilities.outcome_u.at(GroundTruth::F, Decision::T))));
    r.push_back(num("utilities.outcome_u.F.F", kUtilities, -kInf, kInf, "Outcome utility of a true negative.",
                    CFX_REF(s.utilities.outcome_u.at(GroundTruth::F, Decision::F))));

#define CFX_CF_ENTRIES(field, what, lo, hi)                                                          \
    r.push_back(num("utilities." #field ".CTP", kUtilities, lo, hi, what " for CTP.",                 \
                    CFX_REF(s.utilities.field[CfCell::CTP])));                                     \
    r.push_back(num("utilities." #field ".CFN", kUtilities, lo, hi, what " for CFN.",                 \
                    CFX_REF(s.utilities.field[CfCell::CFN])));                                     \
    r.push_back(num("utilities." #field ".CFP", kUtilities, lo, hi, what " for CFP.",                 \
                    CFX_REF(s.utilities.field[CfCell::CFP])));                                     \
    r.push_back(num("utilities." #field ".CTN", kUtilities, lo, hi, what " for CTN.",                 \
                    CFX_REF(s.utilities.field[CfCell::CTN])))

    CFX_CF_ENTRIES(cu_automated, "Counterfactual utility when the AI verdict was accepted unreviewed", -kInf,
                   kInf);
    CFX_CF_ENTRIES(cu_reviewed, "Counterfactual utility when the DM made or reviewed the call", -kInf, kInf);
    CFX_CF_ENTRIES(discovery_d, "Probability the counterfactual is discovered", 0, 1);
#undef CFX_CF_ENTRIES

    r.push_back(num("workload.auto_accept", kWorkload, 0, kInf, "Effort units for an accepted AI verdict.",
                    CFX_REF(s.workload.auto_accept)));
    r.push_back(num("workload.dm_solo", kWorkload, 0, kInf, "Effort units when the DM solves alone.",
                    CFX_REF(s.workload.dm_solo)));
    r.push_back(num("workload.dm_review_ai", kWorkload, 0, kInf,
                    "Effort units when the DM reviews the AI output.", CFX_REF(s.workload.dm_review_ai)));
    r.push_back(num("workload.dm_solo_then_ai", kWorkload, 0, kInf,
                    "Effort units when the DM solves first and then consults the AI.",
                    CFX_REF(s.workload.dm_solo_then_ai)));
    return r;
}

#undef CFX_REF

} // namespace detail

inline const std::vector<ParamInfo>& parameter_registry() {
    static const std::vector<ParamInfo> registry = detail::build_registry();
    return registry;
}

/// Looks up a parameter by path; a leading "scenario." is accepted.
inline const ParamInfo* find_parameter(std::string_view path) {
    constexpr std::string_view prefix = "scenario.";
    if (path.substr(0, prefix.size()) == prefix) path.remove_prefix(prefix.size());
    for (const auto& p : parameter_registry())
        if (p.path == path) return &p;
    return nullptr;
}

struct FieldIssue {
    std::string field_path;
    std::string reason;
};

/// All invariant violations, with paths prefixed by `prefix`.
inline std::vector<FieldIssue> scenario_issues(const Scenario& s, const std::string& prefix = "scenario.") {
    std::vector<FieldIssue> issues;
    for (const auto& p : parameter_registry()) {
        const double v = p.get(s);
        if (p.kind == ParamKind::UsePatternChoice) {
            const int k = static_cast<int>(s.use_pattern);
            if (k < 1 || k > 5) issues.push_back({prefix + p.path, "unknown use pattern"});
            continue;
        }
        if (!std::isfinite(v)) {
            issues.push_back({prefix + p.path, "must be finite"});
        } else if (v < p.min || v > p.max) {
            issues.push_back({prefix + p.path, "must lie in [" + std::to_string(p.min) + ", " +
                                                   std::to_string(p.max) + "], got " + std::to_string(v)});
        }
    }
    if (s.ai_neg_threshold > s.ai_pos_threshold)
        issues.push_back({prefix + "ai_neg_threshold", "must not exceed ai_pos_threshold"});
    if (s.dm_neg_threshold > s.dm_pos_threshold)
        issues.push_back({prefix + "dm_neg_threshold", "must not exceed dm_pos_threshold"});
    return issues;
}

inline void validate_scenario(const Scenario& s, ErrorCode code = ErrorCode::InvalidScenario,
                              const std::string& prefix = "scenario.") {
    const auto issues = scenario_issues(s, prefix);
    if (issues.empty()) return;
    std::string msg;
    for (const auto& i : issues) {
        if (!msg.empty()) msg += "; ";
        msg += i.field_path + ": " + i.reason;
    }
    throw Error(code, msg, issues.front().field_path);
}

} // namespace cfx
