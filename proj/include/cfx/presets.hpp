#pragma once
// Built-in scenario presets sim1..sim6. Each one changes a single aspect of
// its predecessor so the trend comparisons between presets stay meaningful.

#include <string>
#include <vector>

#include "document.hpp"

namespace cfx {

// AI confidence half-width that leaves about 65% of sim2's AI judgments
// confident; pinned so the preset files are stable. Re-derive with
// `cfx calibrate-thresholds --config configs/presets/sim2.json --target-rate 0.65`.
inline constexpr double kSim2HalfWidth = 0.1371;

inline const std::vector<double>& preset_complementarity_values() {
    static const std::vector<double> v = {0.0, 0.25, 0.5, 0.75, 1.0};
    return v;
}

namespace detail {

inline ScenarioDocument preset_doc(std::string name, std::string description, Scenario s) {
    ScenarioDocument d;
    d.name = std::move(name);
    d.description = std::move(description);
    d.scenario = s;
    d.sweep = SweepSpec{"scenario.algorithm_complementarity", preset_complementarity_values(), SeedPolicy::Common};
    d.run = RunSpec{500000, 0};
    return d;
}

inline std::vector<ScenarioDocument> build_presets() {
    std::vector<ScenarioDocument> out;

    Scenario s1;
    s1.use_pattern = UsePattern::UP1;
    out.push_back(preset_doc("sim1", "AI decisions accepted automatically (UP1); calibrated defaults.", s1));

    Scenario s2 = s1;
    s2.use_pattern = UsePattern::UP2;
    s2.ai_pos_threshold = 0.5 + kSim2HalfWidth;
    s2.ai_neg_threshold = 0.5 - kSim2HalfWidth;
    out.push_back(preset_doc("sim2",
                             "AI triage (UP2): confident AI decisions accepted, the rest decided by the DM alone. "
                             "Thresholds leave about 65% of AI judgments confident.",
                             s2));

    Scenario s3 = s2;
    s3.ai_neg_threshold = -1.0;
    out.push_back(preset_doc("sim3", "As sim2, but confident AI negatives are never auto-accepted.", s3));

    Scenario s4 = s3;
    s4.use_pattern = UsePattern::UP3;
    out.push_back(preset_doc("sim4", "As sim3, but non-triaged cases are decided by the DM after seeing the AI (UP3).",
                             s4));

    Scenario s5 = s4;
    s5.utilities.cu_reviewed[CfCell::CFN] = -15.0;
    out.push_back(preset_doc("sim5", "As sim4, with the reviewed-case CFN counterfactual utility halved to -15.", s5));

    Scenario s6 = s5;
    s6.use_pattern = UsePattern::UP5;
    s6.dm_pos_threshold = 0.5 + kSim2HalfWidth;
    s6.dm_neg_threshold = 0.5 - kSim2HalfWidth;
    out.push_back(preset_doc("sim6",
                             "As sim5, but the DM judges first and consults the AI only when not confident (UP5).",
                             s6));
    return out;
}

} // namespace detail

inline const std::vector<ScenarioDocument>& presets() {
    static const std::vector<ScenarioDocument> all = detail::build_presets();
    return all;
}

inline const ScenarioDocument* find_preset(std::string_view name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

} // namespace cfx
