#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"
#include "utility.hpp"

namespace cfx {

enum class UsePattern : unsigned char { UP1 = 1, UP2, UP3, UP4, UP5 };

inline std::string_view name(UsePattern p) {
    switch (p) {
        case UsePattern::UP1: return "UP1";
        case UsePattern::UP2: return "UP2";
        case UsePattern::UP3: return "UP3";
        case UsePattern::UP4: return "UP4";
        case UsePattern::UP5: return "UP5";
    }
    return "?";
}

inline std::optional<UsePattern> parse_use_pattern(std::string_view s) {
    for (int i = 1; i <= 5; ++i) {
        const auto p = static_cast<UsePattern>(i);
        if (name(p) == s) return p;
    }
    return std::nullopt;
}

/// How a case's final verdict was produced.
enum class Branch : unsigned char { AutoAccept, DmSolo, DmReviewAi, DmSoloThenAi };

inline constexpr std::size_t kBranchCount = 4;
inline constexpr std::array<Branch, kBranchCount> kAllBranches = {
    Branch::AutoAccept, Branch::DmSolo, Branch::DmReviewAi, Branch::DmSoloThenAi};

constexpr std::size_t index(Branch b) { return static_cast<std::size_t>(b); }

inline std::string_view name(Branch b) {
    switch (b) {
        case Branch::AutoAccept: return "auto_accept";
        case Branch::DmSolo: return "dm_solo";
        case Branch::DmReviewAi: return "dm_review_ai";
        case Branch::DmSoloThenAi: return "dm_solo_then_ai";
    }
    return "?";
}

inline std::optional<Branch> parse_branch(std::string_view s) {
    for (Branch b : kAllBranches)
        if (name(b) == s) return b;
    return std::nullopt;
}

/// Unreviewed acceptance of the AI is scored with the automated CU matrix;
/// anything the DM touched uses the reviewed one.
constexpr CuMode cu_mode_of(Branch b) {
    return b == Branch::AutoAccept ? CuMode::Automated : CuMode::Reviewed;
}

/// Effort units per branch. Reported only; never part of any EU.
struct Workload {
    double auto_accept = 0.1;
    double dm_solo = 1.0;
    double dm_review_ai = 1.2;
    double dm_solo_then_ai = 1.5;

    double operator[](Branch b) const {
        switch (b) {
            case Branch::AutoAccept: return auto_accept;
            case Branch::DmSolo: return dm_solo;
            case Branch::DmReviewAi: return dm_review_ai;
            case Branch::DmSoloThenAi: return dm_solo_then_ai;
        }
        return 0.0;
    }

    bool operator==(const Workload&) const = default;
};

/// Full parameter set of the AI+DM judgment simulation. Strengths and
/// thresholds live on the [0,1] signal scale. Defaults are the moderate
/// settings shared by the built-in presets.
struct Scenario {
    // problem domain
    double prior = 0.2;
    double obviousness = 0.2;
    double base_strength_std = 0.15;

    // judgments
    double ai_bss_std = 0.2;
    double dm_bss_std = 0.2;
    double algorithm_complementarity = 0.5;
    double ai_directional_strength = 0.05;
    double ai_directional_std = 0.05;
    double dm_directional_strength = 0.03;
    double dm_directional_std = 0.05;

    // interaction
    UsePattern use_pattern = UsePattern::UP1;
    double ai_pos_threshold = 0.8;
    double ai_neg_threshold = 0.2;
    double dm_pos_threshold = 0.8;
    double dm_neg_threshold = 0.2;

    // combination
    double anchor_weight = 0.6;
    double directional_discrimination = 0.02;
    double directional_discrimination_std = 0.1;
    double explanatory_boost = 0.02;
    double explanatory_boost_std = 0.1;

    UtilityModel utilities = screening_utilities();
    Workload workload;

    bool operator==(const Scenario&) const = default;
};

} // namespace cfx
