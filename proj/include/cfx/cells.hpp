#pragma once
// Binary ground truth / verdict labels and the eight-cell counterfactual
// outcome taxonomy over (ground truth, aided verdict, unaided verdict).

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace cfx {

enum class GroundTruth : unsigned char { T, F };
enum class Decision : unsigned char { T, F };

constexpr Decision to_decision(bool positive) { return positive ? Decision::T : Decision::F; }
constexpr bool is_positive(GroundTruth g) { return g == GroundTruth::T; }
constexpr bool is_positive(Decision d) { return d == Decision::T; }

// Order matches the row-major layout of the outcome table: GT=T row then
// GT=F row; columns (aided,unaided) = (T,T) (T,F) (F,T) (F,F).
enum class CellKind : unsigned char { NTP, CTP, CFN, NFN, NFP, CFP, CTN, NTN };

inline constexpr std::size_t kCellCount = 8;

inline constexpr std::array<CellKind, kCellCount> kAllCells = {
    CellKind::NTP, CellKind::CTP, CellKind::CFN, CellKind::NFN,
    CellKind::NFP, CellKind::CFP, CellKind::CTN, CellKind::NTN};

// The four cells where aided and unaided verdicts differ.
enum class CfCell : unsigned char { CTP, CFN, CFP, CTN };

inline constexpr std::size_t kCfCellCount = 4;

inline constexpr std::array<CfCell, kCfCellCount> kAllCfCells = {
    CfCell::CTP, CfCell::CFN, CfCell::CFP, CfCell::CTN};

constexpr std::size_t index(CellKind c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index(CfCell c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index(GroundTruth g) { return static_cast<std::size_t>(g); }
constexpr std::size_t index(Decision d) { return static_cast<std::size_t>(d); }

constexpr CellKind classify_cell(GroundTruth gt, Decision aided, Decision unaided) {
    return static_cast<CellKind>(index(gt) * 4 + index(aided) * 2 + index(unaided));
}

constexpr GroundTruth ground_truth_of(CellKind c) { return static_cast<GroundTruth>(index(c) / 4); }
constexpr Decision aided_of(CellKind c) { return static_cast<Decision>((index(c) / 2) % 2); }
constexpr Decision unaided_of(CellKind c) { return static_cast<Decision>(index(c) % 2); }

constexpr bool is_counterfactual(CellKind c) { return aided_of(c) != unaided_of(c); }

constexpr std::optional<CfCell> counterfactual_of(CellKind c) {
    switch (c) {
        case CellKind::CTP: return CfCell::CTP;
        case CellKind::CFN: return CfCell::CFN;
        case CellKind::CFP: return CfCell::CFP;
        case CellKind::CTN: return CfCell::CTN;
        default: return std::nullopt;
    }
}

constexpr CellKind cell_of(CfCell c) {
    switch (c) {
        case CfCell::CTP: return CellKind::CTP;
        case CfCell::CFN: return CellKind::CFN;
        case CfCell::CFP: return CellKind::CFP;
        case CfCell::CTN: return CellKind::CTN;
    }
    return CellKind::CTP;
}

constexpr std::string_view name(CellKind c) {
    constexpr std::array<std::string_view, kCellCount> names = {
        "NTP", "CTP", "CFN", "NFN", "NFP", "CFP", "CTN", "NTN"};
    return names[index(c)];
}

constexpr std::string_view name(CfCell c) { return name(cell_of(c)); }
constexpr std::string_view name(GroundTruth g) { return g == GroundTruth::T ? "T" : "F"; }
constexpr std::string_view name(Decision d) { return d == Decision::T ? "T" : "F"; }

constexpr std::optional<CellKind> parse_cell(std::string_view s) {
    for (CellKind c : kAllCells)
        if (name(c) == s) return c;
    return std::nullopt;
}

constexpr std::optional<CfCell> parse_cf_cell(std::string_view s) {
    for (CfCell c : kAllCfCells)
        if (name(c) == s) return c;
    return std::nullopt;
}

} // namespace cfx
