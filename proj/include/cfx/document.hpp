#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "engine.hpp"

namespace cfx {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "cfx";
inline constexpr const char* kToolVersion = "0.1.0";

struct SweepSpec {
    std::string param_path;
    std::vector<double> values;
    SeedPolicy seed_policy = SeedPolicy::Common;

    bool operator==(const SweepSpec&) const = default;
};

struct RunSpec {
    std::uint64_t n_cases = 100000;
    std::uint64_t seed = 0;

    bool operator==(const RunSpec&) const = default;
};

/// A scenario as exchanged with the CLI, the service and config files.
/// `matrix` is only needed for closed-form evaluation.
struct ScenarioDocument {
    int schema_version = kSchemaVersion;
    std::string name;
    std::string description;
    Scenario scenario;
    std::optional<CounterfactualMatrix> matrix;
    std::optional<SweepSpec> sweep;
    std::optional<RunSpec> run;

    bool operator==(const ScenarioDocument&) const = default;
};

struct ClosedFormResult {
    CuMode mode = CuMode::Reviewed;
    CounterfactualMatrix matrix;
    EUReport report;
    DiscoveryAnalysis discovery;

    bool operator==(const ClosedFormResult&) const = default;
};

struct NamedResult {
    std::string name;
    ScenarioResult result;

    bool operator==(const NamedResult&) const = default;
};

using ComparisonResult = std::vector<NamedResult>;

using ResultPayload = std::variant<ClosedFormResult, ScenarioResult, SweepResult, ComparisonResult>;

inline std::string_view payload_kind(const ResultPayload& p) {
    switch (p.index()) {
        case 0: return "eu";
        case 1: return "run";
        case 2: return "sweep";
        default: return "compare";
    }
}

struct ResultDocument {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    std::optional<std::string> timestamp;  // left empty unless requested, so outputs stay byte-stable
    std::string name;
    std::uint64_t seed = 0;
    std::uint64_t n_cases = 0;
    ResultPayload payload;

    bool operator==(const ResultDocument&) const = default;
};

} // namespace cfx
