#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cfx {

enum class ErrorCode {
    ParseError,
    ValidationError,
    UnknownField,
    NonStochastic,
    NegativeEntry,
    DegenerateMarginal,
    EmptyEpisodeSet,
    InvalidScenario,
    UnknownParameter,
    UnknownUsePattern,
    TooManyScenarios,
    IoError,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownField: return "UnknownField";
        case ErrorCode::NonStochastic: return "NonStochastic";
        case ErrorCode::NegativeEntry: return "NegativeEntry";
        case ErrorCode::DegenerateMarginal: return "DegenerateMarginal";
        case ErrorCode::EmptyEpisodeSet: return "EmptyEpisodeSet";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::UnknownUsePattern: return "UnknownUsePattern";
        case ErrorCode::TooManyScenarios: return "TooManyScenarios";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `field_path` is a dotted document
/// path (e.g. "scenario.prior") when the error concerns a specific input.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message, std::string field_path = {})
        : std::runtime_error(std::move(message)), code_(code), field_path_(std::move(field_path)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field_path() const noexcept { return field_path_; }

    /// Input errors (bad documents, bad values) as opposed to runtime failures.
    bool is_validation() const noexcept {
        switch (code_) {
            case ErrorCode::IoError: return false;
            default: return true;
        }
    }

private:
    ErrorCode code_;
    std::string field_path_;
};

} // namespace cfx
