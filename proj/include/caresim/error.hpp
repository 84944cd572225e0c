#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace caresim {

enum class ErrorCode {
    // input / validation
    InvalidInput,
    InvalidMarginals,
    UnknownFacility,
    UnknownNode,
    // spatial queries
    NoRoute,
    DegenerateGeometry,
    EmptyPopulation,
    NoDwellings,
    // statistics
    LengthMismatch,
    TooFewPairs,
    DegenerateVariance,
    TooFewGroups,
    RankDeficient,
    SingleCluster,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidMarginals: return "InvalidMarginals";
    case ErrorCode::UnknownFacility: return "UnknownFacility";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NoRoute: return "NoRoute";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyPopulation: return "EmptyPopulation";
    case ErrorCode::NoDwellings: return "NoDwellings";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPairs: return "TooFewPairs";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::TooFewGroups: return "TooFewGroups";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingleCluster: return "SingleCluster";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable code. Input and validation codes
/// map to CLI exit status 2, everything else to 3.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message)
        , code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

    bool is_validation() const noexcept
    {
        return code_ == ErrorCode::InvalidInput || code_ == ErrorCode::InvalidMarginals ||
               code_ == ErrorCode::UnknownFacility || code_ == ErrorCode::UnknownNode;
    }

private:
    ErrorCode code_;
};

} // namespace caresim
