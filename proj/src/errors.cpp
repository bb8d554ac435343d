#include "memswarm/errors.hpp"

namespace memswarm {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositiveLength: return "NonPositiveLength";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::DisconnectedTerminals: return "DisconnectedTerminals";
        case ErrorCode::UnknownTerminal: return "UnknownTerminal";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::IdenticalTerminals: return "IdenticalTerminals";
        case ErrorCode::PathBudgetExceeded: return "PathBudgetExceeded";
        case ErrorCode::NoAllowableMove: return "NoAllowableMove";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::StateBlowup: return "StateBlowup";
        case ErrorCode::UnsupportedExponents: return "UnsupportedExponents";
        case ErrorCode::ZeroEvaporation: return "ZeroEvaporation";
        case ErrorCode::StateOutOfRange: return "StateOutOfRange";
        case ErrorCode::NonIntegerLengthInChainMode: return "NonIntegerLengthInChainMode";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ZeroRelaxation: return "ZeroRelaxation";
        case ErrorCode::NoPathExtractable: return "NoPathExtractable";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace memswarm
