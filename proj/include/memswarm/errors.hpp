#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memswarm {

enum class ErrorCode {
    NonPositiveLength,
    SelfLoop,
    DisconnectedTerminals,
    UnknownTerminal,
    UnknownNode,
    IdenticalTerminals,
    PathBudgetExceeded,
    NoAllowableMove,
    InvalidParameter,
    StateBlowup,
    UnsupportedExponents,
    ZeroEvaporation,
    StateOutOfRange,
    NonIntegerLengthInChainMode,
    SingularSystem,
    ZeroRelaxation,
    NoPathExtractable,
    ParseError,
    ValidationError,
    UnknownPreset,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    /// Message without the error-code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace memswarm
