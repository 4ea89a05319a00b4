#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmkt {

enum class Errc {
    MissingColumn,
    InvalidValue,
    DanglingReference,
    UnknownFinding,
    ParseError,
    NonPositiveLiquidity,
    MarketSettled,
    InsufficientTokens,
    InsufficientHoldings,
    EmptyMarket,
    NoSurveyResponses,
    AllWeightsZero,
    DegenerateInput,
    DegenerateTable,
    DomainError,
    MissingOutcome,
    InsufficientPoints,
    NoReduction,
    Io,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::InvalidValue: return "InvalidValue";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::UnknownFinding: return "UnknownFinding";
    case Errc::ParseError: return "ParseError";
    case Errc::NonPositiveLiquidity: return "NonPositiveLiquidity";
    case Errc::MarketSettled: return "MarketSettled";
    case Errc::InsufficientTokens: return "InsufficientTokens";
    case Errc::InsufficientHoldings: return "InsufficientHoldings";
    case Errc::EmptyMarket: return "EmptyMarket";
    case Errc::NoSurveyResponses: return "NoSurveyResponses";
    case Errc::AllWeightsZero: return "AllWeightsZero";
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::DegenerateTable: return "DegenerateTable";
    case Errc::DomainError: return "DomainError";
    case Errc::MissingOutcome: return "MissingOutcome";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::NoReduction: return "NoReduction";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI's diagnostics) can branch on it without string matching.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string const& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string const& what) { throw Error(code, what); }

}  // namespace rmkt
