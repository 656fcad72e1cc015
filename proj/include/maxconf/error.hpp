#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace maxconf {

enum class ErrorKind {
    NonHermitian,
    NotPsd,
    InvalidState,
    InvalidSpec,
    InvalidNoise,
    NotPure,
    WrongArity,
    OutOfRange,
    SingularEnsemble,
    ZeroRate,
    UnsupportedZeroC,
    Infeasible,
    InfeasibleRate,
    InfeasibleRates,
    UnequalPriors,
    DegenerateEnsemble,
    DimensionMismatch,
    WrongRegion,
    ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonHermitian: return "NonHermitian";
        case ErrorKind::NotPsd: return "NotPsd";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::InvalidNoise: return "InvalidNoise";
        case ErrorKind::NotPure: return "NotPure";
        case ErrorKind::WrongArity: return "WrongArity";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::SingularEnsemble: return "SingularEnsemble";
        case ErrorKind::ZeroRate: return "ZeroRate";
        case ErrorKind::UnsupportedZeroC: return "UnsupportedZeroC";
        case ErrorKind::Infeasible: return "Infeasible";
        case ErrorKind::InfeasibleRate: return "InfeasibleRate";
        case ErrorKind::InfeasibleRates: return "InfeasibleRates";
        case ErrorKind::UnequalPriors: return "UnequalPriors";
        case ErrorKind::DegenerateEnsemble: return "DegenerateEnsemble";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::WrongRegion: return "WrongRegion";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto an exit code.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) { throw Error(kind, message); }

inline void require(bool condition, ErrorKind kind, const std::string &message) {
    if (!condition) {
        fail(kind, message);
    }
}

}  // namespace maxconf
