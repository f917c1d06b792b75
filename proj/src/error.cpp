#include "fmfpca/error.hpp"

namespace fmfpca {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NotSelfAdjoint: return "NotSelfAdjoint";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::NotOrthonormal: return "NotOrthonormal";
        case ErrorKind::TooShort: return "TooShort";
        case ErrorKind::PhiTooLarge: return "PhiTooLarge";
        case ErrorKind::NonPositiveBandwidth: return "NonPositiveBandwidth";
        case ErrorKind::SingularLrv: return "SingularLrv";
        case ErrorKind::KOutOfRange: return "KOutOfRange";
        case ErrorKind::MissingCriticalValues: return "MissingCriticalValues";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::GramSingular: return "GramSingular";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
        case ErrorKind::NotCentered: return "NotCentered";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::RaggedRows: return "RaggedRows";
        case ErrorKind::NonMonotoneGrid: return "NonMonotoneGrid";
        case ErrorKind::EmptyFile: return "EmptyFile";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace fmfpca
