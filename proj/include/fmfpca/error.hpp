#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fmfpca {

/// Failure categories raised by the library. The CLI reports these names
/// verbatim in its error JSON.
enum class ErrorKind {
    InvalidArgument,
    GridMismatch,
    NonFinite,
    NotSelfAdjoint,
    RankDeficient,
    NotOrthonormal,
    TooShort,
    PhiTooLarge,
    NonPositiveBandwidth,
    SingularLrv,
    KOutOfRange,
    MissingCriticalValues,
    DimMismatch,
    IllConditioned,
    GramSingular,
    OutOfDomain,
    NonPositiveDensity,
    NotCentered,
    Overflow,
    RaggedRows,
    NonMonotoneGrid,
    EmptyFile,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    /// The text without the kind prefix.
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace fmfpca
