#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hubprior {

enum class ErrorCode {
    // configuration / usage
    Config,
    Usage,
    KTooLarge,
    // data
    EmptySet,
    ZeroVector,
    NonFinite,
    NotOnSphere,
    IndexOutOfRange,
    DimensionMismatch,
    EmptyHubSet,
    BatchExhaustion,
    AllZero,
    ClassCountMismatch,
    BadMagic,
    UnsupportedVersion,
    UnsupportedDtype,
    InvalidHeader,
    TruncatedPayload,
    TrailingData,
    MetadataParse,
    BadCsv,
    Io,
    // everything else
    Internal,
};

/// Process exit status class for an error code: 1 usage, 2 data, 3 internal.
enum class ErrorCategory { Usage = 1, Data = 2, Internal = 3 };

std::string_view error_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return error_category(code_); }

private:
    ErrorCode code_;
};

} // namespace hubprior
