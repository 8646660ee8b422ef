#include "hubprior/error.hpp"

namespace hubprior {

std::string_view error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config: return "Config";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyHubSet: return "EmptyHubSet";
    case ErrorCode::BatchExhaustion: return "BatchExhaustion";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::ClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::InvalidHeader: return "InvalidHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::MetadataParse: return "MetadataParse";
    case ErrorCode::BadCsv: return "BadCsv";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
    }
    return "Internal";
}

ErrorCategory error_category(ErrorCode code) {
    switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Usage:
    case ErrorCode::KTooLarge:
        return ErrorCategory::Usage;
    case ErrorCode::Internal:
        return ErrorCategory::Internal;
    default:
        return ErrorCategory::Data;
    }
}

} // namespace hubprior
