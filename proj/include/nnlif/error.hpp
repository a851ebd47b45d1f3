#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nnlif {

enum class ErrorCode {
    ResetOffGrid,
    DegenerateDomain,
    NegativeInitial,
    ExponentOverflow,
    KernelResidual,
    SingularSystem,
    CflViolation,
    SchemaError,
    InvalidArgument,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ResetOffGrid: return "RESET_OFF_GRID";
        case ErrorCode::DegenerateDomain: return "DEGENERATE_DOMAIN";
        case ErrorCode::NegativeInitial: return "NEGATIVE_INITIAL";
        case ErrorCode::ExponentOverflow: return "EXPONENT_OVERFLOW";
        case ErrorCode::KernelResidual: return "KERNEL_RESIDUAL";
        case ErrorCode::SingularSystem: return "SINGULAR_SYSTEM";
        case ErrorCode::CflViolation: return "CFL_VIOLATION";
        case ErrorCode::SchemaError: return "SCHEMA_ERROR";
        case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
        case ErrorCode::Io: return "IO_ERROR";
    }
    return "UNKNOWN";
}

/// Whether an error is a configuration problem (as opposed to a numerical fault).
constexpr bool is_validation_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ResetOffGrid:
        case ErrorCode::DegenerateDomain:
        case ErrorCode::NegativeInitial:
        case ErrorCode::SchemaError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::Io:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

}  // namespace nnlif
