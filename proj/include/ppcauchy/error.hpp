#pragma once

#include <stdexcept>
#include <string>

namespace ppcauchy {

enum class ErrorKind {
    InvalidArgument,
    OutOfRange,
    InsufficientResolution,
    InvalidExponent,
    CurveInvalid,
    AxisMismatch,
    MissingField,
    Parse,
    Io,
    Config,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InsufficientResolution: return "insufficient-resolution";
    case ErrorKind::InvalidExponent: return "invalid-exponent";
    case ErrorKind::CurveInvalid: return "curve-invalid";
    case ErrorKind::AxisMismatch: return "axis-mismatch";
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) {
        fail(kind, what);
    }
}

} // namespace ppcauchy
