#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adcad {

enum class ErrorKind {
    MissingFile,
    BadMagic,
    BadHeader,
    LengthMismatch,
    NonFinite,
    Io,
    InvalidArgument,
    DimensionMismatch,
    SingleClass,
    AllZeroSpectrum,
    NotConverged,
    Diverged,
    UnknownLabel,
    BadFormat,
};

std::string_view to_string(ErrorKind kind);

/// Domain error raised by every library operation. The kind lets callers
/// (and tests) distinguish failure modes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) throw Error(kind, what);
}

}  // namespace adcad
