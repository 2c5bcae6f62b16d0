#pragma once

#include <stdexcept>
#include <string>

namespace bbolab {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct InstanceError : Error {
    using Error::Error;
};

struct TourError : Error {
    using Error::Error;
};

struct ViewError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct RenderError : Error {
    using Error::Error;
};

struct TooLargeError : Error {
    using Error::Error;
};

/// A reported tour length beat the exact optimum: the oracle or the
/// evaluation path is broken, never a legitimate runtime condition.
struct OracleViolationError : Error {
    using Error::Error;
};

/// Invalid configuration; carries the offending field path for diagnostics.
struct ConfigError : Error {
    ConfigError(const std::string& field, const std::string& message)
        : Error("config field '" + field + "': " + message), field(field) {}
    std::string field;
};

struct TranscriptError : Error {
    using Error::Error;
};

} // namespace bbolab
