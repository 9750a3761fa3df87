#pragma once

#include <stdexcept>
#include <string>

namespace nlskg {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidFieldError : Error {
    using Error::Error;
};

struct SymmetryError : Error {
    using Error::Error;
};

struct GridMismatchError : Error {
    using Error::Error;
};

struct ZeroModeError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ResonanceError : Error {
    using Error::Error;
};

struct StalenessError : Error {
    using Error::Error;
};

struct UnsupportedRegimeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

// Carries the time at which the solution left the trust region.
struct BlowUpError : Error {
    double t;
    BlowUpError(const std::string& msg, double t_) : Error(msg), t(t_) {}
};

}  // namespace nlskg
