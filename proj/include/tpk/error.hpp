#pragma once

#include <stdexcept>
#include <string>

namespace tpk {

enum class Errc {
    invalid_argument,
    dimension_mismatch,
    mass_mismatch,
    budget_exceeded,
    parse_error,
    numeric_error,
};

inline const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid argument";
        case Errc::dimension_mismatch: return "dimension mismatch";
        case Errc::mass_mismatch: return "mass mismatch";
        case Errc::budget_exceeded: return "budget exceeded";
        case Errc::parse_error: return "parse error";
        case Errc::numeric_error: return "numeric error";
    }
    return "unknown error";
}

// Every failure raised by the library. The code survives re-wrapping with
// extra context, so front-ends can map it to exit statuses.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tpk
