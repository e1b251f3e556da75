#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bfgraph {

enum class ErrorKind {
    invalid_argument,
    process_exhausted,
    stiffness,
    no_blowup,
    blow_up,
    resolution,
    no_singularity,
    insufficient_range,
    unsupported_rule,
    io,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::process_exhausted: return "process-exhausted";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::no_blowup: return "no-blowup";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::no_singularity: return "no-singularity-found";
    case ErrorKind::insufficient_range: return "insufficient-range";
    case ErrorKind::unsupported_rule: return "unsupported-rule";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Step-size underflow in the integrator; carries the last accepted time.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double last_good_t)
        : Error(ErrorKind::stiffness, what), last_good_t_(last_good_t) {}

    double last_good_t() const noexcept { return last_good_t_; }

private:
    double last_good_t_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace bfgraph
