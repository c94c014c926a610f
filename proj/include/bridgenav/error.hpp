#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bridgenav {

enum class Errc {
    IOError,
    ParseError,
    InvalidRange,
    InvalidLeaf,
    InvalidTransform,
    DegenerateCloud,
    NoPlane,
    WrongFrame,
    EmptyInput,
    InvalidAlpha,
    EmptyBoundary,
    InvalidArgument,
    DegenerateFrame,
    InconsistentInput,
    TooFewPoints,
    SingularCovariance,
    DegenerateCluster,
    UnknownVertex,
    OddCardinality,
    Disconnected,
    DisconnectedEndpoints,
    EmptyGraph,
    ParityViolation,
    TooLarge,
    EmptyBoundaries,
    StartInvalid,
    GoalInvalid,
    NoPathFound,
    InvalidSpec,
    InvalidConfig,
};

std::string_view to_string(Errc code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace bridgenav
