#include "bridgenav/error.hpp"

namespace bridgenav {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::IOError: return "IOError";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidRange: return "InvalidRange";
    case Errc::InvalidLeaf: return "InvalidLeaf";
    case Errc::InvalidTransform: return "InvalidTransform";
    case Errc::DegenerateCloud: return "DegenerateCloud";
    case Errc::NoPlane: return "NoPlane";
    case Errc::WrongFrame: return "WrongFrame";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidAlpha: return "InvalidAlpha";
    case Errc::EmptyBoundary: return "EmptyBoundary";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegenerateFrame: return "DegenerateFrame";
    case Errc::InconsistentInput: return "InconsistentInput";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::DegenerateCluster: return "DegenerateCluster";
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::OddCardinality: return "OddCardinality";
    case Errc::Disconnected: return "Disconnected";
    case Errc::DisconnectedEndpoints: return "DisconnectedEndpoints";
    case Errc::EmptyGraph: return "EmptyGraph";
    case Errc::ParityViolation: return "ParityViolation";
    case Errc::TooLarge: return "TooLarge";
    case Errc::EmptyBoundaries: return "EmptyBoundaries";
    case Errc::StartInvalid: return "StartInvalid";
    case Errc::GoalInvalid: return "GoalInvalid";
    case Errc::NoPathFound: return "NoPathFound";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

} // namespace bridgenav
