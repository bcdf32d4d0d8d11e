#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace statphase {

enum class ErrorCode {
    None,
    InvalidArgument,
    ZeroFrequency,
    DegenerateMedium,
    EvanescentRegime,
    ObserverOnTrajectory,
    UnsupportedTrajectory,
    DegeneratePoint,
    NoConvergence,
    LeftPropagatingBand,
    NotAContraction,
    NoStationaryPoint,
    SuperluminalRadialSpeed,
    BelowCutoff,
    SuperluminalMach,
    NoRootInBand,
    MultipleRoots,
    GroupVelocityMatchesSource,
    NoCherenkovRoot,
    NoConvergenceInR,
    PhaseComplexOnBox,
    GradientVanishesUnbounded,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::None: return "None";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroFrequency: return "ZeroFrequency";
    case ErrorCode::DegenerateMedium: return "DegenerateMedium";
    case ErrorCode::EvanescentRegime: return "EvanescentRegime";
    case ErrorCode::ObserverOnTrajectory: return "ObserverOnTrajectory";
    case ErrorCode::UnsupportedTrajectory: return "UnsupportedTrajectory";
    case ErrorCode::DegeneratePoint: return "DegeneratePoint";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::LeftPropagatingBand: return "LeftPropagatingBand";
    case ErrorCode::NotAContraction: return "NotAContraction";
    case ErrorCode::NoStationaryPoint: return "NoStationaryPoint";
    case ErrorCode::SuperluminalRadialSpeed: return "SuperluminalRadialSpeed";
    case ErrorCode::BelowCutoff: return "BelowCutoff";
    case ErrorCode::SuperluminalMach: return "SuperluminalMach";
    case ErrorCode::NoRootInBand: return "NoRootInBand";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::GroupVelocityMatchesSource: return "GroupVelocityMatchesSource";
    case ErrorCode::NoCherenkovRoot: return "NoCherenkovRoot";
    case ErrorCode::NoConvergenceInR: return "NoConvergenceInR";
    case ErrorCode::PhaseComplexOnBox: return "PhaseComplexOnBox";
    case ErrorCode::GradientVanishesUnbounded: return "GradientVanishesUnbounded";
    }
    return "Unknown";
}

/// Exception carrying a typed error code; every library failure path throws this.
class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const char* message)
{
    if (!condition) {
        throw Error(code, message);
    }
}

} // namespace statphase
