#pragma once

/**
 * Scalar closed forms for the Doppler shift and the retarded time.
 */

#include <cmath>

#include "statphase/error.hpp"
#include "statphase/vec3.hpp"

namespace statphase {

/// omega0 / (1 - v_rad / c) for a constant signal speed c.
inline double nondispersive_doppler(double omega0, double v_rad, double c)
{
    require(c > 0.0, ErrorCode::InvalidArgument, "signal speed must be positive");
    require(std::abs(v_rad) < c, ErrorCode::SuperluminalRadialSpeed,
            "radial speed reaches the signal speed");
    return omega0 / (1.0 - v_rad / c);
}

/**
 * Received frequency in a cold plasma for a source moving along the line of
 * sight at Mach number M:
 *   omega = (omega0 +- M sqrt(omega0^2 - (1 - M^2) omega_p^2)) / (1 - M^2),
 * upper sign when approaching.
 */
inline double plasma_doppler_closed_form(double omega0, double omega_p, double mach,
                                         bool approaching)
{
    require(mach >= 0.0 && mach < 1.0, ErrorCode::SuperluminalMach, "Mach number must be in [0, 1)");
    require(omega_p >= 0.0, ErrorCode::InvalidArgument, "plasma frequency must be >= 0");
    const double m2 = 1.0 - mach * mach;
    const double disc = omega0 * omega0 - m2 * omega_p * omega_p;
    require(omega0 > omega_p && disc >= 0.0, ErrorCode::BelowCutoff,
            "source frequency below the plasma cutoff");
    if (mach == 0.0) {
        return omega0;
    }
    const double root = mach * std::sqrt(disc);
    return (approaching ? omega0 + root : omega0 - root) / m2;
}

/// Emission time on the line x0 = (0, v tau, 0) seen at x2 and time t: (x2 - v_g t) / (v - v_g).
inline double retard_1d(double v, double v_group, double x2, double t)
{
    require(v != v_group, ErrorCode::GroupVelocityMatchesSource,
            "source speed equals the group velocity");
    return (x2 - v_group * t) / (v - v_group);
}

/**
 * Emission delay s = t - tau > 0 at which a constant-velocity source reaches
 * the observer at signal speed `speed`: |e + V s| = speed s with e = x - x0(t).
 */
inline double straight_line_delay(const Vec3& e, const Vec3& velocity, double speed)
{
    const double a = speed * speed - dot(velocity, velocity);
    require(a > 0.0, ErrorCode::SuperluminalRadialSpeed,
            "source is not slower than the signal speed");
    const double ev = dot(e, velocity);
    const double ee = dot(e, e);
    const double q = std::sqrt(ev * ev + a * ee);
    return ev >= 0.0 ? (ev + q) / a : ee / (q - ev);
}

} // namespace statphase
