#pragma once

/**
 * Source world-lines and the geometric quantities seen by a fixed observer.
 */

#include <cmath>
#include <functional>
#include <variant>

#include "statphase/error.hpp"
#include "statphase/vec3.hpp"

namespace statphase {

struct StraightLine
{
    Vec3 origin;
    Vec3 velocity;
};

/// x0(tau) = (0, v tau, H).
struct OffsetLine
{
    double v = 0.0;
    double H = 0.0;
};

/**
 * Slowly varying path x0(tau) = L X0(tau / L) with slow_scale L.
 *
 * `position` is X0 in rescaled time. `velocity` and `acceleration` are its
 * first and second derivatives; either may be left empty, in which case the
 * derivative is taken numerically and the results are marked reduced precision.
 * All callables must be pure.
 */
struct Custom
{
    std::function<Vec3(double)> position;
    std::function<Vec3(double)> velocity;
    std::function<Vec3(double)> acceleration;
    double slow_scale = 1.0;
};

namespace detail {

/// Central difference with one Richardson level, relative step 1e-6.
template <class F>
auto richardson_derivative(F&& f, double at)
{
    const double h = 1e-6 * std::max(1.0, std::abs(at));
    auto central = [&](double step) { return (f(at + step) - f(at - step)) / (2.0 * step); };
    const auto coarse = central(h);
    const auto fine = central(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

/// Second difference with one Richardson level; the larger step keeps roundoff near 1e-10.
template <class F>
auto richardson_second_derivative(F&& f, double at)
{
    const double h = 1e-3 * std::max(1.0, std::abs(at));
    const auto centre = f(at);
    auto second = [&](double step) { return (f(at + step) - 2.0 * centre + f(at - step)) / (step * step); };
    const auto coarse = second(h);
    const auto fine = second(0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace detail

class Trajectory
{
  public:
    using Kind = std::variant<StraightLine, OffsetLine, Custom>;

    Trajectory() : Trajectory(StraightLine{}) {}
    Trajectory(Kind kind) : kind_(std::move(kind)) { validate(); }

    static Trajectory stationary(Vec3 at) { return Trajectory(StraightLine{at, {}}); }

    const Kind& kind() const noexcept { return kind_; }
    template <class T>
    bool is() const noexcept
    {
        return std::holds_alternative<T>(kind_);
    }
    bool has_constant_velocity() const noexcept { return !is<Custom>(); }

    Vec3 position(double tau) const
    {
        return std::visit(
            [tau](const auto& k) -> Vec3 {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, StraightLine>) {
                    return k.origin + tau * k.velocity;
                } else if constexpr (std::is_same_v<T, OffsetLine>) {
                    return {0.0, k.v * tau, k.H};
                } else {
                    return k.slow_scale * k.position(tau / k.slow_scale);
                }
            },
            kind_);
    }

    Vec3 velocity(double tau) const
    {
        return std::visit(
            [this, tau](const auto& k) -> Vec3 {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, StraightLine>) {
                    return k.velocity;
                } else if constexpr (std::is_same_v<T, OffsetLine>) {
                    return {0.0, k.v, 0.0};
                } else {
                    if (k.velocity) {
                        return k.velocity(tau / k.slow_scale);
                    }
                    return detail::richardson_derivative([this](double s) { return position(s); },
                                                         tau);
                }
            },
            kind_);
    }

    Vec3 acceleration(double tau) const
    {
        return std::visit(
            [this, tau](const auto& k) -> Vec3 {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Custom>) {
                    if (k.acceleration) {
                        return k.acceleration(tau / k.slow_scale) / k.slow_scale;
                    }
                    if (k.velocity) {
                        return detail::richardson_derivative([this](double s) { return velocity(s); },
                                                             tau);
                    }
                    return detail::richardson_second_derivative(
                        [this](double s) { return position(s); }, tau);
                } else {
                    return {};
                }
            },
            kind_);
    }

    /// True when some derivative of a Custom path is obtained numerically.
    bool numeric_derivatives() const noexcept
    {
        const auto* c = std::get_if<Custom>(&kind_);
        return c != nullptr && (!c->velocity || !c->acceleration);
    }

  private:
    void validate() const
    {
        std::visit(
            [](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, StraightLine>) {
                    require(k.origin.finite() && k.velocity.finite(), ErrorCode::InvalidArgument,
                            "straight line needs finite origin and velocity");
                } else if constexpr (std::is_same_v<T, OffsetLine>) {
                    require(std::isfinite(k.v) && std::isfinite(k.H), ErrorCode::InvalidArgument,
                            "offset line needs finite v and H");
                } else {
                    require(static_cast<bool>(k.position), ErrorCode::InvalidArgument,
                            "custom path needs a position function");
                    require(k.slow_scale > 0.0 && std::isfinite(k.slow_scale),
                            ErrorCode::InvalidArgument, "slow scale must be positive");
                }
            },
            kind_);
    }

    Kind kind_;
};

struct Geometry
{
    double r = 0.0;            ///< |x - x0(tau)|
    double v_rad = 0.0;        ///< velocity projected on unit_dir; positive when approaching
    double dv_rad_dtau = 0.0;
    Vec3 unit_dir;             ///< (x - x0(tau)) / r
    Vec3 velocity;
    bool reduced_precision = false;
};

inline constexpr double kMinRange = 1e-12;

namespace detail {

struct Separation
{
    Vec3 unit;
    double r;
};

inline Separation separation(const Trajectory& traj, const Vec3& x, double tau)
{
    require(x.finite() && std::isfinite(tau), ErrorCode::InvalidArgument,
            "observer and time must be finite");
    const Vec3 d = x - traj.position(tau);
    const double r = norm(d);
    require(r >= kMinRange, ErrorCode::ObserverOnTrajectory, "observer sits on the trajectory");
    return {d / r, r};
}

} // namespace detail

inline Geometry geometry(const Trajectory& traj, const Vec3& x, double tau)
{
    const auto [u, r] = detail::separation(traj, x, tau);
    Geometry g;
    g.r = r;
    g.unit_dir = u;
    g.velocity = traj.velocity(tau);
    g.v_rad = dot(g.velocity, u);

    // d(u)/dtau = (u (u.V) - V) / r
    const double speed2 = dot(g.velocity, g.velocity);
    g.dv_rad_dtau = dot(traj.acceleration(tau), u) + (g.v_rad * g.v_rad - speed2) / r;
    g.reduced_precision = traj.numeric_derivatives();
    return g;
}

/// Spatial factors entering the leading-order H and E amplitudes.
struct AmplitudeGeometry
{
    Vec3 curl_factor;     ///< curl of (V |x - x0|) = u x V
    Vec3 graddiv_factor;  ///< grad (V . grad |x - x0|) = (V - u (u.V)) / r
    bool numeric = false;
};

/**
 * Closed forms for constant-velocity paths. For x0 = (0, v tau, H) these read
 *   curl    = (-v (x3 - H) / r, 0, v x1 / r)
 *   graddiv = v (-x1 (x2 - v tau), x1^2 + (x3 - H)^2, -(x3 - H)(x2 - v tau)) / r^3.
 *
 * A Custom path throws UnsupportedTrajectory unless `allow_numeric` is set, in
 * which case both factors come from finite differences of r(x) and are flagged.
 */
inline AmplitudeGeometry amplitude_geometry(const Trajectory& traj, const Vec3& x, double tau,
                                            bool allow_numeric = false)
{
    const auto [u, r] = detail::separation(traj, x, tau);
    const Vec3 vel = traj.velocity(tau);

    if (traj.has_constant_velocity()) {
        return {cross(u, vel), (vel - dot(u, vel) * u) / r, false};
    }
    require(allow_numeric, ErrorCode::UnsupportedTrajectory,
            "closed-form amplitude geometry needs a constant-velocity path");

    const Vec3 x0 = traj.position(tau);
    const double h = 1e-5 * std::max(1.0, r);
    auto grad = [&](auto&& field) {
        Vec3 out;
        for (int i = 0; i < 3; ++i) {
            Vec3 step{};
            step[i] = h;
            out[i] = (field(x + step) - field(x - step)) / (2.0 * h);
        }
        return out;
    };
    const Vec3 grad_r = grad([&](const Vec3& p) { return norm(p - x0); });
    const Vec3 graddiv = grad([&](const Vec3& p) {
        const Vec3 d = p - x0;
        return dot(vel, d) / norm(d);
    });
    return {cross(grad_r, vel), graddiv, true};
}

} // namespace statphase
