#pragma once

/**
 * Two-variable stationary phase for the phase
 *
 *   S(omega, tau) = k(omega) r(tau) - omega (t - tau) - omega0 tau,
 *
 * where r(tau) is the distance from the observer to the source at emission
 * time tau. Stationary points satisfy r / v_g = t - tau (retardation) and
 * omega - omega0 = k(omega) v_rad (Doppler).
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "statphase/closed_forms.hpp"
#include "statphase/dispersion.hpp"
#include "statphase/newton.hpp"
#include "statphase/trajectory.hpp"

namespace statphase {

struct PhaseContext
{
    double t = 0.0;
    Vec3 x;
    double omega0 = 0.0;
    Trajectory trajectory;
    DispersionModel dispersion;
    double lambda = 1.0;
    Normalization normalization;

    void validate() const
    {
        require(std::isfinite(t) && x.finite(), ErrorCode::InvalidArgument,
                "observer time and position must be finite");
        require(omega0 >= 0.0 && std::isfinite(omega0), ErrorCode::InvalidArgument,
                "source frequency must be >= 0");
        require(lambda >= 1.0 && std::isfinite(lambda), ErrorCode::InvalidArgument,
                "asymptotic parameter must be >= 1");
        normalization.validate();
    }

    /// Leading-order formulas are only trustworthy for large lambda.
    bool weakly_asymptotic() const noexcept { return lambda < 10.0; }
};

enum class SolveMethod { Newton, FixedPoint, ClosedForm };

struct StationaryPoint
{
    double omega_s = 0.0;
    double tau_s = 0.0;
    Mat2 hessian{};
    double det = 0.0;
    int signature = 0;
    bool degenerate = false;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    SolveMethod method = SolveMethod::Newton;
    ErrorCode status = ErrorCode::None;  ///< failure reason when not converged
};

/// Everything known about the phase at one (omega, tau).
struct PhaseLocal
{
    DispersionSample medium;
    Geometry geom;
    double value = 0.0;
    Vec2 gradient{};
    Mat2 hessian{};
};

inline PhaseLocal phase_local(const PhaseContext& ctx, double omega, double tau)
{
    PhaseLocal p;
    p.medium = sample(ctx.dispersion, Frequency{omega});
    require(p.medium.propagating, ErrorCode::EvanescentRegime,
            "phase evaluated outside the propagating band");
    p.geom = geometry(ctx.trajectory, ctx.x, tau);

    const double k = p.medium.k.real();
    const double vg = p.medium.v_group;
    const double r = p.geom.r;
    const double delay = ctx.t - tau;

    p.value = k * r - omega * delay - ctx.omega0 * tau;
    p.gradient = {r / vg - delay, -k * p.geom.v_rad + omega - ctx.omega0};
    const double off = 1.0 - p.geom.v_rad / vg;
    p.hessian = {{{p.medium.k_second * r, off}, {off, -k * p.geom.dv_rad_dtau}}};
    return p;
}

inline double phase(const PhaseContext& ctx, double omega, double tau)
{
    return phase_local(ctx, omega, tau).value;
}

/// (dS/domega, dS/dtau).
inline Vec2 gradient(const PhaseContext& ctx, double omega, double tau)
{
    return phase_local(ctx, omega, tau).gradient;
}

inline Mat2 hessian(const PhaseContext& ctx, double omega, double tau)
{
    return phase_local(ctx, omega, tau).hessian;
}

struct Classification
{
    double det = 0.0;
    int signature = 0;
    bool degenerate = false;
};

/// Determinant and signature from the eigenvalues; never throws.
inline Classification inspect(const Mat2& h)
{
    const double mean = 0.5 * (h[0][0] + h[1][1]);
    const double half_gap = std::hypot(0.5 * (h[0][0] - h[1][1]), 0.5 * (h[0][1] + h[1][0]));
    const double lo = mean - half_gap;
    const double hi = mean + half_gap;
    const double threshold = 1e-10 * frobenius(h);

    Classification c;
    c.det = det(h);
    c.degenerate = !(std::abs(lo) >= threshold && std::abs(hi) >= threshold) || threshold == 0.0;
    c.signature = (lo > 0.0) + (hi > 0.0) - (lo < 0.0) - (hi < 0.0);
    return c;
}

/// As `inspect`, but a near-singular Hessian is an error.
inline Classification classify(const Mat2& h)
{
    const auto c = inspect(h);
    require(!c.degenerate, ErrorCode::DegeneratePoint, "Hessian has a vanishing eigenvalue");
    return c;
}

namespace detail {

inline bool propagating_at(const DispersionModel& model, double omega)
{
    if (!std::isfinite(omega)) {
        return false;
    }
    try {
        return sample(model, Frequency{omega}).propagating;
    } catch (const Error&) {
        return false;
    }
}

inline StationaryPoint finish(const PhaseContext& ctx, double omega, double tau, SolveMethod method,
                              int iterations, double tol)
{
    StationaryPoint sp;
    sp.omega_s = omega;
    sp.tau_s = tau;
    sp.method = method;
    sp.iterations = iterations;
    const auto local = phase_local(ctx, omega, tau);
    sp.hessian = local.hessian;
    const auto c = inspect(local.hessian);
    sp.det = c.det;
    sp.signature = c.signature;
    sp.degenerate = c.degenerate;
    sp.residual_norm = norm(local.gradient);
    sp.converged = sp.residual_norm <= tol;
    sp.status = sp.converged ? ErrorCode::None : ErrorCode::NoConvergence;
    return sp;
}

} // namespace detail

inline StationaryPoint solve_newton(const PhaseContext& ctx, Vec2 seed,
                                    const NewtonOptions& opt = {})
{
    ctx.validate();
    require(opt.tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
    require(detail::propagating_at(ctx.dispersion, seed[0]), ErrorCode::LeftPropagatingBand,
            "Newton seed lies outside the propagating band");

    auto system = [&ctx](const Vec2& p) {
        const auto local = phase_local(ctx, p[0], p[1]);
        return Linearization{local.gradient, local.hessian};
    };
    auto inside = [&ctx](const Vec2& p) {
        return std::isfinite(p[1]) && detail::propagating_at(ctx.dispersion, p[0]);
    };
    const auto res = damped_newton(system, seed, inside, opt);

    StationaryPoint sp;
    sp.omega_s = res.x[0];
    sp.tau_s = res.x[1];
    sp.method = SolveMethod::Newton;
    sp.iterations = res.iterations;
    sp.residual_norm = res.residual_norm;
    sp.hessian = res.jacobian;
    const auto c = inspect(res.jacobian);
    sp.det = c.det;
    sp.signature = c.signature;
    sp.degenerate = c.degenerate;
    sp.converged = res.converged();
    sp.status = res.failure;
    return sp;
}

struct FixedPointOptions
{
    double tol = 1e-10;
    int max_iter = 200;
    double omega_halfwidth = 0.0;  ///< contraction-check box; 0 picks 10% of omega0
    double tau_halfwidth = 0.0;    ///< 0 picks half the seed delay (at least 1)
    int box_samples = 7;
};

/**
 * Largest sampled value of |v_rad/v_g| + sqrt(r |k''| |k dv_rad/dtau|) over a
 * box; below 1 the alternating update is a contraction in a weighted max-norm.
 */
inline double contraction_bound(const PhaseContext& ctx, Vec2 centre, double omega_halfwidth,
                                double tau_halfwidth, int samples)
{
    double worst = 0.0;
    bool any = false;
    for (int i = 0; i < samples; ++i) {
        const double w = centre[0] + omega_halfwidth * (2.0 * i / (samples - 1) - 1.0);
        if (!detail::propagating_at(ctx.dispersion, w)) {
            continue;
        }
        const auto med = sample(ctx.dispersion, Frequency{w});
        for (int j = 0; j < samples; ++j) {
            const double tau = centre[1] + tau_halfwidth * (2.0 * j / (samples - 1) - 1.0);
            const auto g = geometry(ctx.trajectory, ctx.x, tau);
            const double a = std::abs(g.v_rad / med.v_group);
            const double b = g.r * std::abs(med.k_second);
            const double c = std::abs(med.k.real() * g.dv_rad_dtau);
            worst = std::max(worst, a + std::sqrt(b * c));
            any = true;
        }
    }
    require(any, ErrorCode::LeftPropagatingBand, "contraction box misses the propagating band");
    return worst;
}

/**
 * Successive approximations tau <- t - r(tau)/v_g(omega), omega <- omega0 + k(omega) v_rad(tau),
 * seeded at (omega0, t - r(t)/v_g(omega0)).
 */
inline StationaryPoint solve_fixed_point(const PhaseContext& ctx, const FixedPointOptions& opt = {})
{
    ctx.validate();
    require(opt.tol > 0.0 && opt.max_iter > 0 && opt.box_samples >= 2, ErrorCode::InvalidArgument,
            "fixed point needs tol > 0, max_iter > 0, box_samples >= 2");
    require(detail::propagating_at(ctx.dispersion, ctx.omega0), ErrorCode::EvanescentRegime,
            "source frequency outside the propagating band");

    const auto med0 = sample(ctx.dispersion, Frequency{ctx.omega0});
    double omega = ctx.omega0;
    double tau = ctx.t - geometry(ctx.trajectory, ctx.x, ctx.t).r / med0.v_group;

    const double dw = opt.omega_halfwidth > 0.0 ? opt.omega_halfwidth
                                                : 0.1 * std::max(ctx.omega0, 1e-3);
    const double dt = opt.tau_halfwidth > 0.0 ? opt.tau_halfwidth
                                              : std::max(1.0, 0.5 * std::abs(ctx.t - tau));
    require(contraction_bound(ctx, {omega, tau}, dw, dt, opt.box_samples) < 1.0,
            ErrorCode::NotAContraction, "successive approximations are not contractive here");

    for (int it = 1; it <= opt.max_iter; ++it) {
        if (!detail::propagating_at(ctx.dispersion, omega)) {
            StationaryPoint sp;
            sp.omega_s = omega;
            sp.tau_s = tau;
            sp.method = SolveMethod::FixedPoint;
            sp.iterations = it;
            sp.status = ErrorCode::LeftPropagatingBand;
            return sp;
        }
        const auto med = sample(ctx.dispersion, Frequency{omega});
        const double tau_next = ctx.t - geometry(ctx.trajectory, ctx.x, tau).r / med.v_group;
        const double omega_next =
            ctx.omega0 + med.k.real() * geometry(ctx.trajectory, ctx.x, tau_next).v_rad;
        const double step = std::max(std::abs(tau_next - tau), std::abs(omega_next - omega));
        tau = tau_next;
        omega = omega_next;
        if (step < opt.tol) {
            auto sp = detail::finish(ctx, omega, tau, SolveMethod::FixedPoint, it,
                                     std::max(opt.tol, 1e-10));
            // Small steps with a large residual would mean a stall, not a solution.
            if (!sp.converged) {
                sp.status = ErrorCode::NoConvergence;
            }
            return sp;
        }
    }
    auto sp = detail::finish(ctx, omega, tau, SolveMethod::FixedPoint, opt.max_iter, opt.tol);
    sp.converged = false;
    sp.status = ErrorCode::NoConvergence;
    return sp;
}

/**
 * Closed-form stationary point when one exists:
 *   - source at rest (any medium): omega = omega0, tau = t - r / v_g(omega0);
 *   - non-dispersive medium, constant velocity: omega = omega0 / (1 - v_rad / c);
 *   - cold plasma with the observer on the line of motion (head-on or receding).
 * Anything else throws UnsupportedTrajectory.
 */
StationaryPoint solve_closed_form(const PhaseContext& ctx);

/**
 * Newton seed from the non-dispersive limit: tau by bisection on
 * r(tau) = s (t - tau), omega = omega0 / (1 - v_rad n(omega0)). The signal
 * speed s is v_g(omega0), else |c(omega0)|, else 1, taking the first for which
 * the retardation equation has a root.
 */
inline Vec2 default_seed(const PhaseContext& ctx)
{
    ctx.validate();
    std::vector<double> speeds;
    double n0 = 1.0;
    if (detail::propagating_at(ctx.dispersion, ctx.omega0)) {
        const auto med = sample(ctx.dispersion, Frequency{ctx.omega0});
        n0 = med.n.real();
        if (med.v_group > 0.0) {
            speeds.push_back(med.v_group);
        }
        speeds.push_back(std::abs(med.v_phase));
    }
    speeds.push_back(1.0);

    for (const double speed : speeds) {
        auto excess = [&](double tau) {
            return geometry(ctx.trajectory, ctx.x, tau).r - speed * (ctx.t - tau);
        };
        double hi = ctx.t;
        double span = std::max(geometry(ctx.trajectory, ctx.x, ctx.t).r / speed, 1e-3);
        double lo = hi - span;
        for (int i = 0; i < 60 && excess(lo) > 0.0; ++i) {
            hi = lo;
            span *= 2.0;
            lo = ctx.t - span;
        }
        if (excess(lo) > 0.0) {
            continue;
        }
        for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++i) {
            const double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? hi : lo) = mid;
        }
        const double tau = 0.5 * (lo + hi);

        double omega = ctx.omega0;
        const double denom = 1.0 - geometry(ctx.trajectory, ctx.x, tau).v_rad * n0;
        if (denom > 0.05) {
            const double shifted = ctx.omega0 / denom;
            if (detail::propagating_at(ctx.dispersion, shifted)) {
                omega = shifted;
            }
        }
        return {omega, tau};
    }
    throw Error(ErrorCode::NoStationaryPoint, "retardation equation has no root for the seed");
}

struct SeedGrid
{
    int n_omega = 8;
    int n_tau = 8;
    std::optional<std::array<double, 2>> omega_range;  ///< defaults to [min/2, 2 max] of seed and omega0
    std::optional<std::array<double, 2>> tau_range;
    double dedupe = 1e-6;
};

/// Multi-start Newton; distinct converged points sorted by tau.
inline std::vector<StationaryPoint> find_stationary_points(const PhaseContext& ctx,
                                                           const SeedGrid& grid = {},
                                                           const NewtonOptions& opt = {})
{
    ctx.validate();
    require(grid.n_omega >= 1 && grid.n_tau >= 1, ErrorCode::InvalidArgument,
            "seed grid needs at least one node per axis");

    std::vector<Vec2> seeds;
    std::optional<Vec2> centre;
    try {
        centre = default_seed(ctx);
        seeds.push_back(*centre);
    } catch (const Error&) {
    }
    const double w_mid = centre ? (*centre)[0] : ctx.omega0;
    const double t_mid = centre ? (*centre)[1] : ctx.t;
    const auto wr = grid.omega_range.value_or(
        std::array{0.5 * std::min(w_mid, ctx.omega0), 2.0 * std::max(w_mid, ctx.omega0)});
    const double delay = std::max(1.0, ctx.t - t_mid);
    const auto tr = grid.tau_range.value_or(std::array{ctx.t - 2.0 * delay, ctx.t});
    for (int i = 0; i < grid.n_omega; ++i) {
        const double w = grid.n_omega == 1 ? 0.5 * (wr[0] + wr[1])
                                           : wr[0] + (wr[1] - wr[0]) * i / (grid.n_omega - 1);
        for (int j = 0; j < grid.n_tau; ++j) {
            const double tau = grid.n_tau == 1 ? 0.5 * (tr[0] + tr[1])
                                               : tr[0] + (tr[1] - tr[0]) * j / (grid.n_tau - 1);
            seeds.push_back({w, tau});
        }
    }

    std::vector<StationaryPoint> found;
    for (const auto& seed : seeds) {
        if (!detail::propagating_at(ctx.dispersion, seed[0])) {
            continue;
        }
        StationaryPoint sp;
        try {
            sp = solve_newton(ctx, seed, opt);
        } catch (const Error&) {
            continue;
        }
        if (!sp.converged) {
            continue;
        }
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const auto& f) {
            return std::abs(f.omega_s - sp.omega_s) <= grid.dedupe * std::max(1.0, std::abs(f.omega_s)) &&
                   std::abs(f.tau_s - sp.tau_s) <= grid.dedupe * std::max(1.0, std::abs(f.tau_s));
        });
        if (!duplicate) {
            found.push_back(sp);
        }
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.tau_s < b.tau_s; });
    return found;
}

/**
 * Leading-order contribution of one non-degenerate stationary point of a
 * two-variable integral of amplitude * exp(i lambda S):
 *   (2 pi / lambda) exp(i (lambda S + pi/4 sgn)) amplitude / sqrt|det|.
 */
inline std::complex<double> contribution(double lambda, double phase_value, const Mat2& hessian,
                                         std::complex<double> amplitude)
{
    require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
    const auto c = classify(hessian);
    const double prefactor = 2.0 * std::numbers::pi / (lambda * std::sqrt(std::abs(c.det)));
    const double arg = lambda * phase_value + 0.25 * std::numbers::pi * c.signature;
    return prefactor * std::polar(1.0, arg) * amplitude;
}

inline std::complex<double> contribution(const PhaseContext& ctx, const StationaryPoint& sp,
                                         std::complex<double> amplitude)
{
    require(sp.converged, ErrorCode::NoConvergence, "contribution of an unconverged point");
    require(!sp.degenerate, ErrorCode::DegeneratePoint, "contribution of a degenerate point");
    return contribution(ctx.lambda, phase(ctx, sp.omega_s, sp.tau_s), sp.hessian, amplitude);
}

// ---------------------------------------------------------------------------

inline StationaryPoint solve_closed_form(const PhaseContext& ctx)
{
    ctx.validate();
    require(ctx.trajectory.has_constant_velocity(), ErrorCode::UnsupportedTrajectory,
            "closed forms need a constant-velocity path");
    const Vec3 vel = ctx.trajectory.velocity(0.0);
    const Vec3 e = ctx.x - ctx.trajectory.position(ctx.t);
    constexpr double tol = 1e-9;

    if (vel == Vec3{}) {
        const auto med = sample(ctx.dispersion, Frequency{ctx.omega0});
        require(med.propagating, ErrorCode::EvanescentRegime,
                "source frequency outside the propagating band");
        const double r = geometry(ctx.trajectory, ctx.x, ctx.t).r;
        return detail::finish(ctx, ctx.omega0, ctx.t - r / med.v_group, SolveMethod::ClosedForm, 0,
                              tol * std::max(1.0, ctx.omega0));
    }

    if (ctx.dispersion.is<NonDispersive>()) {
        const auto med = sample(ctx.dispersion, Frequency{1.0});
        const double c = med.v_phase;
        const double tau = ctx.t - straight_line_delay(e, vel, c);
        const double v_rad = geometry(ctx.trajectory, ctx.x, tau).v_rad;
        return detail::finish(ctx, ctx.omega0 / (1.0 - v_rad / c), tau, SolveMethod::ClosedForm, 0,
                              tol * std::max(1.0, ctx.omega0));
    }

    if (ctx.dispersion.is<ColdPlasma>()) {
        const double speed = norm(vel);
        const double along = dot(e, vel) / speed;
        require(norm(e - along / speed * vel) <= 1e-12 * std::max(1.0, norm(e)),
                ErrorCode::UnsupportedTrajectory,
                "plasma closed form needs the observer on the line of motion");
        const double wp = ctx.dispersion.as<ColdPlasma>().omega_p;
        for (const bool approaching : {true, false}) {
            const double omega = plasma_doppler_closed_form(ctx.omega0, wp, speed, approaching);
            const auto med = sample(ctx.dispersion, Frequency{omega});
            if (!med.propagating || med.v_group <= speed) {
                continue;
            }
            const double tau = ctx.t - straight_line_delay(e, vel, med.v_group);
            const double v_rad = geometry(ctx.trajectory, ctx.x, tau).v_rad;
            if ((v_rad > 0.0) == approaching) {
                return detail::finish(ctx, omega, tau, SolveMethod::ClosedForm, 0,
                                      tol * std::max(1.0, ctx.omega0));
            }
        }
        throw Error(ErrorCode::NoStationaryPoint, "no consistent plasma branch");
    }

    throw Error(ErrorCode::UnsupportedTrajectory, "no closed form for this medium and path");
}

} // namespace statphase
