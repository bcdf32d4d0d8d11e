#pragma once

/**
 * Physical outputs at stationary points: Doppler shift, retarded time,
 * leading-order E and H amplitudes, metamaterial Doppler solvers and the
 * Cherenkov cone.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "statphase/closed_forms.hpp"
#include "statphase/stationary_phase.hpp"

namespace statphase {

struct SourceModel
{
    double omega0 = 0.0;
    std::function<double(double)> envelope = [](double) { return 1.0; };
    double charge = 1.0;
    /// Direction of a modulated current for a source at rest; moving sources radiate along their velocity.
    std::optional<Vec3> current_direction;
};

struct FieldContribution
{
    CVec3 H{};
    CVec3 E{};
    double phase_value = 0.0;
    double instantaneous_frequency = 0.0;
    double retarded_time = 0.0;
    double doppler_shift = 0.0;
    bool gate = true;
    StationaryPoint point;
};

enum class DopplerKind { RedShift, BlueShift, NoShift };

/// Sign of omega_s - omega0 = k(omega_s) v_rad; a negative wavenumber reverses the usual shift.
inline DopplerKind doppler_classification(double k_at_solution, double v_rad) noexcept
{
    const double s = k_at_solution * v_rad;
    return s > 0.0 ? DopplerKind::BlueShift : (s < 0.0 ? DopplerKind::RedShift : DopplerKind::NoShift);
}

inline std::string_view to_string(DopplerKind k) noexcept
{
    switch (k) {
    case DopplerKind::RedShift: return "red";
    case DopplerKind::BlueShift: return "blue";
    case DopplerKind::NoShift: return "none";
    }
    return "none";
}

/**
 * H = i k a / (4 pi) e^{i(S + pi/4 sgn)} curl / (sqrt|det| r)
 * E = a / (4 pi i) (omega mu J - graddiv) e^{i(S + pi/4 sgn)} / (sqrt|det| r)
 *
 * with a the envelope at the emission time, J the current direction (the
 * velocity unless the source overrides it) and curl, graddiv the amplitude
 * geometry factors. Degenerate points contribute zero fields.
 */
inline FieldContribution field_contribution(const SourceModel& source, const PhaseContext& ctx,
                                            const StationaryPoint& sp)
{
    require(sp.converged, ErrorCode::NoConvergence, "fields of an unconverged point");
    const auto local = phase_local(ctx, sp.omega_s, sp.tau_s);

    FieldContribution fc;
    fc.point = sp;
    fc.phase_value = local.value;
    fc.instantaneous_frequency = sp.omega_s;
    fc.retarded_time = ctx.t - sp.tau_s;
    fc.doppler_shift = sp.omega_s - ctx.omega0;
    if (sp.degenerate) {
        return fc;
    }

    Vec3 curl;
    Vec3 graddiv;
    Vec3 current;
    if (source.current_direction) {
        const Vec3 u = local.geom.unit_dir;
        current = *source.current_direction;
        curl = cross(u, current);
        graddiv = (current - dot(u, current) * u) / local.geom.r;
    } else {
        const auto ag = amplitude_geometry(ctx.trajectory, ctx.x, sp.tau_s, true);
        curl = ag.curl_factor;
        graddiv = ag.graddiv_factor;
        current = local.geom.velocity;
    }

    const double a = source.envelope ? source.envelope(sp.tau_s) : 1.0;
    const double k = local.medium.k.real();
    const std::complex<double> mu =
        ctx.dispersion.neglect_imaginary() ? std::complex<double>(local.medium.mu.real())
                                           : local.medium.mu;
    const double quarter = 0.25 * std::numbers::pi * sp.signature;
    const std::complex<double> carrier =
        std::polar(1.0, local.value + quarter) / (std::sqrt(std::abs(sp.det)) * local.geom.r);
    const std::complex<double> i(0.0, 1.0);
    const double four_pi = 4.0 * std::numbers::pi;

    const std::complex<double> h_scale = i * k * a / four_pi * carrier;
    const std::complex<double> e_scale = a / (four_pi * i) * carrier;
    for (int c = 0; c < 3; ++c) {
        fc.H[c] = h_scale * curl[c];
        fc.E[c] = e_scale * (sp.omega_s * mu * current[c] - graddiv[c]);
    }
    return fc;
}

struct FieldOptions
{
    SeedGrid seeds;
    NewtonOptions newton;
    double lambda = 1.0;
};

/// All converged stationary points at (x, t) with their field contributions, sorted by tau_s.
inline std::vector<FieldContribution> moving_source_fields(const SourceModel& source,
                                                           const Trajectory& trajectory,
                                                           const DispersionModel& dispersion,
                                                           const Vec3& x, double t,
                                                           const FieldOptions& opt = {})
{
    PhaseContext ctx{t, x, source.omega0, trajectory, dispersion, opt.lambda, {}};
    ctx.validate();

    std::vector<StationaryPoint> points;
    if (trajectory.has_constant_velocity() && trajectory.velocity(0.0) == Vec3{}) {
        points.push_back(solve_closed_form(ctx));
    } else {
        points = find_stationary_points(ctx, opt.seeds, opt.newton);
    }

    std::vector<FieldContribution> out;
    for (const auto& sp : points) {
        if (sp.converged) {
            out.push_back(field_contribution(source, ctx, sp));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.point.tau_s < b.point.tau_s; });
    return out;
}

// ---------------------------------------------------------------------------
// Metamaterial Doppler along and beside the line of motion

struct BandScan
{
    double omega_lo = 0.0;  ///< 0 picks omega0 / 4
    double omega_hi = 0.0;  ///< 0 picks 4 omega0
    int points = 20001;
};

/**
 * Roots of g(omega) = omega (1 + sign n(omega) v) - omega0 with n the real part
 * of the refraction index, restricted to the propagating band. The scan
 * brackets sign changes; each bracket is refined by Newton steps
 * (g' = 1 + sign v / v_g) safeguarded by bisection, and brackets straddling a
 * pole of n are discarded.
 */
inline std::vector<double> metamaterial_doppler_1d_roots(const DispersionModel& dispersion,
                                                         double omega0, double v, int sign,
                                                         const BandScan& scan = {})
{
    require(omega0 > 0.0, ErrorCode::InvalidArgument, "source frequency must be positive");
    require(v > -1.0 && v < 1.0, ErrorCode::InvalidArgument, "source speed must lie in (-1, 1)");
    require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "sign must be +1 or -1");
    require(scan.points >= 2, ErrorCode::InvalidArgument, "band scan needs at least two points");
    const double lo = scan.omega_lo > 0.0 ? scan.omega_lo : 0.25 * omega0;
    const double hi = scan.omega_hi > 0.0 ? scan.omega_hi : 4.0 * omega0;
    require(lo < hi, ErrorCode::InvalidArgument, "empty band scan");

    auto g = [&](double w) -> std::optional<double> {
        if (!detail::propagating_at(dispersion, w)) {
            return std::nullopt;
        }
        return w * (1.0 + sign * v * sample(dispersion, Frequency{w}).n.real()) - omega0;
    };
    auto dg = [&](double w) { return 1.0 + sign * v / sample(dispersion, Frequency{w}).v_group; };

    // Propagating samples plus band edges located by bisection, so roots next
    // to an edge are not lost. Neighbours share a band when their midpoint propagates.
    struct Node
    {
        double w;
        double g;
    };
    std::vector<Node> nodes;
    auto edge = [&](double inside_w, double outside_w) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (inside_w + outside_w);
            (detail::propagating_at(dispersion, mid) ? inside_w : outside_w) = mid;
        }
        return inside_w;
    };
    auto add = [&](double w) {
        if (const auto gw = g(w); gw && (nodes.empty() || w > nodes.back().w)) {
            nodes.push_back({w, *gw});
        }
    };
    double w_prev = lo;
    bool prev_ok = detail::propagating_at(dispersion, lo);
    add(lo);
    for (int i = 1; i < scan.points; ++i) {
        const double w = lo + (hi - lo) * i / (scan.points - 1);
        const bool ok = detail::propagating_at(dispersion, w);
        if (prev_ok != ok) {
            add(prev_ok ? edge(w_prev, w) : edge(w, w_prev));
        }
        add(w);
        w_prev = w;
        prev_ok = ok;
    }

    std::vector<double> roots;
    for (size_t i = 1; i < nodes.size(); ++i) {
        const Node& left = nodes[i - 1];
        const Node& right = nodes[i];
        if (!detail::propagating_at(dispersion, 0.5 * (left.w + right.w))) {
            continue;
        }
        if (left.g != 0.0 && (left.g < 0.0) == (right.g < 0.0)) {
            continue;
        }
        double a = left.w;
        double b = right.w;
        double ga = left.g;
        double x = 0.5 * (a + b);
        bool ok = true;
        for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
            const auto gx = g(x);
            if (!gx) {
                ok = false;
                break;
            }
            if (*gx == 0.0) {
                a = b = x;
                break;
            }
            if ((*gx < 0.0) == (ga < 0.0)) {
                a = x;
                ga = *gx;
            } else {
                b = x;
            }
            const double step = *gx / dg(x);
            if (std::abs(step) <= 1e-15 * std::abs(x)) {
                x -= step;
                break;
            }
            const double newton = x - step;
            x = (newton > a && newton < b) ? newton : 0.5 * (a + b);
        }
        const auto gx = ok ? g(x) : std::nullopt;
        if (gx && std::abs(*gx) <= 1e-9 * std::max(1.0, omega0) &&
            (roots.empty() || std::abs(x - roots.back()) > 1e-12 * x)) {
            roots.push_back(x);
        }
    }
    return roots;
}

/// Single root of metamaterial_doppler_1d_roots; NoRootInBand or MultipleRoots otherwise.
inline double metamaterial_doppler_1d(const DispersionModel& dispersion, double omega0, double v,
                                      int sign, const BandScan& scan = {})
{
    const auto roots = metamaterial_doppler_1d_roots(dispersion, omega0, v, sign, scan);
    require(!roots.empty(), ErrorCode::NoRootInBand, "no Doppler root in the scanned band");
    if (roots.size() > 1) {
        std::string list;
        for (double r : roots) {
            list += (list.empty() ? "" : ", ") + std::to_string(r);
        }
        throw Error(ErrorCode::MultipleRoots, "roots at omega = " + list);
    }
    return roots.front();
}

struct Doppler1D
{
    double omega = 0.0;
    double tau = 0.0;
    bool approaching = false;
    int sign = 0;  ///< sign passed to metamaterial_doppler_1d
    std::vector<double> roots;
};

/**
 * Observer on the line of motion of x0 = (0, v tau, 0) at x2 and time t. An
 * approaching source (observer ahead of it) solves omega (1 - n v) = omega0
 * and tau = (x2 - v_g t) / (v - v_g); a receding one solves
 * omega (1 + n v) = omega0 and tau = (x2 + v_g t) / (v + v_g). Among several
 * frequency roots a causal one (tau < t) nearest omega0 is kept.
 */
inline Doppler1D metamaterial_doppler_line(const DispersionModel& dispersion, double omega0,
                                           double v, double x2, double t,
                                           const BandScan& scan = {})
{
    require(v != 0.0, ErrorCode::InvalidArgument, "line Doppler needs a moving source");
    // Mirror so the source moves towards +x2.
    const double speed = std::abs(v);
    const double ahead = v > 0.0 ? x2 : -x2;
    Doppler1D out;
    out.approaching = ahead > speed * t;
    out.sign = out.approaching ? -1 : 1;
    out.roots = metamaterial_doppler_1d_roots(dispersion, omega0, speed, out.sign, scan);
    require(!out.roots.empty(), ErrorCode::NoRootInBand, "no Doppler root in the scanned band");
    auto emission = [&](double omega) {
        const double vg = sample(dispersion, Frequency{omega}).group_velocity();
        return out.approaching ? retard_1d(speed, vg, ahead, t) : retard_1d(-speed, vg, -ahead, t);
    };
    // Causal roots (t > tau) first, then the smallest shift.
    auto rank = [&](double omega) { return std::pair{emission(omega) >= t, std::abs(omega - omega0)}; };
    out.omega = *std::min_element(out.roots.begin(), out.roots.end(),
                                  [&](double a, double b) { return rank(a) < rank(b); });
    out.tau = emission(out.omega);
    return out;
}

/**
 * Roots in tau of x1^2 + (x2 - v tau)^2 = v_g^2 (t - tau)^2 for the source
 * x0 = (0, v tau, 0), larger first:
 *   tau = (x2 v - v_g^2 t -+ sqrt(v_g^2 (x2 - v t)^2 - (v^2 - v_g^2) x1^2)) / (v^2 - v_g^2).
 */
inline std::vector<double> retard_2d_roots(double v, double v_group, double x1, double x2, double t)
{
    const double a = v * v - v_group * v_group;
    require(a != 0.0, ErrorCode::GroupVelocityMatchesSource, "source speed equals group velocity");
    const double b = x2 * v - v_group * v_group * t;
    const double disc = v_group * v_group * (x2 - v * t) * (x2 - v * t) - a * x1 * x1;
    if (disc < 0.0) {
        return {};
    }
    const double s = std::sqrt(disc);
    std::vector<double> roots{(b - s) / a, (b + s) / a};
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

struct Doppler2D
{
    double omega = 0.0;
    double tau = 0.0;
    StationaryPoint point;
    std::vector<StationaryPoint> all_points;
    double closed_form_omega = 0.0;  ///< frequency closed form at the solved tau
    double closed_form_mismatch = 0.0;  ///< relative difference to omega
    double closed_form_tau = 0.0;       ///< nearest root of the planar retardation quadratic
};

/**
 * Planar source x0 = (0, v tau, 0) seen at (x1, x2, 0) at time t. Solves the
 * full stationarity system by multi-start Newton, keeping the root reached
 * from the default seed when it converges, otherwise the one whose frequency
 * is nearest omega0. The frequency closed form
 *   omega = (r^2 +- r |n v (x2 - v tau)|) omega0 / (r^2 - n^2 v^2 (x2 - v tau)^2),
 * with the sign of n v (x2 - v tau), is evaluated at the solution; it reduces
 * to omega0 / (1 - n v_rad).
 */
inline Doppler2D metamaterial_doppler_2d(const DispersionModel& dispersion, double omega0, double v,
                                         double x1, double x2, double t,
                                         const NewtonOptions& newton = {},
                                         const SeedGrid& seeds = {})
{
    require(v > -1.0 && v < 1.0, ErrorCode::InvalidArgument, "source speed must lie in (-1, 1)");
    PhaseContext ctx{t, Vec3{x1, x2, 0.0}, omega0, Trajectory(OffsetLine{v, 0.0}), dispersion, 1.0, {}};
    ctx.validate();

    Doppler2D out;
    if (v == 0.0) {
        out.point = solve_closed_form(ctx);
        out.all_points = {out.point};
    } else {
        std::optional<StationaryPoint> primary;
        try {
            auto sp = solve_newton(ctx, default_seed(ctx), newton);
            if (sp.converged) {
                primary = sp;
            }
        } catch (const Error&) {
        }
        out.all_points = find_stationary_points(ctx, seeds, newton);
        if (!primary) {
            require(!out.all_points.empty(), ErrorCode::NoConvergence,
                    "no stationary point found from any seed");
            primary = *std::min_element(
                out.all_points.begin(), out.all_points.end(), [&](const auto& a, const auto& b) {
                    return std::abs(a.omega_s - omega0) < std::abs(b.omega_s - omega0);
                });
        }
        out.point = *primary;
    }
    out.omega = out.point.omega_s;
    out.tau = out.point.tau_s;

    const auto med = sample(dispersion, Frequency{out.omega});
    const double n = med.n.real();
    const double d = x2 - v * out.tau;
    const double r2 = x1 * x1 + d * d;
    const double along = n * v * d;
    const double root = std::sqrt(v * v * r2 * d * d * n * n);
    out.closed_form_omega = (r2 + std::copysign(root, along)) * omega0 / (r2 - along * along);
    out.closed_form_mismatch =
        std::abs(out.closed_form_omega - out.omega) / std::max(std::abs(out.omega), 1e-300);

    const auto taus = retard_2d_roots(v, med.v_group, x1, x2, t);
    out.closed_form_tau = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::infinity();
    for (double tau : taus) {
        if (std::abs(tau - out.tau) < best) {
            best = std::abs(tau - out.tau);
            out.closed_form_tau = tau;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cherenkov radiation of a uniformly moving charge

struct CherenkovResult
{
    FieldContribution contribution;
    double cone_angle = std::numeric_limits<double>::quiet_NaN();  ///< between velocity and emission direction
    double gate_argument = std::numeric_limits<double>::quiet_NaN();
    /// (t - tau_s) - r / v_g; positive once the emitted front has passed the observer.
    double retardation_margin = std::numeric_limits<double>::quiet_NaN();
    ErrorCode reason = ErrorCode::None;
    bool dispersive = false;
};

struct CherenkovOptions
{
    Vec3 origin;
    NewtonOptions newton;
    BandScan band;  ///< frequencies tried as seeds in a dispersive medium
    int band_seeds = 64;
};

namespace detail {

/// tau with v_rad(tau) = c on a straight line (v_rad falls monotonically from |v| to -|v|).
inline std::optional<double> cone_emission_time(const Trajectory& traj, const Vec3& x, double c,
                                                double t)
{
    auto f = [&](double tau) { return geometry(traj, x, tau).v_rad - c; };
    double lo = t - 1.0;
    double hi = t + 1.0;
    for (int i = 0; i < 200 && f(lo) < 0.0; ++i) {
        lo = t - 2.0 * (t - lo);
    }
    for (int i = 0; i < 200 && f(hi) > 0.0; ++i) {
        hi = t + 2.0 * (hi - t);
    }
    if (!(f(lo) >= 0.0 && f(hi) <= 0.0)) {
        return std::nullopt;
    }
    for (int i = 0; i < 400 && hi - lo > 4e-16 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline double cherenkov_gate_argument(const Vec3& velocity, const Vec3& origin, const Vec3& x,
                                      double t, double beta)
{
    const double speed = norm(velocity);
    const Vec3 rel = x - origin;
    const double along = dot(rel, velocity) / speed;
    const double across = norm(rel - (along / speed) * velocity);
    return speed * t - along - across * std::sqrt(std::abs(beta * beta - 1.0));
}

} // namespace detail

/**
 * Emission with omega0 = 0 from x0 = origin + v tau. Stationary points satisfy
 * v_rad(tau) = c(omega) and r / v_g = t - tau; the field is switched by the
 * cone gate v t - x_par - |x_perp| sqrt|beta^2 - 1| > 0 with beta = |v| / v_g.
 * In a non-dispersive medium the frequency is undetermined: tau_s solves
 * v_rad = c alone, the point is reported degenerate and the fields vanish.
 */
inline CherenkovResult cherenkov_solve(const DispersionModel& dispersion, const Vec3& velocity,
                                       const Vec3& x, double t, const CherenkovOptions& opt = {},
                                       const SourceModel& source = {})
{
    const double speed = norm(velocity);
    require(speed > 0.0 && speed < 1.0, ErrorCode::SuperluminalMach,
            "Cherenkov source speed must lie in (0, 1)");
    const Trajectory traj(StraightLine{opt.origin, velocity});
    PhaseContext ctx{t, x, 0.0, traj, dispersion, 1.0, {}};
    ctx.validate();

    CherenkovResult res;
    res.contribution.gate = false;
    res.contribution.point.converged = false;

    if (dispersion.is<NonDispersive>()) {
        const double c = sample(dispersion, Frequency{1.0}).v_phase;
        if (c >= speed) {
            res.reason = ErrorCode::NoCherenkovRoot;
            return res;
        }
        const auto tau = detail::cone_emission_time(traj, x, c, t);
        if (!tau) {
            res.reason = ErrorCode::NoCherenkovRoot;
            return res;
        }
        const auto g = geometry(traj, x, *tau);
        auto& sp = res.contribution.point;
        sp.omega_s = std::numeric_limits<double>::quiet_NaN();
        sp.tau_s = *tau;
        sp.method = SolveMethod::ClosedForm;
        sp.degenerate = true;
        sp.converged = true;
        sp.residual_norm = std::abs(g.v_rad - c);
        res.cone_angle = std::acos(std::clamp(g.v_rad / speed, -1.0, 1.0));
        res.retardation_margin = (t - *tau) - g.r / c;
        res.gate_argument = detail::cherenkov_gate_argument(velocity, opt.origin, x, t, speed / c);
        res.contribution.gate = res.gate_argument > 0.0;
        res.contribution.retarded_time = t - *tau;
        res.contribution.instantaneous_frequency = sp.omega_s;
        res.contribution.doppler_shift = sp.omega_s;
        res.reason = ErrorCode::DegeneratePoint;
        return res;
    }

    res.dispersive = true;
    auto system = [&](const Vec2& p) {
        const auto med = sample(dispersion, Frequency{p[0]});
        require(med.propagating, ErrorCode::EvanescentRegime, "outside band");
        const auto g = geometry(traj, x, p[1]);
        const double k = med.k.real();
        const double c = med.v_phase;
        const double dc = (1.0 - c / med.v_group) / k;
        return Linearization{{g.v_rad - c, g.r / med.v_group - (t - p[1])},
                             {{{-dc, g.dv_rad_dtau}, {g.r * med.k_second, 1.0 - g.v_rad / med.v_group}}}};
    };
    auto inside = [&](const Vec2& p) {
        return std::isfinite(p[1]) && detail::propagating_at(dispersion, p[0]);
    };

    const double lo = opt.band.omega_lo > 0.0 ? opt.band.omega_lo : 1e-3;
    const double hi = opt.band.omega_hi > 0.0 ? opt.band.omega_hi : 20.0;
    std::optional<NewtonResult> best;
    for (int i = 0; i < opt.band_seeds && !best; ++i) {
        const double w = lo + (hi - lo) * (i + 0.5) / opt.band_seeds;
        if (!detail::propagating_at(dispersion, w)) {
            continue;
        }
        const auto med = sample(dispersion, Frequency{w});
        if (!(med.v_phase > 0.0 && med.v_phase < speed)) {
            continue;
        }
        const auto tau = detail::cone_emission_time(traj, x, med.v_phase, t);
        if (!tau) {
            continue;
        }
        const auto nr = damped_newton(system, Vec2{w, *tau}, inside, opt.newton);
        if (nr.converged()) {
            best = nr;
        }
    }
    if (!best) {
        res.reason = ErrorCode::NoCherenkovRoot;
        return res;
    }

    const double omega = best->x[0];
    const double tau = best->x[1];
    const auto med = sample(dispersion, Frequency{omega});
    const auto g = geometry(traj, x, tau);
    res.cone_angle = std::acos(std::clamp(g.v_rad / speed, -1.0, 1.0));
    res.retardation_margin = (t - tau) - g.r / med.v_group;
    res.gate_argument =
        detail::cherenkov_gate_argument(velocity, opt.origin, x, t, speed / med.v_group);

    auto sp = detail::finish(ctx, omega, tau, SolveMethod::Newton, best->iterations,
                             std::numeric_limits<double>::infinity());
    sp.residual_norm = best->residual_norm;
    sp.converged = true;
    SourceModel charge = source;
    charge.omega0 = 0.0;
    charge.envelope = [q = source.charge](double) { return q; };
    res.contribution = field_contribution(charge, ctx, sp);
    res.contribution.gate = res.gate_argument > 0.0;
    if (!res.contribution.gate) {
        res.contribution.H = {};
        res.contribution.E = {};
    }
    if (sp.degenerate) {
        res.reason = ErrorCode::DegeneratePoint;
    }
    return res;
}

} // namespace statphase
