#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "statphase/trajectory.hpp"

using namespace statphase;

namespace {

double range(const Trajectory& traj, const Vec3& x, double tau) { return norm(x - traj.position(tau)); }

// grad f at x by central differences
template <class F>
Vec3 fd_gradient(F&& f, const Vec3& x, double h = 1e-5)
{
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 e{};
        e[i] = h;
        g[i] = (f(x + e) - f(x - e)) / (2 * h);
    }
    return g;
}

void expect_vec_near(const Vec3& a, const Vec3& b, double tol)
{
    const double scale = std::max(1.0, norm(b));
    EXPECT_LE(norm(a - b), tol * scale) << "(" << a.x1 << "," << a.x2 << "," << a.x3 << ") vs (" << b.x1
                                        << "," << b.x2 << "," << b.x3 << ")";
}

} // namespace

TEST(Geometry, HeadOnApproach)
{
    const auto g = geometry(Trajectory(OffsetLine{1.0, 0.0}), {0, 2, 0}, 1.0);
    EXPECT_DOUBLE_EQ(g.r, 1.0);
    EXPECT_DOUBLE_EQ(g.v_rad, 1.0);
}

TEST(Geometry, Receding)
{
    const auto g = geometry(Trajectory(OffsetLine{1.0, 0.0}), {0, 0, 0}, 1.0);
    EXPECT_DOUBLE_EQ(g.r, 1.0);
    EXPECT_DOUBLE_EQ(g.v_rad, -1.0);
}

TEST(Geometry, OffsetRange)
{
    EXPECT_DOUBLE_EQ(geometry(Trajectory(OffsetLine{0.0, 0.0}), {3, 4, 0}, 7.0).r, 5.0);
    const double v = 0.3, H = 0.7, tau = 1.1;
    const Vec3 x{0.2, -1.0, 2.0};
    const double expected = std::sqrt(x.x1 * x.x1 + std::pow(x.x2 - v * tau, 2) + std::pow(x.x3 - H, 2));
    EXPECT_NEAR(geometry(Trajectory(OffsetLine{v, H}), x, tau).r, expected, 1e-15);
}

TEST(Geometry, ObserverOnTrajectory)
{
    try {
        geometry(Trajectory(OffsetLine{0.5, 0.0}), {0, 1, 0}, 2.0);
        FAIL() << "expected ObserverOnTrajectory";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ObserverOnTrajectory);
    }
}

TEST(Geometry, RadialSpeedBounded)
{
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Trajectory traj(StraightLine{{u(rng), u(rng), u(rng)}, {0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng)}});
        const Vec3 x{u(rng), u(rng), u(rng)};
        const double tau = u(rng);
        if (range(traj, x, tau) < 1e-3) {
            continue;
        }
        const auto g = geometry(traj, x, tau);
        EXPECT_LE(std::abs(g.v_rad), norm(g.velocity) + 1e-12);
    }
}

TEST(Geometry, RadialSpeedDerivativeMatchesFiniteDifference)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int checked = 0;
    while (checked < 100) {
        const Trajectory traj = (checked % 2 == 0)
                                    ? Trajectory(StraightLine{{u(rng), u(rng), u(rng)},
                                                              {0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng)}})
                                    : Trajectory(OffsetLine{0.3 * u(rng), u(rng)});
        const Vec3 x{u(rng), u(rng), u(rng)};
        const double tau = u(rng);
        const double h = 1e-6 * std::max(1.0, std::abs(tau));
        if (range(traj, x, tau) < 0.1 || range(traj, x, tau - h) < 0.1) {
            continue;
        }
        const double fd = (geometry(traj, x, tau + h).v_rad - geometry(traj, x, tau - h).v_rad) / (2 * h);
        const double analytic = geometry(traj, x, tau).dv_rad_dtau;
        EXPECT_NEAR(analytic, fd, 1e-6 * std::max(1.0, std::abs(fd)));
        ++checked;
    }
}

TEST(Geometry, CustomPathNumericDerivatives)
{
    // circle of radius 2 in the x1-x2 plane, slow scale 1
    const Custom circle{[](double s) { return Vec3{2 * std::cos(s), 2 * std::sin(s), 0.0}; }, {}, {}, 1.0};
    const Custom exact{circle.position,
                       [](double s) { return Vec3{-2 * std::sin(s), 2 * std::cos(s), 0.0}; },
                       [](double s) { return Vec3{-2 * std::cos(s), -2 * std::sin(s), 0.0}; }, 1.0};
    const Vec3 x{0.5, -4.0, 1.0};
    const auto numeric = geometry(Trajectory(circle), x, 0.7);
    const auto analytic = geometry(Trajectory(exact), x, 0.7);
    EXPECT_TRUE(numeric.reduced_precision);
    EXPECT_FALSE(analytic.reduced_precision);
    EXPECT_NEAR(numeric.v_rad, analytic.v_rad, 1e-8);
    EXPECT_NEAR(numeric.dv_rad_dtau, analytic.dv_rad_dtau, 1e-6);
}

TEST(Geometry, CustomSlowScale)
{
    const double L = 10.0;
    const Custom line{[](double s) { return Vec3{0.0, 0.5 * s, 0.0}; },
                      [](double) { return Vec3{0.0, 0.5, 0.0}; },
                      [](double) { return Vec3{}; }, L};
    const Trajectory traj(line);
    // x0(tau) = L X0(tau / L) reproduces the straight line x0 = (0, 0.5 tau, 0)
    EXPECT_NEAR(traj.position(3.0).x2, 1.5, 1e-15);
    const auto a = geometry(traj, {1, 2, 0}, 3.0);
    const auto b = geometry(Trajectory(OffsetLine{0.5, 0.0}), {1, 2, 0}, 3.0);
    EXPECT_NEAR(a.v_rad, b.v_rad, 1e-15);
    EXPECT_NEAR(a.dv_rad_dtau, b.dv_rad_dtau, 1e-15);
}

TEST(AmplitudeGeometry, StaticSourceVanishes)
{
    const auto a = amplitude_geometry(Trajectory(OffsetLine{0.0, 0.3}), {1, 2, 3}, 0.5);
    EXPECT_EQ(a.curl_factor, Vec3{});
    EXPECT_EQ(a.graddiv_factor, Vec3{});
}

TEST(AmplitudeGeometry, UnitExample)
{
    const auto a = amplitude_geometry(Trajectory(OffsetLine{1.0, 0.0}), {1, 0, 0}, 0.0);
    expect_vec_near(a.curl_factor, {0, 0, 1}, 1e-15);
}

TEST(AmplitudeGeometry, OffsetLineComponentForms)
{
    const double v = 0.6, H = -0.4, tau = 0.9;
    const Vec3 x{0.8, 2.1, 0.5};
    const double d = x.x2 - v * tau, z = x.x3 - H;
    const double r = std::sqrt(x.x1 * x.x1 + d * d + z * z);
    const auto a = amplitude_geometry(Trajectory(OffsetLine{v, H}), x, tau);
    expect_vec_near(a.curl_factor, {-v * z / r, 0.0, v * x.x1 / r}, 1e-14);
    const double r3 = r * r * r;
    expect_vec_near(a.graddiv_factor, {-v * x.x1 * d / r3, v * (x.x1 * x.x1 + z * z) / r3, -v * z * d / r3},
                    1e-14);
    EXPECT_EQ(a.curl_factor.x2, 0.0);
}

TEST(AmplitudeGeometry, MatchesFiniteDifferencesOfRange)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 vel{0.4 * u(rng), 0.4 * u(rng), 0.4 * u(rng)};
        const Trajectory traj(StraightLine{{u(rng), u(rng), u(rng)}, vel});
        const Vec3 x{u(rng), u(rng), u(rng)};
        const double tau = u(rng);
        if (range(traj, x, tau) < 0.3) {
            continue;
        }
        const auto r = [&](const Vec3& p) { return range(traj, p, tau); };
        // curl(V r) = grad r x V
        const Vec3 curl = cross(fd_gradient(r, x), vel);
        // grad(V . grad r)
        const Vec3 graddiv = fd_gradient([&](const Vec3& p) { return dot(vel, fd_gradient(r, p, 1e-4)); }, x, 1e-3);
        const auto a = amplitude_geometry(traj, x, tau);
        expect_vec_near(a.curl_factor, curl, 1e-5);
        expect_vec_near(a.graddiv_factor, graddiv, 1e-5);
    }
}

TEST(AmplitudeGeometry, CustomPathNeedsOptIn)
{
    const Custom circle{[](double s) { return Vec3{std::cos(s), std::sin(s), 0.0}; }, {}, {}, 1.0};
    const Trajectory traj(circle);
    try {
        amplitude_geometry(traj, {0, 0, 2}, 0.3);
        FAIL() << "expected UnsupportedTrajectory";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedTrajectory);
    }
    const auto a = amplitude_geometry(traj, {0, 0, 2}, 0.3, true);
    EXPECT_TRUE(a.numeric);
    // instantaneous velocity, treated as constant at tau
    const Vec3 vel{-std::sin(0.3), std::cos(0.3), 0.0};
    const Vec3 u = (Vec3{0, 0, 2} - traj.position(0.3)) / norm(Vec3{0, 0, 2} - traj.position(0.3));
    expect_vec_near(a.curl_factor, cross(u, vel), 1e-6);
}

TEST(Trajectory, RejectsNonFinite)
{
    EXPECT_THROW(Trajectory(OffsetLine{std::nan(""), 0.0}), Error);
    EXPECT_THROW(Trajectory(Custom{}), Error);
}
