#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace statphase {

struct Vec3
{
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;

    constexpr Vec3& operator+=(const Vec3& o) noexcept
    {
        x1 += o.x1;
        x2 += o.x2;
        x3 += o.x3;
        return *this;
    }
    constexpr Vec3& operator-=(const Vec3& o) noexcept
    {
        x1 -= o.x1;
        x2 -= o.x2;
        x3 -= o.x3;
        return *this;
    }
    constexpr Vec3& operator*=(double s) noexcept
    {
        x1 *= s;
        x2 *= s;
        x3 *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(const Vec3& a) noexcept { return {-a.x1, -a.x2, -a.x3}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) noexcept { return a *= (1.0 / s); }
    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

    constexpr double operator[](int i) const noexcept { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
    constexpr double& operator[](int i) noexcept { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

    bool finite() const noexcept
    {
        return std::isfinite(x1) && std::isfinite(x2) && std::isfinite(x3);
    }
};

constexpr double dot(const Vec3& a, const Vec3& b) noexcept
{
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}

inline double norm(const Vec3& a) noexcept
{
    return std::hypot(a.x1, a.x2, a.x3);
}

/// Complex Cartesian 3-vector used for field amplitudes.
using CVec3 = std::array<std::complex<double>, 3>;

inline CVec3 scale(const Vec3& v, std::complex<double> s) noexcept
{
    return {s * v.x1, s * v.x2, s * v.x3};
}

inline double norm(const CVec3& a) noexcept
{
    return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]));
}

} // namespace statphase
