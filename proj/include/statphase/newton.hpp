#pragma once

/**
 * Damped Newton iteration for square 2x2 nonlinear systems.
 */

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "statphase/error.hpp"

namespace statphase {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& m) noexcept
{
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

inline double frobenius(const Mat2& m) noexcept
{
    return std::sqrt(m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] +
                     m[1][1] * m[1][1]);
}

inline double norm(const Vec2& v) noexcept
{
    return std::hypot(v[0], v[1]);
}

struct NewtonOptions
{
    double tol = 1e-10;
    int max_iter = 100;
    double armijo = 1e-4;
    int max_halvings = 40;
};

enum class NewtonStatus { Converged, MaxIterations, LineSearchStalled, LeftDomain, EvaluationFailed };

struct NewtonResult
{
    Vec2 x{};
    Vec2 residual{};
    Mat2 jacobian{};
    double residual_norm = 0.0;
    int iterations = 0;
    int projections = 0;
    NewtonStatus status = NewtonStatus::MaxIterations;
    ErrorCode failure = ErrorCode::None;

    bool converged() const noexcept { return status == NewtonStatus::Converged; }
};

struct Linearization
{
    Vec2 value;
    Mat2 jacobian;
};

/**
 * Minimizes the merit 0.5 |F|^2 along Newton directions with Armijo
 * backtracking. A singular Jacobian switches to the steepest-descent direction
 * -J^T F. `system(x)` returns F and J; it may throw Error, which the line search
 * treats as an infeasible trial. `inside(x)` describes the admissible domain: a
 * full step leaving it is pulled back along the step once, and a second
 * consecutive exit ends the iteration with LeftDomain.
 */
template <class System, class Inside>
NewtonResult damped_newton(System&& system, Vec2 start, Inside&& inside,
                           const NewtonOptions& opt = {})
{
    require(opt.tol > 0.0 && opt.max_iter > 0, ErrorCode::InvalidArgument,
            "Newton needs tol > 0 and max_iter > 0");

    auto evaluate = [&](const Vec2& x) -> std::optional<Linearization> {
        if (!inside(x)) {
            return std::nullopt;
        }
        try {
            Linearization lin = system(x);
            if (!std::isfinite(lin.value[0]) || !std::isfinite(lin.value[1])) {
                return std::nullopt;
            }
            return lin;
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    NewtonResult res;
    res.x = start;
    auto current = evaluate(start);
    if (!current) {
        res.status = NewtonStatus::EvaluationFailed;
        res.failure = ErrorCode::LeftPropagatingBand;
        res.residual_norm = std::numeric_limits<double>::infinity();
        return res;
    }

    bool projected_last = false;
    for (int it = 0;; ++it) {
        res.residual = current->value;
        res.jacobian = current->jacobian;
        res.residual_norm = norm(current->value);
        res.iterations = it;
        if (res.residual_norm <= opt.tol) {
            res.status = NewtonStatus::Converged;
            return res;
        }
        if (it == opt.max_iter) {
            res.status = NewtonStatus::MaxIterations;
            res.failure = ErrorCode::NoConvergence;
            return res;
        }

        const Vec2& F = current->value;
        const Mat2& J = current->jacobian;
        const double d = det(J);
        Vec2 dir;
        double slope;  // directional derivative of the merit along dir
        if (std::abs(d) > 1e-14 * (frobenius(J) * frobenius(J)) && std::isfinite(d)) {
            dir = {-(J[1][1] * F[0] - J[0][1] * F[1]) / d, -(-J[1][0] * F[0] + J[0][0] * F[1]) / d};
            slope = -(F[0] * F[0] + F[1] * F[1]);
        } else {
            const Vec2 g{J[0][0] * F[0] + J[1][0] * F[1], J[0][1] * F[0] + J[1][1] * F[1]};
            dir = {-g[0], -g[1]};
            slope = -(g[0] * g[0] + g[1] * g[1]);
        }

        double alpha = 1.0;
        bool projected = false;
        if (!inside(Vec2{res.x[0] + dir[0], res.x[1] + dir[1]})) {
            if (projected_last) {
                res.status = NewtonStatus::LeftDomain;
                res.failure = ErrorCode::LeftPropagatingBand;
                return res;
            }
            projected = true;
            ++res.projections;
            while (alpha > 1e-12 && !inside(Vec2{res.x[0] + alpha * dir[0], res.x[1] + alpha * dir[1]})) {
                alpha *= 0.5;
            }
        }
        projected_last = projected;

        const double merit = 0.5 * (F[0] * F[0] + F[1] * F[1]);
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, alpha *= 0.5) {
            const Vec2 trial{res.x[0] + alpha * dir[0], res.x[1] + alpha * dir[1]};
            auto lin = evaluate(trial);
            if (!lin) {
                continue;
            }
            const double trial_merit =
                0.5 * (lin->value[0] * lin->value[0] + lin->value[1] * lin->value[1]);
            if (trial_merit <= merit + opt.armijo * alpha * slope) {
                res.x = trial;
                current = std::move(lin);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.status = NewtonStatus::LineSearchStalled;
            res.failure = ErrorCode::NoConvergence;
            res.iterations = it + 1;
            return res;
        }
    }
}

} // namespace statphase
