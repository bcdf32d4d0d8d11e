#pragma once

/**
 * Direct evaluation of two-dimensional oscillatory integrals
 *
 *   I = lim_{R -> inf} int amplitude(w, t) chi(|u| / R) exp(i lambda S(w, t)) dw dt,
 *
 * with u = (w, t) - centre and a smooth radial cutoff chi, plus the
 * integration-by-parts regularization of the amplitude and a convergence study
 * of the leading-order stationary-phase formula.
 */

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "statphase/error.hpp"
#include "statphase/newton.hpp"
#include "statphase/stationary_phase.hpp"
#include "statphase/taylor2.hpp"

namespace statphase {

struct OscillatoryIntegrand
{
    std::function<std::complex<double>(double, double)> amplitude;
    std::function<double(double, double)> phase;
    double lambda = 1.0;
    double growth_order = 0.0;  ///< polynomial growth of the amplitude

    /// Optional jets, required by ibp_regularize.
    JetFn amplitude_jet;
    JetFn phase_jet;
};

/**
 * Radial cutoff profiles, both equal to 1 for s <= 1/2 and 0 for s >= 1. With
 * y = 2 s - 1 the transition is psi(1 - y) / (psi(1 - y) + psi(y)) where
 * psi(x) = exp(-1/x) (Exponential) or exp(-1/x^2) (ExponentialSquared).
 */
enum class BumpProfile { Exponential, ExponentialSquared };

inline double bump(double s, BumpProfile profile) noexcept
{
    if (s <= 0.5) {
        return 1.0;
    }
    if (s >= 1.0) {
        return 0.0;
    }
    auto psi = [profile](double x) {
        return profile == BumpProfile::Exponential ? std::exp(-1.0 / x) : std::exp(-1.0 / (x * x));
    };
    const double y = 2.0 * s - 1.0;
    const double a = psi(1.0 - y);
    return a / (a + psi(y));
}

struct OracleOptions
{
    BumpProfile profile = BumpProfile::Exponential;
    std::array<double, 2> centre{0.0, 0.0};
    int blocks_per_axis = 32;
    double points_per_oscillation = 12.0;
    /// Panels are sized as if |grad S| were at least this, so the 1/lambda scale is resolved near stationary points.
    double min_slope = 4.0;
    double skip_relative = 1e-9;  ///< blocks below this fraction of the peak |amplitude chi| are skipped
    int max_doublings = 10;
    unsigned threads = 1;
};

struct OracleResult
{
    std::complex<double> value;
    double R_used = 0.0;
    double estimated_error = 0.0;
    int doublings = 0;
    long long evaluations = 0;
};

namespace detail {

inline constexpr int kGaussOrder = 10;

struct GaussRule
{
    std::array<double, kGaussOrder> node;
    std::array<double, kGaussOrder> weight;
};

inline const GaussRule& gauss_rule()
{
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, kGaussOrder>;
        GaussRule r{};
        const auto& x = G::abscissa();
        const auto& w = G::weights();
        constexpr int half = kGaussOrder / 2;
        for (int i = 0; i < half; ++i) {
            r.node[half - 1 - i] = -x[i];
            r.weight[half - 1 - i] = w[i];
            r.node[half + i] = x[i];
            r.weight[half + i] = w[i];
        }
        return r;
    }();
    return rule;
}

struct Block
{
    double w0, w1, t0, t1;
};

struct BlockPlan
{
    Block box;
    int panels_w = 0;
    int panels_t = 0;
    bool skip = false;
};

/// Integral of the cut-off integrand over the square of half-width R.
inline std::pair<std::complex<double>, long long> cutoff_integral(const OscillatoryIntegrand& ig,
                                                                  double R,
                                                                  const OracleOptions& opt)
{
    const int nb = opt.blocks_per_axis;
    const double width = 2.0 * R / nb;
    const auto [cw, ct] = opt.centre;
    const double lam = ig.lambda;
    constexpr int probe = 5;

    auto phase_checked = [&](double w, double t) {
        const double s = ig.phase(w, t);
        require(std::isfinite(s), ErrorCode::PhaseComplexOnBox,
                "phase is not a finite real number on the integration box");
        return s;
    };

    // Probe each block on a small grid: peak weight for skipping and the
    // largest phase slope along each axis for panel sizing.
    std::vector<BlockPlan> plans(static_cast<size_t>(nb * nb));
    std::vector<double> peak(plans.size(), 0.0);
    double global_peak = 0.0;
    for (int bi = 0; bi < nb; ++bi) {
        for (int bj = 0; bj < nb; ++bj) {
            auto& plan = plans[static_cast<size_t>(bi * nb + bj)];
            plan.box = {cw - R + bi * width, cw - R + (bi + 1) * width, ct - R + bj * width,
                        ct - R + (bj + 1) * width};
            const double hw = 1e-6 * std::max(1.0, width);
            double slope_w = 0.0;
            double slope_t = 0.0;
            double p = 0.0;
            for (int a = 0; a < probe; ++a) {
                for (int b = 0; b < probe; ++b) {
                    const double w = plan.box.w0 + (plan.box.w1 - plan.box.w0) * a / (probe - 1);
                    const double t = plan.box.t0 + (plan.box.t1 - plan.box.t0) * b / (probe - 1);
                    const double s = std::hypot(w - cw, t - ct) / R;
                    p = std::max(p, std::abs(ig.amplitude(w, t)) * bump(std::max(0.0, s - 1.0 / nb), opt.profile));
                    slope_w = std::max(slope_w, std::abs(phase_checked(w + hw, t) - phase_checked(w - hw, t)) / (2 * hw));
                    slope_t = std::max(slope_t, std::abs(phase_checked(w, t + hw) - phase_checked(w, t - hw)) / (2 * hw));
                }
            }
            peak[static_cast<size_t>(bi * nb + bj)] = p;
            global_peak = std::max(global_peak, p);
            auto panels = [&](double slope) {
                const double oscillations = width * lam * std::max(slope, opt.min_slope) / (2.0 * std::numbers::pi);
                return std::max(1, static_cast<int>(std::ceil(oscillations * opt.points_per_oscillation / kGaussOrder)));
            };
            plan.panels_w = panels(slope_w);
            plan.panels_t = panels(slope_t);
        }
    }
    for (size_t k = 0; k < plans.size(); ++k) {
        plans[k].skip = peak[k] <= opt.skip_relative * global_peak;
    }

    const auto& rule = gauss_rule();
    std::vector<std::complex<double>> partial(plans.size());
    std::vector<long long> counts(plans.size(), 0);
    auto integrate_block = [&](size_t k) {
        const auto& plan = plans[k];
        if (plan.skip) {
            return;
        }
        const double dw = (plan.box.w1 - plan.box.w0) / plan.panels_w;
        const double dt = (plan.box.t1 - plan.box.t0) / plan.panels_t;
        std::complex<double> sum = 0.0;
        for (int pw = 0; pw < plan.panels_w; ++pw) {
            const double wmid = plan.box.w0 + (pw + 0.5) * dw;
            for (int pt = 0; pt < plan.panels_t; ++pt) {
                const double tmid = plan.box.t0 + (pt + 0.5) * dt;
                std::complex<double> panel = 0.0;
                for (int a = 0; a < kGaussOrder; ++a) {
                    const double w = wmid + 0.5 * dw * rule.node[a];
                    std::complex<double> row = 0.0;
                    for (int b = 0; b < kGaussOrder; ++b) {
                        const double t = tmid + 0.5 * dt * rule.node[b];
                        const double chi = bump(std::hypot(w - cw, t - ct) / R, opt.profile);
                        if (chi == 0.0) {
                            continue;
                        }
                        row += rule.weight[b] * chi * ig.amplitude(w, t) *
                               std::polar(1.0, lam * phase_checked(w, t));
                    }
                    panel += rule.weight[a] * row;
                }
                sum += panel;
            }
        }
        partial[k] = sum * (0.25 * dw * dt);
        counts[k] = static_cast<long long>(plan.panels_w) * plan.panels_t * kGaussOrder * kGaussOrder;
    };

    const unsigned workers = std::max(1u, opt.threads);
    if (workers == 1) {
        for (size_t k = 0; k < plans.size(); ++k) {
            integrate_block(k);
        }
    } else {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> failures(workers);
        for (unsigned id = 0; id < workers; ++id) {
            pool.emplace_back([&, id] {
                try {
                    for (size_t k = id; k < plans.size(); k += workers) {
                        integrate_block(k);
                    }
                } catch (...) {
                    failures[id] = std::current_exception();
                }
            });
        }
        pool.clear();
        for (const auto& f : failures) {
            if (f) {
                std::rethrow_exception(f);
            }
        }
    }

    // Fixed summation order keeps the result independent of the thread count.
    std::complex<double> total = 0.0;
    long long evaluations = 0;
    for (size_t k = 0; k < plans.size(); ++k) {
        total += partial[k];
        evaluations += counts[k];
    }
    return {total, evaluations};
}

} // namespace detail

/**
 * Doubles R from R0 until two successive cut-off integrals differ by less
 * than tol relative to the newer value. Panels are Gauss-Legendre tensor
 * rules sized for at least `points_per_oscillation` nodes per local period of
 * lambda S along each axis.
 */
inline OracleResult oscillatory_integral_2d(const OscillatoryIntegrand& ig, double R0, double tol,
                                           const OracleOptions& opt = {})
{
    require(R0 > 0.0 && tol > 0.0, ErrorCode::InvalidArgument, "R0 and tol must be positive");
    require(ig.lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
    require(static_cast<bool>(ig.amplitude) && static_cast<bool>(ig.phase),
            ErrorCode::InvalidArgument, "integrand needs amplitude and phase");
    require(opt.blocks_per_axis >= 1 && opt.points_per_oscillation > 0.0 && opt.min_slope >= 0.0,
            ErrorCode::InvalidArgument, "invalid quadrature options");

    OracleResult res;
    double R = R0;
    auto [previous, evals] = detail::cutoff_integral(ig, R, opt);
    res.evaluations = evals;
    for (int d = 1; d <= opt.max_doublings; ++d) {
        R *= 2.0;
        auto [current, more] = detail::cutoff_integral(ig, R, opt);
        res.evaluations += more;
        const double diff = std::abs(current - previous);
        if (diff < tol * std::max(std::abs(current), std::numeric_limits<double>::min())) {
            res.value = current;
            res.R_used = R;
            res.estimated_error = diff;
            res.doublings = d;
            return res;
        }
        previous = current;
    }
    throw Error(ErrorCode::NoConvergenceInR, "cut-off integrals did not settle by R = 1024 R0");
}

namespace detail {

/// One application of L^T u = u / g + i div(u grad(Phi) / g), g = 1 + |grad Phi|^2; lowers the order by one.
inline Taylor2 ibp_step(const Taylor2& u, const Taylor2& Phi)
{
    const int m = u.order();
    const Taylor2 phi = Phi.truncated(m + 1);
    const Taylor2 px = phi.derivative(0);
    const Taylor2 py = phi.derivative(1);
    const Taylor2 g = px * px + py * py + 1.0;
    const Taylor2 vx = u * px / g;
    const Taylor2 vy = u * py / g;
    const std::complex<double> i(0.0, 1.0);
    return (u / g).truncated(m - 1) + i * (vx.derivative(0) + vy.derivative(1));
}

} // namespace detail

/**
 * Replaces the amplitude f by (L^T)^j f, where L = (1 - i grad Phi . grad) / (1 + |grad Phi|^2)
 * and Phi = lambda S, so that L e^{i Phi} = e^{i Phi}. Each application gains
 * one power of |grad S|^{-1} in decay. Needs both jets; refuses phases whose
 * gradient vanishes on large circles around the origin.
 */
inline OscillatoryIntegrand ibp_regularize(const OscillatoryIntegrand& ig, int j)
{
    require(j >= 1, ErrorCode::InvalidArgument, "need at least one application");
    require(static_cast<bool>(ig.amplitude_jet) && static_cast<bool>(ig.phase_jet),
            ErrorCode::InvalidArgument, "regularization needs amplitude and phase jets");

    for (const double radius : {1e2, 1e3}) {
        double weakest = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 64; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 64;
            const Taylor2 s = ig.phase_jet(radius * std::cos(a), radius * std::sin(a), 1);
            weakest = std::min(weakest, std::hypot(std::abs(s(1, 0)), std::abs(s(0, 1))));
        }
        require(weakest > 1e-8, ErrorCode::GradientVanishesUnbounded,
                "phase gradient vanishes far from the origin");
    }

    OscillatoryIntegrand out = ig;
    const double lam = ig.lambda;
    out.amplitude_jet = [f = ig.amplitude_jet, S = ig.phase_jet, lam, j](double x, double y, int order) {
        Taylor2 u = f(x, y, order + j);
        const Taylor2 Phi = S(x, y, order + j + 1) * lam;
        for (int step = 0; step < j; ++step) {
            u = detail::ibp_step(u, Phi);
        }
        return u;
    };
    out.amplitude = [jet = out.amplitude_jet](double x, double y) { return jet(x, y, 0).value(); };
    out.growth_order = ig.growth_order - j;
    return out;
}

/// Scalar model integral with one known non-degenerate stationary point.
struct ModelCase
{
    std::string name;
    std::function<double(double, double)> phase;
    std::function<std::complex<double>(double, double)> amplitude;
    Vec2 stationary_point{};
    Mat2 hessian{};
    double R0 = 8.0;
    /// Exact value of the integral at a given lambda when known in closed form.
    std::function<std::complex<double>(double)> exact;

    /// S = w t, amplitude (1 + w)(1 + t) exp(-(w^2 + t^2)/2); leading-order error ~ 1/lambda.
    static ModelCase gaussian_saddle()
    {
        ModelCase m;
        m.name = "gaussian-saddle";
        m.phase = [](double w, double t) { return w * t; };
        m.amplitude = [](double w, double t) {
            return std::complex<double>((1.0 + w) * (1.0 + t) * std::exp(-0.5 * (w * w + t * t)));
        };
        m.hessian = {{{0.0, 1.0}, {1.0, 0.0}}};
        m.R0 = 12.0;
        m.exact = [](double lam) {
            const double q = 1.0 + lam * lam;
            return std::complex<double>(2.0 * std::numbers::pi / std::sqrt(q),
                                        2.0 * std::numbers::pi * lam / (q * std::sqrt(q)));
        };
        return m;
    }

    /// S = w t, amplitude exp(-(w^2 + t^2)/2); leading-order error ~ 1/(2 lambda^2).
    static ModelCase gaussian_product_saddle()
    {
        ModelCase m = gaussian_saddle();
        m.name = "gaussian-product-saddle";
        m.amplitude = [](double w, double t) {
            return std::complex<double>(std::exp(-0.5 * (w * w + t * t)));
        };
        m.exact = [](double lam) {
            return std::complex<double>(2.0 * std::numbers::pi / std::sqrt(1.0 + lam * lam));
        };
        return m;
    }

    /// S = (w^2 + t^2)/2, amplitude 1: the leading term 2 pi i / lambda is exact.
    static ModelCase fresnel()
    {
        ModelCase m;
        m.name = "fresnel";
        m.phase = [](double w, double t) { return 0.5 * (w * w + t * t); };
        m.amplitude = [](double, double) { return std::complex<double>(1.0); };
        m.hessian = {{{1.0, 0.0}, {0.0, 1.0}}};
        m.R0 = 2.0;
        m.exact = [](double lam) { return std::complex<double>(0.0, 2.0 * std::numbers::pi / lam); };
        return m;
    }
};

struct RateRow
{
    double lambda = 0.0;
    std::complex<double> asymptotic;
    std::complex<double> oracle;
    double relative_error = 0.0;
    double seconds = 0.0;
};

struct RateStudy
{
    std::vector<RateRow> rows;
    double slope = 0.0;               ///< least-squares slope of log error against log lambda
    std::vector<double> ratios;       ///< error(lambda_i) / error(lambda_{i+1})
};

inline RateStudy convergence_rate_study(const ModelCase& model, const std::vector<double>& lambdas,
                                        double tol = 1e-9, const OracleOptions& opt = {})
{
    require(lambdas.size() >= 3, ErrorCode::InvalidArgument, "need at least three lambdas");
    require(std::is_sorted(lambdas.begin(), lambdas.end()) && lambdas.front() > 0.0,
            ErrorCode::InvalidArgument, "lambdas must be positive and increasing");

    RateStudy study;
    const auto [w, t] = model.stationary_point;
    for (const double lam : lambdas) {
        RateRow row;
        row.lambda = lam;
        const auto start = std::chrono::steady_clock::now();
        row.asymptotic = contribution(lam, model.phase(w, t), model.hessian, model.amplitude(w, t));
        OscillatoryIntegrand ig{model.amplitude, model.phase, lam, 0.0, {}, {}};
        OracleOptions local = opt;
        local.centre = {w, t};
        row.oracle = oscillatory_integral_2d(ig, model.R0, tol, local).value;
        row.relative_error = std::abs(row.asymptotic - row.oracle) / std::abs(row.oracle);
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        study.rows.push_back(row);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(study.rows.size());
    for (const auto& row : study.rows) {
        const double x = std::log(row.lambda);
        const double y = std::log(row.relative_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    study.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    for (size_t i = 0; i + 1 < study.rows.size(); ++i) {
        study.ratios.push_back(study.rows[i].relative_error / study.rows[i + 1].relative_error);
    }
    return study;
}

} // namespace statphase
