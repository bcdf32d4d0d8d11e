#pragma once

/**
 * Frequency-dependent material response.
 *
 * Three media are supported: a non-dispersive dielectric, a lossless cold
 * plasma and a single-resonance Lorentz metamaterial. All quantities live in
 * the normalized unit system of `Normalization` where c0 = eps0 = mu0 = 1,
 * lengths are measured in l0 and times in l0/c0. Frequencies are angular.
 */

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <variant>

#include "statphase/error.hpp"

namespace statphase {

using cplx = std::complex<double>;

/// Physical scales behind the normalized units (SI).
struct Normalization
{
    double length_scale = 75e-9;          ///< l0 in meters
    double velocity_scale = 299792458.0;  ///< c0 in m/s

    double time_scale() const noexcept { return length_scale / velocity_scale; }
    /// Reference angular frequency Omega = c0 / l0 (rad/s); normalized omega = omega_SI / Omega.
    double frequency_scale() const noexcept { return velocity_scale / length_scale; }

    double omega_from_thz(double f_thz) const noexcept
    {
        return 2.0 * std::numbers::pi * f_thz * 1e12 / frequency_scale();
    }
    double thz_from_omega(double omega) const noexcept
    {
        return omega * frequency_scale() / (2.0 * std::numbers::pi * 1e12);
    }

    void validate() const
    {
        require(length_scale > 0.0 && std::isfinite(length_scale) && velocity_scale > 0.0 &&
                    std::isfinite(velocity_scale),
                ErrorCode::InvalidArgument, "normalization scales must be positive");
    }
};

/// Angular frequency in normalized units.
struct Frequency
{
    double value = 0.0;

    static Frequency from_thz(double f_thz, const Normalization& norm = {})
    {
        return Frequency{norm.omega_from_thz(f_thz)};
    }
    double to_thz(const Normalization& norm = {}) const { return norm.thz_from_omega(value); }
};

struct NonDispersive
{
    double eps = 1.0;
    double mu = 1.0;
};

/// Lossless, unmagnetized plasma: eps = 1 - omega_p^2 / omega^2, mu = 1.
struct ColdPlasma
{
    double omega_p = 0.0;
};

/// Single-resonance Lorentz permittivity and permeability.
struct LorentzMetamaterial
{
    double omega_pe = 0.0;
    double omega_te = 0.0;
    double gamma_e = 0.0;
    double omega_pm = 0.0;
    double omega_tm = 0.0;
    double gamma_m = 0.0;

    /// All arguments are ordinary frequencies in THz; each is mapped through omega = 2 pi f.
    static LorentzMetamaterial from_thz(double f_pe, double gamma_e_thz, double f_te, double f_pm,
                                        double gamma_m_thz, double f_tm,
                                        const Normalization& norm = {})
    {
        return {norm.omega_from_thz(f_pe), norm.omega_from_thz(f_te),
                norm.omega_from_thz(gamma_e_thz), norm.omega_from_thz(f_pm),
                norm.omega_from_thz(f_tm), norm.omega_from_thz(gamma_m_thz)};
    }

    /// The negative-index reference medium (Re n < 0 roughly between 410 and 433 THz).
    static LorentzMetamaterial reference(const Normalization& norm = {})
    {
        return from_thz(298.42, 0.04, 409.82, 171.09, 0.04, 397.89, norm);
    }
};

class DispersionModel
{
  public:
    using Kind = std::variant<NonDispersive, ColdPlasma, LorentzMetamaterial>;

    DispersionModel() : DispersionModel(NonDispersive{}) {}
    DispersionModel(Kind kind, bool neglect_imaginary = true)
        : kind_(kind), neglect_imaginary_(neglect_imaginary)
    {
        validate();
    }

    const Kind& kind() const noexcept { return kind_; }
    bool neglect_imaginary() const noexcept { return neglect_imaginary_; }

    template <class T>
    bool is() const noexcept
    {
        return std::holds_alternative<T>(kind_);
    }
    template <class T>
    const T& as() const
    {
        return std::get<T>(kind_);
    }

  private:
    void validate() const
    {
        std::visit(
            [](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, NonDispersive>) {
                    require(m.eps > 0.0 && m.mu > 0.0, ErrorCode::InvalidArgument,
                            "non-dispersive medium needs eps > 0 and mu > 0");
                } else if constexpr (std::is_same_v<T, ColdPlasma>) {
                    require(m.omega_p >= 0.0 && std::isfinite(m.omega_p),
                            ErrorCode::InvalidArgument, "plasma frequency must be >= 0");
                } else {
                    require(m.omega_te > 0.0 && m.omega_tm > 0.0, ErrorCode::InvalidArgument,
                            "Lorentz resonance frequencies must be positive");
                    require(m.omega_pe >= 0.0 && m.omega_pm >= 0.0 && m.gamma_e >= 0.0 &&
                                m.gamma_m >= 0.0,
                            ErrorCode::InvalidArgument,
                            "Lorentz coupling strengths and losses must be >= 0");
                }
            },
            kind_);
    }

    Kind kind_;
    bool neglect_imaginary_ = true;
};

enum class KSecondMethod { Analytic, FiniteDifference };

struct DispersionSample
{
    cplx eps;
    cplx mu;
    cplx n;
    cplx k;  ///< wavenumber; purely imaginary outside the propagating band
    double v_phase = std::numeric_limits<double>::quiet_NaN();
    double v_group = std::numeric_limits<double>::quiet_NaN();
    double k_second = std::numeric_limits<double>::quiet_NaN();  ///< d^2 k / d omega^2
    bool propagating = false;

    KSecondMethod k_second_method = KSecondMethod::Analytic;
    double k_second_step = 0.0;  ///< finite-difference step when k_second_method is FiniteDifference

    double group_velocity() const
    {
        require(propagating, ErrorCode::EvanescentRegime, "group velocity requested outside band");
        return v_group;
    }
    double phase_velocity() const
    {
        require(propagating, ErrorCode::EvanescentRegime, "phase velocity requested outside band");
        return v_phase;
    }
    /// dk/domega = 1 / v_group.
    double k_prime() const { return 1.0 / group_velocity(); }
};

namespace detail {

inline void check_frequency(Frequency omega)
{
    require(std::isfinite(omega.value), ErrorCode::InvalidArgument, "frequency must be finite");
}

/// Single Lorentz resonance 1 + a^2 / (w0^2 - w^2 - i w g) and its first two derivatives.
struct Resonance
{
    cplx value;
    cplx d1;
    cplx d2;
};

inline Resonance lorentz_resonance(double a, double w0, double g, double w)
{
    const cplx den(w0 * w0 - w * w, -w * g);
    const cplx dden(-2.0 * w, -g);
    const double a2 = a * a;
    return {1.0 + a2 / den, -a2 * dden / (den * den),
            -a2 * (-2.0 * den - 2.0 * dden * dden) / (den * den * den)};
}

struct Response
{
    Resonance eps;
    Resonance mu;
};

inline Response response(const DispersionModel& model, double w)
{
    return std::visit(
        [w](const auto& m) -> Response {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NonDispersive>) {
                return {{m.eps, 0.0, 0.0}, {m.mu, 0.0, 0.0}};
            } else if constexpr (std::is_same_v<T, ColdPlasma>) {
                require(w != 0.0, ErrorCode::ZeroFrequency, "plasma permittivity at omega = 0");
                const double p2 = m.omega_p * m.omega_p;
                return {{1.0 - p2 / (w * w), 2.0 * p2 / (w * w * w), -6.0 * p2 / (w * w * w * w)},
                        {1.0, 0.0, 0.0}};
            } else {
                return {lorentz_resonance(m.omega_pe, m.omega_te, m.gamma_e, w),
                        lorentz_resonance(m.omega_pm, m.omega_tm, m.gamma_m, w)};
            }
        },
        model.kind());
}

} // namespace detail

inline cplx permittivity(const DispersionModel& model, Frequency omega)
{
    detail::check_frequency(omega);
    return detail::response(model, omega.value).eps.value;
}

inline cplx permeability(const DispersionModel& model, Frequency omega)
{
    detail::check_frequency(omega);
    if (model.is<ColdPlasma>()) {
        return 1.0;
    }
    return detail::response(model, omega.value).mu.value;
}

/**
 * Refraction index sqrt(|eps mu|) exp(i (arg eps + arg mu) / 2).
 *
 * Both arguments are principal values in (-pi, pi], so a medium with
 * Re eps < 0, Re mu < 0 and small positive losses gets Re n < 0.
 */
inline cplx refraction_index(cplx eps, cplx mu)
{
    require(eps != 0.0 && mu != 0.0, ErrorCode::DegenerateMedium, "eps or mu vanishes");
    return std::polar(std::sqrt(std::abs(eps) * std::abs(mu)),
                      0.5 * (std::arg(eps) + std::arg(mu)));
}

inline cplx refraction_index(const DispersionModel& model, Frequency omega)
{
    return refraction_index(permittivity(model, omega), permeability(model, omega));
}

namespace detail {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

inline DispersionSample sample_nondispersive(const NonDispersive& m, double w)
{
    DispersionSample s;
    s.eps = m.eps;
    s.mu = m.mu;
    s.n = std::sqrt(m.eps * m.mu);
    s.k = w * s.n;
    s.v_phase = 1.0 / s.n.real();
    s.v_group = s.v_phase;
    s.k_second = 0.0;
    s.propagating = (w != 0.0);
    return s;
}

inline DispersionSample sample_plasma(const ColdPlasma& m, double w)
{
    require(w != 0.0, ErrorCode::ZeroFrequency, "plasma sample at omega = 0");
    DispersionSample s;
    const double p2 = m.omega_p * m.omega_p;
    s.eps = 1.0 - p2 / (w * w);
    s.mu = 1.0;
    const double k2 = w * w - p2;
    if (k2 > 0.0) {
        // k is taken odd in omega so that dk/domega > 0 on both half-lines.
        const double k = std::copysign(std::sqrt(k2), w);
        s.k = k;
        s.n = k / w;
        s.v_phase = w / k;
        s.v_group = k / w;
        s.k_second = -p2 / (k * k * k);
        s.propagating = true;
    } else {
        s.k = cplx(0.0, std::sqrt(-k2));
        s.n = s.k / w;
        s.propagating = false;
    }
    return s;
}

inline DispersionSample sample_lorentz(const DispersionModel& model, double w)
{
    const auto r = response(model, w);
    DispersionSample s;
    s.eps = r.eps.value;
    s.mu = r.mu.value;
    s.n = refraction_index(s.eps, s.mu);

    const double k2 = w * w * s.eps.real() * s.mu.real();
    s.propagating = (k2 > 0.0);
    if (!s.propagating) {
        s.k = cplx(0.0, std::sqrt(std::abs(k2)));
        return s;
    }

    // n^2 = eps mu on the chosen branch, so n' = P' / 2n and n'' = (P'' - 2 n'^2) / 2n.
    const cplx p1 = r.eps.d1 * s.mu + s.eps * r.mu.d1;
    const cplx p2 = r.eps.d2 * s.mu + 2.0 * r.eps.d1 * r.mu.d1 + s.eps * r.mu.d2;
    const cplx n1 = p1 / (2.0 * s.n);
    const cplx n2 = (p2 - 2.0 * n1 * n1) / (2.0 * s.n);

    double k_prime = 0.0;
    if (model.neglect_imaginary()) {
        s.k = w * s.n.real();
        k_prime = s.n.real() + w * n1.real();
        s.k_second = 2.0 * n1.real() + w * n2.real();
    } else {
        s.k = w * s.n;
        k_prime = (s.n + w * n1).real();
        s.k_second = (2.0 * n1 + w * n2).real();
    }
    s.v_phase = 1.0 / s.n.real();
    s.v_group = 1.0 / k_prime;
    return s;
}

} // namespace detail

/// Evaluate every spectral quantity of the medium at one frequency.
inline DispersionSample sample(const DispersionModel& model, Frequency omega)
{
    detail::check_frequency(omega);
    const double w = omega.value;
    return std::visit(
        [&](const auto& m) -> DispersionSample {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NonDispersive>) {
                return detail::sample_nondispersive(m, w);
            } else if constexpr (std::is_same_v<T, ColdPlasma>) {
                return detail::sample_plasma(m, w);
            } else {
                return detail::sample_lorentz(model, w);
            }
        },
        model.kind());
}

/**
 * k'' by central differences of the analytic k' = 1/v_g, relative step
 * 1e-6 with one Richardson level. Used as a cross-check of the analytic value.
 */
inline DispersionSample sample_with_fd_k_second(const DispersionModel& model, Frequency omega)
{
    DispersionSample s = sample(model, omega);
    if (!s.propagating) {
        return s;
    }
    const double w = omega.value;
    const double h = 1e-6 * std::max(std::abs(w), std::numeric_limits<double>::min());
    auto central = [&](double step) {
        const double kp_plus = sample(model, Frequency{w + step}).k_prime();
        const double kp_minus = sample(model, Frequency{w - step}).k_prime();
        return (kp_plus - kp_minus) / (2.0 * step);
    };
    const double coarse = central(h);
    const double fine = central(0.5 * h);
    s.k_second = (4.0 * fine - coarse) / 3.0;
    s.k_second_method = KSecondMethod::FiniteDifference;
    s.k_second_step = h;
    return s;
}

} // namespace statphase
