#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "statphase/dispersion.hpp"

using namespace statphase;

namespace {

const DispersionModel kLorentz{LorentzMetamaterial::reference()};

double omega_thz(double f) { return Normalization{}.omega_from_thz(f); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST(Normalization, ThzRoundTrip)
{
    const Normalization norm;
    EXPECT_NEAR(norm.thz_from_omega(norm.omega_from_thz(417.82)), 417.82, 1e-12);
    // 2 pi f l0 / c0
    EXPECT_NEAR(norm.omega_from_thz(400.0), 2 * std::numbers::pi * 400e12 * 75e-9 / 299792458.0, 1e-12);
    EXPECT_THROW((Normalization{-1.0, 1.0}.validate()), Error);
}

TEST(Permittivity, PlasmaValues)
{
    const DispersionModel plasma(ColdPlasma{1.0});
    EXPECT_DOUBLE_EQ(permittivity(plasma, Frequency{2.0}).real(), 0.75);
    EXPECT_EQ(permittivity(plasma, Frequency{1.0}), cplx(0.0));
    try {
        permittivity(plasma, Frequency{0.0});
        FAIL() << "expected ZeroFrequency";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroFrequency);
    }
}

TEST(Permittivity, LorentzLimits)
{
    EXPECT_LT(std::abs(permittivity(kLorentz, Frequency::from_thz(2 * std::numbers::pi * 1e6)) - 1.0), 1e-4);
    const double static_eps = 1.0 + std::pow(298.42 / 409.82, 2);
    EXPECT_LT(rel(permittivity(kLorentz, Frequency{1e-12}), cplx(static_eps)), 1e-12);
}

TEST(Permeability, Values)
{
    EXPECT_EQ(permeability(DispersionModel(ColdPlasma{1.0}), Frequency{3.7}), cplx(1.0));
    EXPECT_EQ(permeability(DispersionModel(NonDispersive{2.0, 3.0}), Frequency{5.0}), cplx(3.0));
    const double static_mu = 1.0 + std::pow(171.09 / 397.89, 2);
    EXPECT_LT(rel(permeability(kLorentz, Frequency{1e-12}), cplx(static_mu)), 1e-12);
}

TEST(Permittivity, LorentzMatchesResonanceFormula)
{
    const auto& m = kLorentz.as<LorentzMetamaterial>();
    const double w = omega_thz(415.0);
    const cplx expected =
        1.0 + m.omega_pe * m.omega_pe / cplx(m.omega_te * m.omega_te - w * w, -w * m.gamma_e);
    EXPECT_LT(rel(permittivity(kLorentz, Frequency{w}), expected), 1e-14);
}

TEST(RefractionIndex, Branches)
{
    EXPECT_EQ(refraction_index(cplx(1.0), cplx(1.0)), cplx(1.0));
    const cplx neg(-1.0, 1e-9);
    const cplx n = refraction_index(neg, neg);
    EXPECT_NEAR(n.real(), -1.0, 1e-12);
    EXPECT_LT(refraction_index(kLorentz, Frequency::from_thz(420.0)).real(), 0.0);
    try {
        refraction_index(cplx(0.0), cplx(1.0));
        FAIL() << "expected DegenerateMedium";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateMedium);
    }
}

TEST(RefractionIndex, SquareEqualsProduct)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    std::uniform_real_distribution<double> arg(-3.1, 3.1);
    for (int i = 0; i < 200; ++i) {
        const cplx eps = std::polar(mag(rng), arg(rng));
        const cplx mu = std::polar(mag(rng), arg(rng));
        const cplx n = refraction_index(eps, mu);
        EXPECT_LT(rel(n * n, eps * mu), 1e-12);
    }
}

TEST(RefractionIndex, LorentzNegativeBand)
{
    for (int i = 0; i < 100; ++i) {
        const double f = 410.0 + 22.0 * i / 99.0;
        EXPECT_LT(refraction_index(kLorentz, Frequency::from_thz(f)).real(), 0.0) << f;
    }
}

TEST(Sample, PlasmaVelocities)
{
    const auto s = sample(DispersionModel(ColdPlasma{1.0}), Frequency{2.0});
    EXPECT_TRUE(s.propagating);
    EXPECT_NEAR(s.v_phase, 2.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(s.v_group, std::sqrt(3.0) / 2.0, 1e-14);
    EXPECT_NEAR(s.v_phase * s.v_group, 1.0, 1e-14);
}

TEST(Sample, PlasmaVelocityProduct)
{
    const DispersionModel plasma(ColdPlasma{0.7});
    for (double w = 0.71; w < 20.0; w *= 1.3) {
        const auto s = sample(plasma, Frequency{w});
        EXPECT_NEAR(s.v_phase * s.v_group, 1.0, 1e-12) << w;
    }
}

TEST(Sample, PlasmaEvanescent)
{
    const auto s = sample(DispersionModel(ColdPlasma{1.0}), Frequency{0.6});
    EXPECT_FALSE(s.propagating);
    EXPECT_EQ(s.k.real(), 0.0);
    EXPECT_NEAR(std::abs(s.k.imag()), 0.8, 1e-14);
    try {
        (void)s.group_velocity();
        FAIL() << "expected EvanescentRegime";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EvanescentRegime);
    }
}

TEST(Sample, Vacuum)
{
    const auto s = sample(DispersionModel(NonDispersive{1.0, 1.0}), Frequency{3.3});
    EXPECT_EQ(s.v_phase, 1.0);
    EXPECT_EQ(s.v_group, 1.0);
    EXPECT_EQ(s.k_second, 0.0);
}

TEST(Sample, NonDispersiveEqualVelocities)
{
    const auto s = sample(DispersionModel(NonDispersive{4.0, 2.25}), Frequency{0.9});
    EXPECT_DOUBLE_EQ(s.v_phase, s.v_group);
    EXPECT_DOUBLE_EQ(s.v_phase, 1.0 / 3.0);
}

TEST(Sample, LorentzPhaseVelocityAtMarker)
{
    const auto s = sample(kLorentz, Frequency::from_thz(417.82));
    EXPECT_TRUE(s.propagating);
    EXPECT_NEAR(s.v_phase, -0.31673, 0.005);
    EXPECT_GT(s.v_group, 0.0);
}

TEST(Sample, GroupVelocityMatchesFiniteDifference)
{
    const std::vector<std::pair<DispersionModel, std::vector<double>>> cases{
        {DispersionModel(ColdPlasma{1.0}), {1.1, 1.5, 2.0, 5.0}},
        {DispersionModel(NonDispersive{2.0, 1.5}), {0.5, 3.0}},
        {kLorentz, {omega_thz(300.0), omega_thz(412.0), omega_thz(420.0), omega_thz(430.0)}},
    };
    for (const auto& [model, omegas] : cases) {
        for (double w : omegas) {
            const double h = 1e-6 * w;
            const double kp = (sample(model, Frequency{w + h}).k.real() -
                               sample(model, Frequency{w - h}).k.real()) /
                              (2 * h);
            const auto s = sample(model, Frequency{w});
            EXPECT_LT(rel(s.v_group, 1.0 / kp), 1e-5) << w;
        }
    }
}

TEST(Sample, KSecondMatchesFiniteDifference)
{
    for (double f : {300.0, 412.0, 420.0, 431.0}) {
        const double w = omega_thz(f);
        const auto s = sample(kLorentz, Frequency{w});
        const double h = 1e-5 * w;
        auto k = [&](double x) { return sample(kLorentz, Frequency{x}).k.real(); };
        const double fd = (k(w + h) - 2 * k(w) + k(w - h)) / (h * h);
        EXPECT_LT(rel(s.k_second, fd), 1e-4) << f;
        const auto r = sample_with_fd_k_second(kLorentz, Frequency{w});
        EXPECT_EQ(r.k_second_method, KSecondMethod::FiniteDifference);
        EXPECT_DOUBLE_EQ(r.k_second_step, 1e-6 * w);
        EXPECT_LT(rel(r.k_second, s.k_second), 1e-6) << f;
    }
}

TEST(Sample, Pure)
{
    const auto a = sample(kLorentz, Frequency::from_thz(421.3));
    const auto b = sample(kLorentz, Frequency::from_thz(421.3));
    EXPECT_EQ(a.n, b.n);
    EXPECT_EQ(a.v_group, b.v_group);
    EXPECT_EQ(a.k_second, b.k_second);
}

TEST(DispersionModel, RejectsInvalidParameters)
{
    EXPECT_THROW(DispersionModel(NonDispersive{0.0, 1.0}), Error);
    EXPECT_THROW(DispersionModel(ColdPlasma{-1.0}), Error);
    EXPECT_THROW(DispersionModel(LorentzMetamaterial{1.0, 0.0, 0.0, 1.0, 1.0, 0.0}), Error);
}
