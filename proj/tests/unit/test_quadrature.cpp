#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/quadrature.hpp"
#include "mmdoppler/spectrum.hpp"
#include "mmdoppler/units.hpp"

using namespace mmdoppler;

TEST(Adaptive, Polynomial) {
    const auto r = integrate_adaptive([](double x) { return x * x * x - 2.0 * x; }, -1.0, 3.0);
    EXPECT_NEAR(r.value, 12.0, 1e-12);
    EXPECT_LE(r.error, 1e-9);
}

TEST(Adaptive, OscillatoryAndSmooth) {
    EXPECT_NEAR(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, kPi).value, 2.0, 1e-12);
    EXPECT_NEAR(integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0).value,
                std::sqrt(kPi), 1e-10);
}

TEST(Adaptive, StepWithBreakpoint) {
    auto step = [](double x) { return x < 0.3 ? 1.0 : 5.0; };
    const double brk[] = {0.3};
    const auto r = integrate_adaptive(step, 0.0, 1.0, brk);
    EXPECT_NEAR(r.value, 0.3 + 3.5, 1e-12);
}

TEST(Adaptive, ReversedAndEmptyInterval) {
    EXPECT_THROW(integrate_adaptive([](double) { return 2.0; }, 1.0, 0.0), DomainError);
    EXPECT_EQ(integrate_adaptive([](double) { return 2.0; }, 1.0, 1.0).value, 0.0);
}

TEST(Adaptive, BudgetExhaustionReportsResidual) {
    QuadratureOptions opts;
    opts.abs_tol = 1e-15;
    opts.max_intervals = 3;
    try {
        integrate_adaptive([](double x) { return std::sin(200.0 * x) / (x + 1e-3); }, 0.0, 10.0, {},
                           opts);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_GT(e.residual(), opts.abs_tol);
    }
}

TEST(IntegratePsd, JakesIsNormalised) {
    const double fd = 1234.5;
    const double m = integrate_psd([fd](double f) { return jakes_psd(f, fd); }, -fd, fd, fd);
    EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(IntegratePsd, PartialJakesMatchesArcsine) {
    // CDF of the arcsine law: 1/2 + asin(x)/pi.
    const double fd = 100.0;
    const double m = integrate_psd([fd](double f) { return jakes_psd(f, fd); }, -30.0, 80.0, fd);
    EXPECT_NEAR(m, (std::asin(0.8) - std::asin(-0.3)) / kPi, 1e-9);
}

TEST(IntegratePsd, RangeBeyondDopplerLimit) {
    const double fd = 10.0;
    const double m = integrate_psd([fd](double f) { return jakes_psd(f, fd); }, -50.0, 50.0, fd);
    EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(Moments, JakesSecondMoment) {
    const double fd = 777.0;
    const auto m = spectrum_moments([fd](double f) { return jakes_psd(f, fd); }, -fd, fd, fd);
    EXPECT_NEAR(m.mass, 1.0, 1e-9);
    EXPECT_NEAR(m.mean_shift, 0.0, 1e-9 * fd);
    EXPECT_NEAR(m.rms_spread / (fd / std::sqrt(2.0)), 1.0, 1e-9);
}

TEST(Moments, ZeroMassIsDomainError) {
    EXPECT_THROW(spectrum_moments([](double) { return 0.0; }, -1.0, 1.0, 1.0), DomainError);
}

TEST(WeightedPsd, FirstMomentOfShiftedTone) {
    const double fd = 50.0;
    const double m = integrate_weighted_psd([fd](double f) { return jakes_psd(f, fd); },
                                            [](double f) { return f * f; }, -fd, fd, fd);
    EXPECT_NEAR(m, fd * fd / 2.0, 1e-9 * fd * fd);
}

TEST(IntegratePsd, NarrowBinAtSingularEndpoint) {
    // Bins hugging +-f_dmax: arcsine-law mass must stay finite and exact.
    const double fd = 12971.93703548369;
    auto jakes = [fd](double f) { return jakes_psd(f, fd); };
    for (double rel : {1e-6, 1e-9, 1e-12}) {
        const double lo = fd * (1.0 - rel);
        const double want = 0.5 - std::asin(1.0 - rel) / kPi;
        EXPECT_NEAR(integrate_psd(jakes, lo, fd, fd), want, 1e-12) << rel;
        EXPECT_NEAR(integrate_psd(jakes, -fd, -lo, fd), want, 1e-12) << rel;
    }
}
