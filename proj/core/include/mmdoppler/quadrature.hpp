#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace mmdoppler {

using Density = std::function<double(double)>;

struct QuadratureOptions {
    double abs_tol = 1e-9;
    double rel_tol = 0.0;
    std::size_t max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
/// `breakpoints` are interior points where the integrand may jump; they
/// seed the initial partition. Throws NumericalError when the tolerance is
/// not met within `max_intervals` subintervals.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints = {},
                                    const QuadratureOptions& opts = {});

/// Integrates a Doppler-domain density over [f_lo, f_hi] using the change
/// of variable f = f_dmax cos(u), which cancels the inverse-square-root
/// singularities at +-f_dmax. Frequency breakpoints are mapped into u.
double integrate_psd(const Density& density, double f_lo, double f_hi, double f_dmax,
                     std::span<const double> breakpoints = {},
                     const QuadratureOptions& opts = {});

/// Integral of w(f) * density(f) over [f_lo, f_hi] with the same substitution.
double integrate_weighted_psd(const Density& density, const std::function<double(double)>& weight,
                              double f_lo, double f_hi, double f_dmax,
                              std::span<const double> breakpoints = {},
                              const QuadratureOptions& opts = {});

struct SpectrumMoments {
    double mass = 0.0;
    double mean_shift = 0.0;
    double rms_spread = 0.0;
};

/// First moment and RMS width of a density over [f_lo, f_hi]. Throws
/// DomainError when the total mass is not positive.
SpectrumMoments spectrum_moments(const Density& density, double f_lo, double f_hi, double f_dmax,
                                 std::span<const double> breakpoints = {});

}  // namespace mmdoppler
