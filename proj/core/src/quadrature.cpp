#include "mmdoppler/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include <fmt/format.h>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

namespace {

// Kronrod abscissae (positive half, descending) and weights for K15, with
// the embedded G7 weights on the odd-indexed nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * sum;
        }
    }
    return Panel{a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints,
                                    const QuadratureOptions& opts) {
    if (!(a <= b)) {
        throw DomainError(fmt::format("integration bounds out of order: [{}, {}]", a, b));
    }
    if (a == b) {
        return {};
    }

    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> panels;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = gauss_kronrod(f, cuts[i], cuts[i + 1]);
        total += p.value;
        total_err += p.error;
        panels.push(p);
    }

    auto tolerance = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };

    while (total_err > tolerance()) {
        if (panels.size() >= opts.max_intervals) {
            throw NumericalError(
                fmt::format("adaptive quadrature did not converge on [{}, {}] within {} intervals",
                            a, b, opts.max_intervals),
                total_err);
        }
        Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval can no longer be split in floating point.
            throw NumericalError("adaptive quadrature exhausted floating-point resolution",
                                 total_err);
        }
        panels.pop();
        Panel left = gauss_kronrod(f, worst.a, mid);
        Panel right = gauss_kronrod(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum to shed the drift of the running updates.
    QuadratureResult result;
    result.intervals = panels.size();
    while (!panels.empty()) {
        result.value += panels.top().value;
        result.error += panels.top().error;
        panels.pop();
    }
    return result;
}

namespace {

// Half-width in u of the bands next to +-f_dmax treated by a single midpoint.
// Rounding in 1 - cos(u)^2 is about 1e-16 / u^2 relative, so ~1e-8 here.
constexpr double kEndpointBand = 1e-4;

double to_u(double f, double f_dmax) {
    return std::acos(std::clamp(f / f_dmax, -1.0, 1.0));
}

}  // namespace

double integrate_weighted_psd(const Density& density, const std::function<double(double)>& weight,
                              double f_lo, double f_hi, double f_dmax,
                              std::span<const double> breakpoints,
                              const QuadratureOptions& opts) {
    if (!(f_lo <= f_hi)) {
        throw DomainError(fmt::format("f_lo must not exceed f_hi: [{}, {}]", f_lo, f_hi));
    }
    if (!(f_dmax > 0.0)) {
        throw DomainError("integrate_psd requires f_dmax > 0");
    }
    // The substitution only covers [-f_dmax, f_dmax]; anything outside is
    // integrated directly in f.
    double outside = 0.0;
    auto plain = [&](double lo, double hi) {
        if (lo < hi) {
            outside += integrate_adaptive([&](double f) { return weight(f) * density(f); }, lo, hi,
                                          breakpoints, opts)
                           .value;
        }
    };
    plain(f_lo, std::min(f_hi, -f_dmax));
    plain(std::max(f_lo, f_dmax), f_hi);

    const double lo = std::max(f_lo, -f_dmax);
    const double hi = std::min(f_hi, f_dmax);
    if (!(lo < hi)) {
        return outside;
    }

    // u runs opposite to f.
    const double u_lo = to_u(hi, f_dmax);
    const double u_hi = to_u(lo, f_dmax);
    std::vector<double> ucuts;
    std::vector<double> all_cuts;
    ucuts.reserve(breakpoints.size());
    for (double p : breakpoints) {
        if (p > -f_dmax && p < f_dmax) {
            all_cuts.push_back(to_u(p, f_dmax));
        }
        if (p > lo && p < hi) {
            ucuts.push_back(to_u(p, f_dmax));
        }
    }
    auto integrand = [&](double u) {
        const double f = f_dmax * std::cos(u);
        return weight(f) * density(f) * f_dmax * std::sin(u);
    };

    // Within kEndpointBand of u = 0 or pi, cos(u) cannot resolve 1 - x^2 and
    // density evaluations are dominated by rounding (exactly +-f_dmax below
    // u ~ 1.5e-8). The integrand is smooth in u up to the nearest jump, so a
    // single sample taken at least half that distance from the endpoint
    // covers the band.
    double a = u_lo;
    double b = u_hi;
    double ends = 0.0;
    if (a < kEndpointBand) {
        double lim = kEndpointBand;
        for (double c : all_cuts) {
            if (c > a && c < lim) {
                lim = c;
            }
        }
        const double edge = std::min(lim, b);
        ends += integrand(std::max(0.5 * lim, 0.5 * (a + edge))) * (edge - a);
        a = edge;
    }
    if (b > kPi - kEndpointBand && a < b) {
        double lim = kPi - kEndpointBand;
        for (double c : all_cuts) {
            if (c < b && c > lim) {
                lim = c;
            }
        }
        const double edge = std::max(lim, a);
        ends += integrand(std::min(0.5 * (kPi + lim), 0.5 * (edge + b))) * (b - edge);
        b = edge;
    }
    if (!(a < b)) {
        return outside + ends;
    }
    std::erase_if(ucuts, [&](double c) { return c <= a || c >= b; });
    return outside + ends + integrate_adaptive(integrand, a, b, ucuts, opts).value;
}

double integrate_psd(const Density& density, double f_lo, double f_hi, double f_dmax,
                     std::span<const double> breakpoints, const QuadratureOptions& opts) {
    return integrate_weighted_psd(density, [](double) { return 1.0; }, f_lo, f_hi, f_dmax,
                                  breakpoints, opts);
}

SpectrumMoments spectrum_moments(const Density& density, double f_lo, double f_hi, double f_dmax,
                                 std::span<const double> breakpoints) {
    SpectrumMoments m;
    m.mass = integrate_psd(density, f_lo, f_hi, f_dmax, breakpoints);
    if (!(m.mass > 0.0)) {
        throw DomainError("spectrum has no positive mass");
    }
    const double scale = std::max(1.0, f_dmax);
    QuadratureOptions first_opts;
    first_opts.abs_tol = 1e-10 * m.mass * scale;
    QuadratureOptions second_opts;
    second_opts.abs_tol = 1e-10 * m.mass * scale * scale;
    const double first = integrate_weighted_psd(density, [](double f) { return f; }, f_lo, f_hi,
                                                f_dmax, breakpoints, first_opts);
    m.mean_shift = first / m.mass;
    const double mean = m.mean_shift;
    const double second = integrate_weighted_psd(
        density, [mean](double f) { return (f - mean) * (f - mean); }, f_lo, f_hi, f_dmax,
        breakpoints, second_opts);
    m.rms_spread = std::sqrt(std::max(0.0, second / m.mass));
    return m;
}

}  // namespace mmdoppler
