#pragma once

// Comparisons between a Welch estimate and a closed-form Doppler density.

#include <cmath>
#include <functional>
#include <vector>

#include "mmdoppler/quadrature.hpp"
#include "mmdoppler/spectrum.hpp"

namespace psd_metrics {

inline double bin_width(const mmdoppler::SpectrumSamples& est) {
    return est.freqs[1] - est.freqs[0];
}

inline double total(const mmdoppler::SpectrumSamples& est) {
    double s = 0.0;
    for (double v : est.values) {
        s += v;
    }
    return s * bin_width(est);
}

// Fraction of estimated power within [lo - pad*df, hi + pad*df].
inline double mass_inside(const mmdoppler::SpectrumSamples& est, double lo, double hi, double pad_bins) {
    const double df = bin_width(est);
    double in = 0.0;
    double all = 0.0;
    for (std::size_t k = 0; k < est.freqs.size(); ++k) {
        all += est.values[k];
        if (est.freqs[k] >= lo - pad_bins * df && est.freqs[k] <= hi + pad_bins * df) {
            in += est.values[k];
        }
    }
    return in / all;
}

// L1 distance over bins lying wholly inside [lo + pad*df, hi - pad*df];
// both the estimate and the reference are renormalised to unit mass over
// that bin set first, so the figure compares shape only.
inline double interior_l1(const mmdoppler::SpectrumSamples& est, const mmdoppler::Density& pdf,
                          double f_dmax, double lo, double hi, double pad_bins,
                          std::span<const double> breaks = {}) {
    const double df = bin_width(est);
    std::vector<double> e;
    std::vector<double> a;
    for (std::size_t k = 0; k < est.freqs.size(); ++k) {
        const double b0 = est.freqs[k] - 0.5 * df;
        const double b1 = est.freqs[k] + 0.5 * df;
        if (b0 < lo + pad_bins * df || b1 > hi - pad_bins * df) {
            continue;
        }
        e.push_back(est.values[k]);
        a.push_back(mmdoppler::integrate_psd(pdf, b0, b1, f_dmax, breaks));
    }
    double se = 0.0;
    double sa = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        se += e[i];
        sa += a[i];
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        l1 += std::abs(e[i] / se - a[i] / sa);
    }
    return l1;
}

// Element-wise mean of equally gridded estimates.
inline mmdoppler::SpectrumSamples average(const std::vector<mmdoppler::SpectrumSamples>& runs) {
    mmdoppler::SpectrumSamples out = runs.front();
    for (std::size_t r = 1; r < runs.size(); ++r) {
        for (std::size_t k = 0; k < out.values.size(); ++k) {
            out.values[k] += runs[r].values[k];
        }
    }
    for (double& v : out.values) {
        v /= static_cast<double>(runs.size());
    }
    return out;
}

}  // namespace psd_metrics
