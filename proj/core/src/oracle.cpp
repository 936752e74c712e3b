#include "mmdoppler/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <thread>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/rng.hpp"

namespace mmdoppler {

namespace {

void fill_stream(std::span<double> out, std::uint64_t seed, std::uint64_t index,
                 const BeamGeometry& geom, double f_dmax, const GainPattern& gain) {
    Stream rng(substream_seed(seed, index));
    const double half = 0.5 * geom.theta_rx;
    const bool thinned = gain.kind != GainKind::Flat;
    std::size_t i = 0;
    while (i < out.size()) {
        const double theta = rng.uniform(-half, half);
        if (thinned && rng.uniform() * gain.peak >= gain(theta)) {
            continue;
        }
        out[i++] = f_dmax * std::cos(theta - geom.theta_v);
    }
}

}  // namespace

DopplerSamples sample_doppler(const BeamGeometry& geom, const MotionState& motion,
                              const GainPattern& gain, std::size_t n, std::uint64_t seed,
                              unsigned threads) {
    if (n == 0) {
        throw DomainError("sample count must be >= 1");
    }
    DopplerSamples out;
    out.seed = seed;
    out.count = n;
    out.f_dmax = motion.f_dmax;
    const DopplerSupport support = doppler_support(geom, motion);
    out.support_lo = support.f_lo;
    out.support_hi = support.f_hi;
    out.values.resize(n);

    const std::size_t streams = (n + kSamplesPerStream - 1) / kSamplesPerStream;
    auto run = [&](std::size_t first, std::size_t step) {
        for (std::size_t s = first; s < streams; s += step) {
            const std::size_t begin = s * kSamplesPerStream;
            const std::size_t len = std::min(kSamplesPerStream, n - begin);
            fill_stream(std::span<double>(out.values).subspan(begin, len), seed, s, geom,
                        motion.f_dmax, gain);
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, streams));
    if (workers <= 1) {
        run(0, 1);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(run, w, workers);
        }
    }
    return out;
}

Histogram empirical_pdf(const DopplerSamples& samples, std::size_t bins) {
    if (bins < 2) {
        throw DomainError("histogram needs at least 2 bins");
    }
    if (samples.values.empty()) {
        throw DomainError("cannot histogram an empty sample set");
    }
    const auto [mn, mx] = std::minmax_element(samples.values.begin(), samples.values.end());
    const double lo = samples.support_lo;
    const double hi = samples.support_hi;
    Histogram h;
    if (!(hi > lo) || *mn == *mx) {
        const double v = *mn;
        h.edges = {v - 0.5, v + 0.5};
        h.densities = {1.0};
        h.counts = {samples.values.size()};
        return h;
    }

    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + width * static_cast<double>(i);
    }
    h.edges[bins] = hi;
    h.counts.assign(bins, 0);
    const double scale = static_cast<double>(bins) / (hi - lo);
    for (double v : samples.values) {
        const double pos = std::floor((v - lo) * scale);
        // Rounding can put a sample a hair outside the analytic support.
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        ++h.counts[idx];
    }
    h.densities.resize(bins);
    const double n = static_cast<double>(samples.values.size());
    for (std::size_t i = 0; i < bins; ++i) {
        h.densities[i] = static_cast<double>(h.counts[i]) / (n * (h.edges[i + 1] - h.edges[i]));
    }
    return h;
}

Histogram merge_histograms(const Histogram& a, const Histogram& b) {
    if (a.edges != b.edges) {
        throw DomainError("cannot merge histograms with different edges");
    }
    if (a.counts.size() != a.densities.size() || b.counts.size() != b.densities.size()) {
        throw DomainError("only count histograms can be merged");
    }
    Histogram out;
    out.edges = a.edges;
    out.counts.resize(a.counts.size());
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < out.counts.size(); ++i) {
        out.counts[i] = a.counts[i] + b.counts[i];
        total += out.counts[i];
    }
    out.densities.resize(out.counts.size());
    for (std::size_t i = 0; i < out.counts.size(); ++i) {
        out.densities[i] = static_cast<double>(out.counts[i]) /
                           (static_cast<double>(total) * (out.edges[i + 1] - out.edges[i]));
    }
    return out;
}

Histogram analytic_histogram(const Density& density, std::span<const double> edges, double f_dmax,
                             std::span<const double> breakpoints) {
    if (edges.size() < 2) {
        throw DomainError("need at least one bin");
    }
    Histogram h;
    h.edges.assign(edges.begin(), edges.end());
    h.densities.resize(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double w = edges[i + 1] - edges[i];
        h.densities[i] = integrate_psd(density, edges[i], edges[i + 1], f_dmax, breakpoints) / w;
    }
    return h;
}

double l1_distance(const Histogram& hist, const Density& analytic, double f_dmax,
                   std::span<const double> breakpoints) {
    const Histogram ref = analytic_histogram(analytic, hist.edges, f_dmax, breakpoints);
    double sum = 0.0;
    for (std::size_t i = 0; i < hist.densities.size(); ++i) {
        sum += std::abs(hist.densities[i] - ref.densities[i]) * (hist.edges[i + 1] - hist.edges[i]);
    }
    return sum;
}

}  // namespace mmdoppler
