#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mmdoppler/geometry.hpp"
#include "mmdoppler/quadrature.hpp"
#include "mmdoppler/spectrum.hpp"

namespace mmdoppler {

/// Doppler shifts of rays with uniformly drawn arrival angles.
struct DopplerSamples {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    double f_dmax = 0.0;
    /// Analytic support of the generating geometry; histograms span this.
    double support_lo = 0.0;
    double support_hi = 0.0;
};

/// Samples per substream. Fixed so results do not depend on thread count.
inline constexpr std::size_t kSamplesPerStream = 1u << 16;

/// Draws `n` arrival angles uniform over the receive beam (thinned by
/// G/G_peak for non-flat gain) and maps each to f_dmax cos(theta - theta_v).
/// `threads` = 0 uses the hardware concurrency. Throws DomainError for n = 0.
DopplerSamples sample_doppler(const BeamGeometry& geom, const MotionState& motion,
                              const GainPattern& gain, std::size_t n, std::uint64_t seed,
                              unsigned threads = 0);

struct Histogram {
    std::vector<double> edges;
    std::vector<double> densities;
    std::vector<std::uint64_t> counts;  ///< empty for analytic histograms
};

/// Density-normalised histogram with `bins` equal bins spanning the
/// samples' analytic support. A zero-width support (or identical samples)
/// yields a single 1 Hz-wide bin holding all mass.
Histogram empirical_pdf(const DopplerSamples& samples, std::size_t bins);

/// Pools two count histograms over identical edges.
Histogram merge_histograms(const Histogram& a, const Histogram& b);

/// Bin-averaged analytic density over the given edges.
Histogram analytic_histogram(const Density& density, std::span<const double> edges, double f_dmax,
                             std::span<const double> breakpoints = {});

/// Sum over bins of |hist - bin mean of analytic| * bin width.
double l1_distance(const Histogram& hist, const Density& analytic, double f_dmax,
                   std::span<const double> breakpoints = {});

}  // namespace mmdoppler
