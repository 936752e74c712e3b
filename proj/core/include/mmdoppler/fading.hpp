#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmdoppler/geometry.hpp"
#include "mmdoppler/spectrum.hpp"

namespace mmdoppler {

struct FadingRealization {
    std::vector<std::complex<double>> samples;
    double sample_rate = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kDefaultPaths = 256;
inline constexpr std::size_t kDefaultSegment = 1024;
inline constexpr double kDefaultOverlap = 0.5;
inline constexpr double kCoherenceThreshold = 0.5;

/// Sum-of-sinusoids channel:
///   h(t) = N^-1/2 sum_n sqrt(G(theta_n)/Gbar) exp(j(2 pi f_dmax cos(theta_n - theta_v) t + phi_n))
/// with theta_n uniform over the receive beam, phi_n uniform on [0, 2pi) and
/// Gbar the mean gain over the drawn angles.
///
/// Throws DomainError when sample_rate <= 2 f_dmax (the message names the
/// required rate), n_paths < 8, or duration is too short for one sample.
FadingRealization generate_fading(const BeamGeometry& geom, const MotionState& motion,
                                  const GainPattern& gain, std::size_t n_paths, double duration,
                                  double sample_rate, std::uint64_t seed);

/// Welch estimate with Hann-windowed segments. Output is a two-sided power
/// spectral density on [-fs/2, fs/2), so its integral is the mean power.
SpectrumSamples estimate_psd(const FadingRealization& realization,
                             std::size_t segment_len = kDefaultSegment,
                             double overlap_frac = kDefaultOverlap);

/// 1 / spread; +infinity for zero spread.
double coherence_time(double spread);

/// First lag where the normalised autocorrelation magnitude drops below
/// `threshold`, linearly interpolated between lags.
double coherence_time(const FadingRealization& realization,
                      double threshold = kCoherenceThreshold);

/// Mean of |h|^2 over the record.
double mean_power(const FadingRealization& realization);

}  // namespace mmdoppler
