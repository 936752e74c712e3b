#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mmdoppler/geometry.hpp"
#include "mmdoppler/quadrature.hpp"

namespace mmdoppler {

/// How the angle-to-frequency Jacobian is applied.
///
/// Exact sums every pre-image theta = theta_v +- acos(f/f_dmax) that falls
/// inside the receive window, giving a proper density. SingleBranch keeps a
/// single pre-image and gates it with the support interval; it under-counts
/// mass in regions I and III, where both pre-images can be inside the beam.
enum class PdfMode { Exact, SingleBranch };

std::string_view to_string(PdfMode mode);
PdfMode parse_pdf_mode(std::string_view text);

/// Uniform arrival-angle window, angles relative to the line of sight.
struct ArrivalWindow {
    double center = 0.0;
    double width = 0.0;
};

enum class GainKind { Flat, Parametric };

/// Receive antenna gain as a function of arrival angle.
///
/// Flat is constant over the receive window. Parametric is a Gaussian
/// main lobe pinned so that G(+-hpbw/2) = peak/2.
struct GainPattern {
    GainKind kind = GainKind::Flat;
    double hpbw = 0.0;
    double peak = 1.0;

    static GainPattern flat(double peak = 1.0);
    static GainPattern parametric(double hpbw, double peak = 1.0);

    double operator()(double theta) const;
};

struct Cluster {
    double center = 0.0;
    double width = 0.0;
    double power = 1.0;
};

using ClusterSet = std::vector<Cluster>;

struct EvalOptions {
    /// Returned in place of the integrable singularity at |f_d| = f_dmax.
    double endpoint_cap = std::numeric_limits<double>::infinity();
};

/// Classic U-shaped spectrum for omnidirectional reception.
double jakes_psd(double f_d, double f_dmax, const EvalOptions& opts = {});

/// Gain-weighted Doppler density for arrivals uniform over `window`
/// (branch-summed).
double window_psd(double f_d, const ArrivalWindow& window, double theta_v, double f_dmax,
                  const GainPattern& gain, const EvalOptions& opts = {});

double doppler_pdf(double f_d, const BeamGeometry& geom, const MotionState& motion,
                   PdfMode mode = PdfMode::Exact, const EvalOptions& opts = {});

double doppler_psd(double f_d, const BeamGeometry& geom, const MotionState& motion,
                   const GainPattern& gain, PdfMode mode = PdfMode::Exact,
                   const EvalOptions& opts = {});

/// Portions of a cluster's angular window that overlap the receive beam.
/// Up to two pieces when the overlap wraps through +-pi.
std::vector<ArrivalWindow> clip_to_beam(const Cluster& cluster, double theta_rx);

/// Power-weighted sum of per-cluster spectra, each cluster uniform over its
/// overlap with the receive beam. Powers are normalised to sum to one.
/// Throws DomainError for an empty set or invalid cluster fields.
double multicluster_psd(double f_d, const ClusterSet& clusters, const BeamGeometry& geom,
                        const MotionState& motion, const GainPattern& gain,
                        const EvalOptions& opts = {});

/// Per-piece Doppler segments of every cluster overlap, in cluster order.
std::vector<DopplerSupport> cluster_segments(const ClusterSet& clusters, const BeamGeometry& geom,
                                             const MotionState& motion);

std::vector<std::string> cluster_warnings(const ClusterSet& clusters, const BeamGeometry& geom);

/// Frequencies where the single-window density can jump.
std::vector<double> pdf_breakpoints(const BeamGeometry& geom, const MotionState& motion);
std::vector<double> multicluster_breakpoints(const ClusterSet& clusters, const BeamGeometry& geom,
                                             const MotionState& motion);

struct SpectrumSamples {
    std::vector<double> freqs;
    std::vector<double> values;
    double f_dmax = 0.0;
    std::string mode;
};

/// Evaluates `density` on `n_points` equally spaced frequencies covering
/// [-f_dmax, f_dmax] inclusive.
SpectrumSamples sample_spectrum(const Density& density, double f_dmax, std::size_t n_points,
                                std::string mode);

}  // namespace mmdoppler
