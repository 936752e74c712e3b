#include "mmdoppler/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

std::string_view to_string(PdfMode mode) {
    return mode == PdfMode::Exact ? "exact" : "single-branch";
}

PdfMode parse_pdf_mode(std::string_view text) {
    if (text == "exact") {
        return PdfMode::Exact;
    }
    if (text == "single-branch") {
        return PdfMode::SingleBranch;
    }
    throw DomainError(fmt::format("unknown pdf mode '{}'", text));
}

GainPattern GainPattern::flat(double peak) {
    if (!(peak > 0.0)) {
        throw DomainError("gain peak must be > 0");
    }
    return GainPattern{GainKind::Flat, 0.0, peak};
}

GainPattern GainPattern::parametric(double hpbw, double peak) {
    if (!(hpbw > 0.0)) {
        throw DomainError("parametric gain needs hpbw > 0");
    }
    if (!(peak > 0.0)) {
        throw DomainError("gain peak must be > 0");
    }
    return GainPattern{GainKind::Parametric, hpbw, peak};
}

double GainPattern::operator()(double theta) const {
    if (kind == GainKind::Flat) {
        return peak;
    }
    const double r = wrap_angle(theta) / hpbw;
    return peak * std::exp(-4.0 * std::numbers::ln2 * r * r);
}

double jakes_psd(double f_d, double f_dmax, const EvalOptions& opts) {
    if (!(f_dmax > 0.0)) {
        throw DomainError("jakes_psd requires f_dmax > 0");
    }
    const double x = f_d / f_dmax;
    if (std::abs(x) > 1.0) {
        return 0.0;
    }
    if (std::abs(x) == 1.0) {
        return opts.endpoint_cap;
    }
    return 1.0 / (kPi * f_dmax * std::sqrt(1.0 - x * x));
}

namespace {

bool in_window(double theta, const ArrivalWindow& w) {
    double t = std::fmod(theta - (w.center - 0.5 * w.width), kTwoPi);
    if (t < 0.0) {
        t += kTwoPi;
    }
    return t <= w.width;
}

void check_f_dmax(double f_dmax) {
    if (!(f_dmax > 0.0)) {
        throw DomainError("Doppler densities require f_dmax > 0");
    }
}

}  // namespace

double window_psd(double f_d, const ArrivalWindow& window, double theta_v, double f_dmax,
                  const GainPattern& gain, const EvalOptions& opts) {
    check_f_dmax(f_dmax);
    const double x = f_d / f_dmax;
    if (std::abs(x) > 1.0) {
        return 0.0;
    }
    const double alpha = std::acos(x);
    if (std::abs(x) == 1.0) {
        return in_window(theta_v + alpha, window) ? opts.endpoint_cap : 0.0;
    }
    double weight = 0.0;
    for (double theta : {theta_v + alpha, theta_v - alpha}) {
        if (in_window(theta, window)) {
            weight += gain(theta);
        }
    }
    if (weight == 0.0) {
        return 0.0;
    }
    return weight / (window.width * f_dmax * std::sqrt(1.0 - x * x));
}

double doppler_psd(double f_d, const BeamGeometry& geom, const MotionState& motion,
                   const GainPattern& gain, PdfMode mode, const EvalOptions& opts) {
    check_f_dmax(motion.f_dmax);
    if (mode == PdfMode::Exact) {
        return window_psd(f_d, ArrivalWindow{0.0, geom.theta_rx}, geom.theta_v, motion.f_dmax,
                          gain, opts);
    }

    const DopplerSupport s = doppler_support(geom, motion);
    if (f_d < s.f_lo || f_d > s.f_hi) {
        return 0.0;
    }
    const double x = f_d / motion.f_dmax;
    if (std::abs(x) >= 1.0) {
        return opts.endpoint_cap;
    }
    // The retained pre-image is the one that lies inside the beam in region II.
    const double sign = geom.theta_v < 0.0 ? -1.0 : 1.0;
    const double theta = sign * (std::abs(geom.theta_v) - std::acos(x));
    return gain(theta) / (geom.theta_rx * motion.f_dmax * std::sqrt(1.0 - x * x));
}

double doppler_pdf(double f_d, const BeamGeometry& geom, const MotionState& motion, PdfMode mode,
                   const EvalOptions& opts) {
    return doppler_psd(f_d, geom, motion, GainPattern::flat(1.0), mode, opts);
}

std::vector<ArrivalWindow> clip_to_beam(const Cluster& cluster, double theta_rx) {
    const double beam_lo = -0.5 * theta_rx;
    const double beam_hi = 0.5 * theta_rx;
    const double center = wrap_angle(cluster.center);
    std::vector<ArrivalWindow> pieces;
    for (int k = -1; k <= 1; ++k) {
        const double lo = std::max(center - 0.5 * cluster.width + k * kTwoPi, beam_lo);
        const double hi = std::min(center + 0.5 * cluster.width + k * kTwoPi, beam_hi);
        if (hi > lo) {
            pieces.push_back(ArrivalWindow{0.5 * (lo + hi), hi - lo});
        }
    }
    return pieces;
}

namespace {

void check_clusters(const ClusterSet& clusters) {
    if (clusters.empty()) {
        throw DomainError("cluster set must contain at least one cluster");
    }
    for (std::size_t j = 0; j < clusters.size(); ++j) {
        const Cluster& c = clusters[j];
        if (!(c.width > 0.0) || c.width > kTwoPi) {
            throw DomainError(fmt::format("cluster {}: width must lie in (0, 2pi]", j));
        }
        if (!(c.power >= 0.0) || !std::isfinite(c.power)) {
            throw DomainError(fmt::format("cluster {}: power must be >= 0", j));
        }
    }
}

double total_power(const ClusterSet& clusters) {
    const double total = std::accumulate(clusters.begin(), clusters.end(), 0.0,
                                         [](double acc, const Cluster& c) { return acc + c.power; });
    if (!(total > 0.0)) {
        throw DomainError("cluster powers sum to zero");
    }
    return total;
}

}  // namespace

double multicluster_psd(double f_d, const ClusterSet& clusters, const BeamGeometry& geom,
                        const MotionState& motion, const GainPattern& gain,
                        const EvalOptions& opts) {
    check_clusters(clusters);
    check_f_dmax(motion.f_dmax);
    const double norm = total_power(clusters);
    double sum = 0.0;
    for (const Cluster& c : clusters) {
        if (c.power == 0.0) {
            continue;
        }
        const auto pieces = clip_to_beam(c, geom.theta_rx);
        double overlap = 0.0;
        for (const auto& p : pieces) {
            overlap += p.width;
        }
        for (const auto& p : pieces) {
            const double v = window_psd(f_d, p, geom.theta_v, motion.f_dmax, gain, opts);
            if (v != 0.0) {
                sum += (c.power / norm) * (p.width / overlap) * v;
            }
        }
    }
    return sum;
}

std::vector<DopplerSupport> cluster_segments(const ClusterSet& clusters, const BeamGeometry& geom,
                                             const MotionState& motion) {
    check_clusters(clusters);
    std::vector<DopplerSupport> out;
    for (const Cluster& c : clusters) {
        for (const auto& p : clip_to_beam(c, geom.theta_rx)) {
            out.push_back(window_support(p.center, p.width, geom.theta_v, motion.f_dmax));
        }
    }
    return out;
}

std::vector<std::string> cluster_warnings(const ClusterSet& clusters, const BeamGeometry& geom) {
    std::vector<std::string> out;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
        if (clip_to_beam(clusters[j], geom.theta_rx).empty()) {
            out.push_back(fmt::format(
                "cluster {} does not intersect the receive beam and contributes nothing", j));
        }
    }
    return out;
}

namespace {

void push_window_breaks(std::vector<double>& out, const ArrivalWindow& w, double theta_v,
                        double f_dmax) {
    for (double edge : {w.center - 0.5 * w.width, w.center + 0.5 * w.width}) {
        out.push_back(f_dmax * std::cos(edge - theta_v));
    }
    const DopplerSupport s = window_support(w.center, w.width, theta_v, f_dmax);
    out.push_back(s.f_lo);
    out.push_back(s.f_hi);
}

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<double> pdf_breakpoints(const BeamGeometry& geom, const MotionState& motion) {
    std::vector<double> out;
    push_window_breaks(out, ArrivalWindow{0.0, geom.theta_rx}, geom.theta_v, motion.f_dmax);
    sort_unique(out);
    return out;
}

std::vector<double> multicluster_breakpoints(const ClusterSet& clusters, const BeamGeometry& geom,
                                             const MotionState& motion) {
    std::vector<double> out;
    for (const Cluster& c : clusters) {
        for (const auto& p : clip_to_beam(c, geom.theta_rx)) {
            push_window_breaks(out, p, geom.theta_v, motion.f_dmax);
        }
    }
    sort_unique(out);
    return out;
}

SpectrumSamples sample_spectrum(const Density& density, double f_dmax, std::size_t n_points,
                                std::string mode) {
    if (n_points < 2) {
        throw DomainError("spectrum grid needs at least 2 points");
    }
    SpectrumSamples out;
    out.f_dmax = f_dmax;
    out.mode = std::move(mode);
    out.freqs.resize(n_points);
    out.values.resize(n_points);
    const double step = 2.0 * f_dmax / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        // Pin the ends so the singular endpoints are hit exactly.
        const double f = (i + 1 == n_points) ? f_dmax : -f_dmax + step * static_cast<double>(i);
        out.freqs[i] = f;
        out.values[i] = density(f);
    }
    return out;
}

}  // namespace mmdoppler
