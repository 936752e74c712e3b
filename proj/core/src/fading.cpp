#include "mmdoppler/fading.hpp"

#include <algorithm>
#include <cmath>
#include <fftw3.h>
#include <fmt/format.h>
#include <limits>
#include <memory>
#include <mutex>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/rng.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

namespace {

// Phasor recursion is re-anchored this often to bound rounding drift.
constexpr std::size_t kResyncInterval = 1024;

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n) {
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class Fft {
public:
    Fft(std::size_t n, int sign) : n_(n), in_(fftw_buffer(n)), out_(fftw_buffer(n)) {
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.get(), out_.get(), sign, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    std::complex<double>* input() { return reinterpret_cast<std::complex<double>*>(in_.get()); }
    const std::complex<double>* output() const {
        return reinterpret_cast<const std::complex<double>*>(out_.get());
    }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    FftwBuffer in_;
    FftwBuffer out_;
    fftw_plan plan_;
};

}  // namespace

FadingRealization generate_fading(const BeamGeometry& geom, const MotionState& motion,
                                  const GainPattern& gain, std::size_t n_paths, double duration,
                                  double sample_rate, std::uint64_t seed) {
    if (!(sample_rate > 2.0 * motion.f_dmax)) {
        throw DomainError(fmt::format(
            "sample rate {} Hz violates Nyquist for f_dmax = {} Hz; need more than {} Hz",
            sample_rate, motion.f_dmax, 2.0 * motion.f_dmax));
    }
    if (n_paths < 8) {
        throw DomainError(fmt::format("need at least 8 paths, got {}", n_paths));
    }
    const auto n_samples = static_cast<std::size_t>(std::floor(duration * sample_rate));
    if (!(duration > 0.0) || n_samples == 0) {
        throw DomainError("duration too short for a single sample");
    }

    FadingRealization out;
    out.sample_rate = sample_rate;
    out.seed = seed;
    out.n_paths = n_paths;

    const double spread = doppler_support(geom, motion).spread;
    if (duration * spread < 10.0) {
        out.warnings.push_back(fmt::format(
            "record of {} s spans only {:.3g} cycles of the {:.6g} Hz Doppler spread (>= 10 "
            "recommended)",
            duration, duration * spread, spread));
    }

    Stream rng(substream_seed(seed, 0));
    const double half = 0.5 * geom.theta_rx;
    std::vector<double> freq(n_paths);
    std::vector<double> phase(n_paths);
    std::vector<double> weight(n_paths);
    double gain_sum = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        const double theta = rng.uniform(-half, half);
        phase[p] = rng.uniform(0.0, kTwoPi);
        freq[p] = motion.f_dmax * std::cos(theta - geom.theta_v);
        weight[p] = gain(theta);
        gain_sum += weight[p];
    }
    const double gain_mean = gain_sum / static_cast<double>(n_paths);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_paths));

    std::vector<double> amp(n_paths);
    std::vector<double> omega(n_paths);
    std::vector<double> step_re(n_paths);
    std::vector<double> step_im(n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        amp[p] = norm * std::sqrt(weight[p] / gain_mean);
        omega[p] = kTwoPi * freq[p] / sample_rate;
        step_re[p] = std::cos(omega[p]);
        step_im[p] = std::sin(omega[p]);
    }

    // Accumulate one block at a time so the block stays in cache while all
    // paths are added. Plain real arithmetic avoids the NaN-checking
    // complex multiply.
    out.samples.assign(n_samples, {0.0, 0.0});
    std::vector<double> acc_re(kResyncInterval);
    std::vector<double> acc_im(kResyncInterval);
    for (std::size_t start = 0; start < n_samples; start += kResyncInterval) {
        const std::size_t len = std::min(n_samples - start, kResyncInterval);
        std::fill(acc_re.begin(), acc_re.end(), 0.0);
        std::fill(acc_im.begin(), acc_im.end(), 0.0);
        for (std::size_t p = 0; p < n_paths; ++p) {
            const double arg = omega[p] * static_cast<double>(start) + phase[p];
            double zr = amp[p] * std::cos(arg);
            double zi = amp[p] * std::sin(arg);
            const double sr = step_re[p];
            const double si = step_im[p];
            for (std::size_t k = 0; k < len; ++k) {
                acc_re[k] += zr;
                acc_im[k] += zi;
                const double nr = zr * sr - zi * si;
                zi = zr * si + zi * sr;
                zr = nr;
            }
        }
        for (std::size_t k = 0; k < len; ++k) {
            out.samples[start + k] = {acc_re[k], acc_im[k]};
        }
    }
    return out;
}

SpectrumSamples estimate_psd(const FadingRealization& realization, std::size_t segment_len,
                             double overlap_frac) {
    const std::size_t n = realization.samples.size();
    if (segment_len < 2) {
        throw DomainError("segment length must be >= 2");
    }
    if (segment_len > n) {
        throw DomainError(fmt::format("record of {} samples is shorter than one {}-sample segment",
                                      n, segment_len));
    }
    if (!(overlap_frac >= 0.0 && overlap_frac < 1.0)) {
        throw DomainError("overlap fraction must lie in [0, 1)");
    }
    const double fs = realization.sample_rate;
    const std::size_t overlap =
        static_cast<std::size_t>(std::floor(overlap_frac * static_cast<double>(segment_len)));
    const std::size_t hop = std::max<std::size_t>(1, segment_len - overlap);
    const std::size_t n_seg = 1 + (n - segment_len) / hop;

    // Periodic Hann window.
    std::vector<double> window(segment_len);
    double window_energy = 0.0;
    for (std::size_t i = 0; i < segment_len; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) /
                                         static_cast<double>(segment_len));
        window_energy += window[i] * window[i];
    }

    Fft fft(segment_len, FFTW_FORWARD);
    std::vector<double> accum(segment_len, 0.0);
    for (std::size_t s = 0; s < n_seg; ++s) {
        const std::size_t base = s * hop;
        for (std::size_t i = 0; i < segment_len; ++i) {
            fft.input()[i] = realization.samples[base + i] * window[i];
        }
        fft.execute();
        for (std::size_t k = 0; k < segment_len; ++k) {
            accum[k] += std::norm(fft.output()[k]);
        }
    }

    SpectrumSamples out;
    out.mode = "welch";
    out.freqs.resize(segment_len);
    out.values.resize(segment_len);
    const double df = fs / static_cast<double>(segment_len);
    const double scale = 1.0 / (fs * window_energy * static_cast<double>(n_seg));
    const auto half = static_cast<std::ptrdiff_t>(segment_len / 2);
    const auto len = static_cast<std::ptrdiff_t>(segment_len);
    for (std::ptrdiff_t j = 0; j < len; ++j) {
        const std::ptrdiff_t bin = j - half;
        const auto k = static_cast<std::size_t>((bin % len + len) % len);
        out.freqs[static_cast<std::size_t>(j)] = static_cast<double>(bin) * df;
        out.values[static_cast<std::size_t>(j)] = accum[k] * scale;
    }
    return out;
}

double coherence_time(double spread) {
    if (spread < 0.0 || std::isnan(spread)) {
        throw DomainError("Doppler spread must be >= 0");
    }
    if (spread == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / spread;
}

double coherence_time(const FadingRealization& realization, double threshold) {
    const std::size_t n = realization.samples.size();
    if (n < 4) {
        throw DomainError("realization too short for an autocorrelation estimate");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("coherence threshold must lie in (0, 1)");
    }
    // Linear (non-circular) autocorrelation through a zero-padded FFT.
    std::size_t padded = 1;
    while (padded < 2 * n) {
        padded <<= 1;
    }
    Fft forward(padded, FFTW_FORWARD);
    Fft inverse(padded, FFTW_BACKWARD);
    std::fill(forward.input(), forward.input() + padded, std::complex<double>{});
    std::copy(realization.samples.begin(), realization.samples.end(), forward.input());
    forward.execute();
    for (std::size_t k = 0; k < padded; ++k) {
        inverse.input()[k] = std::norm(forward.output()[k]);
    }
    inverse.execute();

    auto unbiased = [&](std::size_t lag) {
        return std::abs(inverse.output()[lag]) / static_cast<double>(n - lag);
    };
    const double r0 = unbiased(0);
    if (!(r0 > 0.0)) {
        throw DomainError("realization has zero power");
    }
    double prev = 1.0;
    for (std::size_t lag = 1; lag <= n / 2; ++lag) {
        const double r = unbiased(lag) / r0;
        if (r < threshold) {
            const double frac = (prev - threshold) / (prev - r);
            return (static_cast<double>(lag - 1) + frac) / realization.sample_rate;
        }
        prev = r;
    }
    throw DomainError(
        "realization too short: autocorrelation never drops below the coherence threshold");
}

double mean_power(const FadingRealization& realization) {
    if (realization.samples.empty()) {
        throw DomainError("empty realization");
    }
    double sum = 0.0;
    for (const auto& h : realization.samples) {
        sum += std::norm(h);
    }
    return sum / static_cast<double>(realization.samples.size());
}

}  // namespace mmdoppler
