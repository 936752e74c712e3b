#pragma once

#include <cstdint>
#include <random>

namespace mmdoppler {

/// SplitMix64 finaliser; maps (master seed, stream index) to well-spread
/// engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of substream `index` under `master`. Substreams are addressed by
/// index only, so any partition of the work across threads reproduces the
/// same draws.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Engine with a platform-independent [0, 1) conversion; std's
/// distributions are implementation-defined and would break byte-exact
/// reproducibility across standard libraries.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace mmdoppler
