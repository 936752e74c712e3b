#pragma once

#include <cmath>
#include <numbers>

namespace mmdoppler {

/// Speed of light in vacuum (m/s), exact SI value.
inline constexpr double kSpeedOfLight = 299'792'458.0;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }
constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }
constexpr double mps_to_kmh(double mps) { return mps * 3.6; }

/// Wraps an angle into [-pi, pi].
inline double wrap_angle(double rad) {
    double r = std::remainder(rad, kTwoPi);
    // remainder() can return -pi for odd multiples of pi; keep +pi so that
    // the head-away direction stays on the positive side.
    if (r == -kPi) {
        r = kPi;
    }
    return r;
}

}  // namespace mmdoppler
