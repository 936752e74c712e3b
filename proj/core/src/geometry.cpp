#include "mmdoppler/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

namespace {

void check_beam_width(double width, const char* name) {
    if (!(width > 0.0) || width > kTwoPi) {
        throw DomainError(fmt::format("{} must lie in (0, 2pi], got {}", name, width));
    }
}

}  // namespace

BeamGeometry make_geometry(double theta_tx, double theta_rx, double theta_v) {
    check_beam_width(theta_tx, "theta_tx");
    check_beam_width(theta_rx, "theta_rx");
    if (!std::isfinite(theta_v)) {
        throw DomainError("theta_v must be finite");
    }
    return BeamGeometry{theta_tx, theta_rx, wrap_angle(theta_v)};
}

std::vector<std::string> validity_warnings(const BeamGeometry& geom) {
    std::vector<std::string> out;
    if (geom.theta_rx >= kPi) {
        out.push_back(fmt::format(
            "receive beam width {:.3f} deg >= 180 deg: region II is empty and the "
            "single-window arrival model assumes a narrow receive beam",
            rad_to_deg(geom.theta_rx)));
    }
    return out;
}

double max_doppler(double speed, double carrier) {
    if (!(speed >= 0.0) || !std::isfinite(speed)) {
        throw DomainError(fmt::format("speed must be >= 0, got {}", speed));
    }
    if (!(carrier > 0.0) || !std::isfinite(carrier)) {
        throw DomainError(fmt::format("carrier must be > 0, got {}", carrier));
    }
    return speed / kSpeedOfLight * carrier;
}

MotionState make_motion(double speed, double carrier) {
    return MotionState{speed, carrier, max_doppler(speed, carrier)};
}

std::string_view to_string(AngularRegion region) {
    switch (region) {
        case AngularRegion::RegionI:
            return "I";
        case AngularRegion::RegionII:
            return "II";
        case AngularRegion::RegionIII:
            return "III";
    }
    return "?";
}

AngularRegion classify_region(double theta_v, double theta_rx) {
    const double a = std::abs(wrap_angle(theta_v));
    const double half = 0.5 * theta_rx;
    if (a <= half) {
        return AngularRegion::RegionI;
    }
    if (a <= kPi - half) {
        return AngularRegion::RegionII;
    }
    return AngularRegion::RegionIII;
}

DopplerSupport support_in_region(AngularRegion region, double theta_v, double theta_rx,
                                 double f_dmax) {
    const double a = std::abs(wrap_angle(theta_v));
    const double half = 0.5 * theta_rx;
    DopplerSupport s;
    s.region = region;
    switch (region) {
        case AngularRegion::RegionI:
            // For receive beams wider than pi the window can reach the
            // head-away direction; the lower edge then saturates at -f_dmax.
            s.f_lo = f_dmax * std::cos(std::min(half + a, kPi));
            s.f_hi = f_dmax;
            break;
        case AngularRegion::RegionII:
            s.f_lo = f_dmax * std::cos(half + a);
            s.f_hi = f_dmax * std::cos(half - a);
            break;
        case AngularRegion::RegionIII:
            s.f_lo = -f_dmax;
            s.f_hi = f_dmax * std::cos(half - a);
            break;
    }
    s.shift = 0.5 * (s.f_lo + s.f_hi);
    s.spread = s.f_hi - s.f_lo;
    return s;
}

DopplerSupport doppler_support(const BeamGeometry& geom, const MotionState& motion) {
    return support_in_region(classify_region(geom.theta_v, geom.theta_rx), geom.theta_v,
                             geom.theta_rx, motion.f_dmax);
}

DopplerSupport window_support(double center, double width, double theta_v, double f_dmax) {
    const double rotated = wrap_angle(theta_v - center);
    return support_in_region(classify_region(rotated, width), rotated, width, f_dmax);
}

}  // namespace mmdoppler
