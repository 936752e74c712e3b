#include "mmdoppler/approx.hpp"

#include <cmath>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

ApproxShiftSpread approx_shift_spread(double theta_v, double theta_rx, double f_dmax) {
    if (!(f_dmax >= 0.0)) {
        throw DomainError("f_dmax must be >= 0");
    }
    if (!(theta_rx > 0.0) || theta_rx > kTwoPi) {
        throw DomainError("theta_rx must lie in (0, 2pi]");
    }
    const double a = std::abs(wrap_angle(theta_v));
    ApproxShiftSpread out;
    out.region = classify_region(a, theta_rx);
    out.outside_small_angle = theta_rx > kSmallBeamLimit;
    switch (out.region) {
        case AngularRegion::RegionI:
            out.shift = f_dmax * (1.0 - theta_rx * a / 4.0);
            out.spread = f_dmax * (theta_rx / 2.0) * a;
            break;
        case AngularRegion::RegionII:
            out.shift = f_dmax * std::cos(a);
            out.spread = f_dmax * theta_rx * std::sin(a);
            break;
        case AngularRegion::RegionIII:
            out.shift = -f_dmax * (1.0 - theta_rx * (kPi - a) / 4.0);
            out.spread = f_dmax * (theta_rx / 2.0) * (kPi - a);
            break;
    }
    return out;
}

}  // namespace mmdoppler
