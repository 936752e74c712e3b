#pragma once

#include "mmdoppler/geometry.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

/// Receive beams wider than this are outside the small-angle regime.
inline constexpr double kSmallBeamLimit = deg_to_rad(20.0);

/// Small-beamwidth Doppler shift and spread.
struct ApproxShiftSpread {
    AngularRegion region = AngularRegion::RegionI;
    double shift = 0.0;
    double spread = 0.0;
    bool outside_small_angle = false;  ///< theta_rx above kSmallBeamLimit
};

/// First-order shift/spread per angular region, obtained from the exact
/// support edges with cos(theta_rx/2) ~ 1, sin(theta_rx/2) ~ theta_rx/2 and,
/// in regions I/III, the small-angle forms of |theta_v| or pi - |theta_v|.
/// Uses |theta_v| throughout. Throws DomainError for f_dmax < 0 or an
/// invalid beam width.
ApproxShiftSpread approx_shift_spread(double theta_v, double theta_rx, double f_dmax);

}  // namespace mmdoppler
