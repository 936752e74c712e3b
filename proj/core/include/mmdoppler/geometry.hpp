#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mmdoppler {

/// Horizontal-plane beam configuration of a TX/RX link. All angles in radians.
///
/// Arrival angles are measured from the TX-RX line of sight; theta_v is the
/// angle between the receiver velocity and that line of sight.
struct BeamGeometry {
    double theta_tx = 0.0;  ///< TX half-power beam width
    double theta_rx = 0.0;  ///< RX half-power beam width, (0, 2pi]
    double theta_v = 0.0;   ///< velocity angle, wrapped into [-pi, pi]
};

/// Validates the beam widths and wraps theta_v. Throws DomainError.
BeamGeometry make_geometry(double theta_tx, double theta_rx, double theta_v);

/// Non-fatal caveats for a geometry (e.g. receive beams of pi or wider,
/// where the single-window model loses its narrow-beam premise).
std::vector<std::string> validity_warnings(const BeamGeometry& geom);

struct MotionState {
    double speed = 0.0;    ///< m/s
    double carrier = 0.0;  ///< Hz
    double f_dmax = 0.0;   ///< Hz, speed / c * carrier
};

/// Maximum Doppler shift (speed / c) * carrier. Throws DomainError on
/// negative speed or non-positive carrier.
double max_doppler(double speed, double carrier);

MotionState make_motion(double speed, double carrier);

enum class AngularRegion { RegionI, RegionII, RegionIII };

std::string_view to_string(AngularRegion region);

/// Region I: |theta_v| <= theta_rx/2; Region II: up to pi - theta_rx/2;
/// Region III: the remainder. Boundary ties go to the lower region. When
/// theta_rx >= pi the Region II band is empty.
AngularRegion classify_region(double theta_v, double theta_rx);

/// Interval of Doppler frequencies reachable from the receive window.
struct DopplerSupport {
    AngularRegion region = AngularRegion::RegionI;
    double f_lo = 0.0;
    double f_hi = 0.0;
    double shift = 0.0;   ///< (f_lo + f_hi) / 2
    double spread = 0.0;  ///< f_hi - f_lo
};

DopplerSupport doppler_support(const BeamGeometry& geom, const MotionState& motion);

/// Support boundaries for an explicit region choice. Used to check that
/// neighbouring region formulas meet at the region edges.
DopplerSupport support_in_region(AngularRegion region, double theta_v, double theta_rx,
                                 double f_dmax);

/// Support for a window of width `width` centred at `center` (relative to
/// the line of sight). Equivalent to a centred window with the velocity
/// angle rotated by -center.
DopplerSupport window_support(double center, double width, double theta_v, double f_dmax);

}  // namespace mmdoppler
