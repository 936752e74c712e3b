#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmdoppler {

/// Speed-dependent receive beam width law. Evaluated in its native units:
/// theta(deg) = coefficient / (carrier(GHz) * speed(km/h)), clamped to
/// [theta_min_deg, theta_max_deg]; speeds at or below v_low_kmh get
/// theta_max_deg.
struct BeamPolicy {
    double coefficient = 1.4e4;
    double theta_max_deg = 10.0;
    double theta_min_deg = 1.0;
    double v_low_kmh = 50.0;
};

/// Receive beam width in degrees. Throws DomainError for carrier <= 0,
/// negative speed or an inconsistent policy.
double beamwidth_for(double speed_kmh, double carrier_ghz, const BeamPolicy& policy = {});

struct BaseStation {
    double along = 0.0;    ///< m, along-track coordinate
    double lateral = 0.0;  ///< m, perpendicular offset from the track (> 0)
};

/// Angle between the train velocity (along +x for heading +1, -x for -1)
/// and the line of sight from the train to `bs`. 90 deg when abeam; tends to
/// 0 on approach and pi after passing.
double theta_v_of(double position, const BaseStation& bs, double heading = 1.0);

/// Nearest station (Euclidean); ties go to the lower index.
std::size_t select_bs(double position, std::span<const BaseStation> stations);

struct SpeedKnot {
    double t = 0.0;      ///< s
    double speed = 0.0;  ///< m/s
};

enum class SpreadMode { Approx, Exact };

struct ScenarioConfig {
    double track_length = 0.0;  ///< m
    std::vector<BaseStation> stations;
    std::vector<SpeedKnot> speed_profile;  ///< piecewise linear, first knot at t = 0
    double carrier = 0.0;                  ///< Hz
    BeamPolicy policy;
    double time_step = 0.01;  ///< s
    double start_position = 0.0;
    double hysteresis = 0.0;  ///< m a new station must be closer by before switching
    SpreadMode spread_mode = SpreadMode::Approx;
};

/// Throws ConfigError naming the first offending field.
void validate(const ScenarioConfig& config);

double speed_at(std::span<const SpeedKnot> profile, double t);

struct TraceRow {
    double t = 0.0;
    double position = 0.0;
    double speed = 0.0;
    std::size_t serving_bs = 0;
    double theta_v = 0.0;
    double theta_rx = 0.0;
    double f_dmax = 0.0;
    double shift = 0.0;
    double spread = 0.0;
    bool handover = false;
};

struct ScenarioTrace {
    std::vector<TraceRow> rows;

    std::size_t handover_count() const;
};

/// Steps the trajectory at config.time_step until the profile ends or the
/// train reaches the end of the track.
ScenarioTrace simulate(const ScenarioConfig& config);

/// For each station, the index of the row nearest its abeam point, in
/// station order. Stations the trace never passes are skipped.
std::vector<std::size_t> abeam_rows(const ScenarioTrace& trace,
                                    std::span<const BaseStation> stations);

/// Parses the JSON scenario schema (speeds in km/h, distances in m,
/// carrier in Hz). Throws ConfigError with the field path on any violation.
ScenarioConfig scenario_from_json(std::string_view text);

/// Serialises back to the same schema; round-trips through
/// scenario_from_json.
std::string scenario_to_json(const ScenarioConfig& config);

inline constexpr std::string_view kTraceCsvHeader =
    "t_s,position_m,speed_mps,serving_bs,theta_v_rad,theta_rx_rad,f_dmax_hz,shift_hz,spread_hz,"
    "handover";

void write_trace_csv(std::ostream& os, const ScenarioTrace& trace);

}  // namespace mmdoppler
