#include "mmdoppler/train.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <ostream>
#include <iterator>

#include "mmdoppler/approx.hpp"
#include "mmdoppler/errors.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/units.hpp"

namespace mmdoppler {

double beamwidth_for(double speed_kmh, double carrier_ghz, const BeamPolicy& policy) {
    if (!(carrier_ghz > 0.0)) {
        throw DomainError("carrier must be > 0");
    }
    if (!(speed_kmh >= 0.0)) {
        throw DomainError("speed must be >= 0");
    }
    if (!(policy.coefficient > 0.0) || !(policy.theta_min_deg > 0.0) ||
        policy.theta_min_deg > policy.theta_max_deg) {
        throw DomainError("beam policy needs coefficient > 0 and 0 < theta_min <= theta_max");
    }
    if (speed_kmh <= policy.v_low_kmh) {
        return policy.theta_max_deg;
    }
    const double raw = policy.coefficient / (carrier_ghz * speed_kmh);
    return std::clamp(raw, policy.theta_min_deg, policy.theta_max_deg);
}

double theta_v_of(double position, const BaseStation& bs, double heading) {
    const double vx = heading < 0.0 ? -1.0 : 1.0;
    const double dx = bs.along - position;
    const double dy = bs.lateral;
    // Signed angle from velocity (vx, 0) to line of sight (dx, dy).
    return std::atan2(vx * dy, vx * dx);
}

namespace {

double distance_sq(double position, const BaseStation& bs) {
    const double dx = bs.along - position;
    return dx * dx + bs.lateral * bs.lateral;
}

}  // namespace

std::size_t select_bs(double position, std::span<const BaseStation> stations) {
    if (stations.empty()) {
        throw DomainError("station list is empty");
    }
    std::size_t best = 0;
    double best_d = distance_sq(position, stations[0]);
    for (std::size_t i = 1; i < stations.size(); ++i) {
        const double d = distance_sq(position, stations[i]);
        if (d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

double speed_at(std::span<const SpeedKnot> profile, double t) {
    if (profile.empty()) {
        throw DomainError("empty speed profile");
    }
    if (t <= profile.front().t) {
        return profile.front().speed;
    }
    if (t >= profile.back().t) {
        return profile.back().speed;
    }
    auto hi = std::upper_bound(profile.begin(), profile.end(), t,
                               [](double v, const SpeedKnot& k) { return v < k.t; });
    auto lo = std::prev(hi);
    const double frac = (t - lo->t) / (hi->t - lo->t);
    return lo->speed + frac * (hi->speed - lo->speed);
}

void validate(const ScenarioConfig& c) {
    if (!(c.track_length > 0.0)) {
        throw ConfigError("track_length_m", "must be > 0");
    }
    if (!(c.carrier > 0.0)) {
        throw ConfigError("carrier_hz", "must be > 0");
    }
    if (!(c.time_step > 0.0)) {
        throw ConfigError("time_step_s", "must be > 0");
    }
    if (!(c.hysteresis >= 0.0)) {
        throw ConfigError("handover_hysteresis_m", "must be >= 0");
    }
    if (!(c.start_position >= 0.0 && c.start_position <= c.track_length)) {
        throw ConfigError("start_position_m", "must lie within [0, track_length_m]");
    }
    if (c.stations.empty()) {
        throw ConfigError("base_stations", "at least one base station is required");
    }
    for (std::size_t i = 0; i < c.stations.size(); ++i) {
        if (!(c.stations[i].lateral > 0.0)) {
            throw ConfigError(fmt::format("base_stations[{}].lateral_m", i), "must be > 0");
        }
        if (!std::isfinite(c.stations[i].along)) {
            throw ConfigError(fmt::format("base_stations[{}].along_m", i), "must be finite");
        }
    }
    if (c.speed_profile.empty()) {
        throw ConfigError("speed_profile", "at least one knot is required");
    }
    if (c.speed_profile.front().t != 0.0) {
        throw ConfigError("speed_profile[0].t_s", "first knot must be at t = 0");
    }
    for (std::size_t i = 0; i < c.speed_profile.size(); ++i) {
        if (!(c.speed_profile[i].speed >= 0.0)) {
            throw ConfigError(fmt::format("speed_profile[{}].speed", i), "must be >= 0");
        }
        if (i > 0 && !(c.speed_profile[i].t > c.speed_profile[i - 1].t)) {
            throw ConfigError(fmt::format("speed_profile[{}].t_s", i),
                              "knot times must be strictly increasing");
        }
    }
    const BeamPolicy& p = c.policy;
    if (!(p.coefficient > 0.0)) {
        throw ConfigError("policy.coefficient", "must be > 0");
    }
    if (!(p.theta_min_deg > 0.0)) {
        throw ConfigError("policy.theta_min_deg", "must be > 0");
    }
    if (!(p.theta_max_deg >= p.theta_min_deg) || p.theta_max_deg > 360.0) {
        throw ConfigError("policy.theta_max_deg", "must lie in [theta_min_deg, 360]");
    }
    if (!(p.v_low_kmh >= 0.0)) {
        throw ConfigError("policy.v_low_kmh", "must be >= 0");
    }
}

std::size_t ScenarioTrace::handover_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const TraceRow& r) { return r.handover; }));
}

namespace {

TraceRow make_row(const ScenarioConfig& c, double t, double position, double speed,
                  std::size_t serving) {
    TraceRow row;
    row.t = t;
    row.position = position;
    row.speed = speed;
    row.serving_bs = serving;
    row.theta_v = theta_v_of(position, c.stations[serving]);
    const double width_deg = beamwidth_for(mps_to_kmh(speed), c.carrier * 1e-9, c.policy);
    row.theta_rx = deg_to_rad(width_deg);
    row.f_dmax = max_doppler(speed, c.carrier);
    if (c.spread_mode == SpreadMode::Approx) {
        const auto a = approx_shift_spread(row.theta_v, row.theta_rx, row.f_dmax);
        row.shift = a.shift;
        row.spread = a.spread;
    } else {
        const BeamGeometry geom = make_geometry(row.theta_rx, row.theta_rx, row.theta_v);
        const auto s = doppler_support(geom, MotionState{speed, c.carrier, row.f_dmax});
        row.shift = s.shift;
        row.spread = s.spread;
    }
    return row;
}

}  // namespace

ScenarioTrace simulate(const ScenarioConfig& c) {
    validate(c);
    ScenarioTrace trace;
    const double t_end = c.speed_profile.back().t;
    const std::span<const BaseStation> stations(c.stations);

    double t = 0.0;
    double position = c.start_position;
    double speed = speed_at(c.speed_profile, 0.0);
    std::size_t serving = select_bs(position, stations);
    for (std::size_t step = 0;; ++step) {
        const std::size_t candidate = select_bs(position, stations);
        bool handover = false;
        if (candidate != serving) {
            const double gain = std::sqrt(distance_sq(position, stations[serving])) -
                                std::sqrt(distance_sq(position, stations[candidate]));
            if (c.hysteresis == 0.0 || gain > c.hysteresis) {
                serving = candidate;
                handover = true;
            }
        }
        TraceRow row = make_row(c, t, position, speed, serving);
        row.handover = handover;
        trace.rows.push_back(row);

        const double t_next = static_cast<double>(step + 1) * c.time_step;
        if (t_next > t_end + 1e-9 * c.time_step) {
            break;
        }
        const double speed_next = speed_at(c.speed_profile, t_next);
        const double position_next = position + 0.5 * c.time_step * (speed + speed_next);
        if (position_next > c.track_length) {
            break;
        }
        t = t_next;
        speed = speed_next;
        position = position_next;
    }
    return trace;
}

std::vector<std::size_t> abeam_rows(const ScenarioTrace& trace,
                                    std::span<const BaseStation> stations) {
    std::vector<std::size_t> out;
    if (trace.rows.empty()) {
        return out;
    }
    for (const BaseStation& bs : stations) {
        for (std::size_t i = 0; i < trace.rows.size(); ++i) {
            const double here = trace.rows[i].position - bs.along;
            if (here == 0.0) {
                out.push_back(i);
                break;
            }
            if (i > 0) {
                const double before = trace.rows[i - 1].position - bs.along;
                if (before < 0.0 && here > 0.0) {
                    out.push_back(std::abs(before) <= std::abs(here) ? i - 1 : i);
                    break;
                }
            }
        }
    }
    return out;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError(field, message);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            fail(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
        }
    }
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path.empty() ? "<root>" : path, "must be an object");
    }
    return j;
}

double number(const json& obj, const std::string& key, const std::string& path) {
    const std::string field = path.empty() ? key : path + "." + key;
    if (!obj.contains(key)) {
        fail(field, "required field missing");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        fail(field, "must be a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
        fail(field, "must be finite");
    }
    return d;
}

double number_or(const json& obj, const std::string& key, const std::string& path,
                 double fallback) {
    return obj.contains(key) ? number(obj, key, path) : fallback;
}

}  // namespace

ScenarioConfig scenario_from_json(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("<root>", fmt::format("invalid JSON: {}", e.what()));
    }
    require_object(root, "");
    reject_unknown(root, "",
                   {"schema_version", "track_length_m", "carrier_hz", "time_step_s",
                    "start_position_m", "handover_hysteresis_m", "spread_mode", "policy",
                    "base_stations", "speed_profile"});
    if (root.contains("schema_version")) {
        if (!root["schema_version"].is_number_integer() || root["schema_version"].get<int>() != 1) {
            fail("schema_version", "only schema version 1 is supported");
        }
    }

    ScenarioConfig c;
    c.track_length = number(root, "track_length_m", "");
    c.carrier = number(root, "carrier_hz", "");
    c.time_step = number_or(root, "time_step_s", "", c.time_step);
    c.start_position = number_or(root, "start_position_m", "", c.start_position);
    c.hysteresis = number_or(root, "handover_hysteresis_m", "", c.hysteresis);

    if (root.contains("spread_mode")) {
        const json& m = root["spread_mode"];
        if (m == "approx") {
            c.spread_mode = SpreadMode::Approx;
        } else if (m == "exact") {
            c.spread_mode = SpreadMode::Exact;
        } else {
            fail("spread_mode", "must be \"approx\" or \"exact\"");
        }
    }

    if (root.contains("policy")) {
        const json& p = require_object(root["policy"], "policy");
        reject_unknown(p, "policy", {"coefficient", "theta_max_deg", "theta_min_deg", "v_low_kmh"});
        c.policy.coefficient = number_or(p, "coefficient", "policy", c.policy.coefficient);
        c.policy.theta_max_deg = number_or(p, "theta_max_deg", "policy", c.policy.theta_max_deg);
        c.policy.theta_min_deg = number_or(p, "theta_min_deg", "policy", c.policy.theta_min_deg);
        c.policy.v_low_kmh = number_or(p, "v_low_kmh", "policy", c.policy.v_low_kmh);
    }

    if (!root.contains("base_stations") || !root["base_stations"].is_array()) {
        fail("base_stations", "required array missing");
    }
    const json& stations = root["base_stations"];
    for (std::size_t i = 0; i < stations.size(); ++i) {
        const std::string path = fmt::format("base_stations[{}]", i);
        const json& s = require_object(stations[i], path);
        reject_unknown(s, path, {"along_m", "lateral_m"});
        c.stations.push_back(BaseStation{number(s, "along_m", path), number(s, "lateral_m", path)});
    }

    if (!root.contains("speed_profile") || !root["speed_profile"].is_array()) {
        fail("speed_profile", "required array missing");
    }
    const json& profile = root["speed_profile"];
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const std::string path = fmt::format("speed_profile[{}]", i);
        const json& k = require_object(profile[i], path);
        reject_unknown(k, path, {"t_s", "speed_kmh", "speed_mps"});
        const bool kmh = k.contains("speed_kmh");
        const bool mps = k.contains("speed_mps");
        if (kmh == mps) {
            fail(path, "exactly one of speed_kmh or speed_mps is required");
        }
        const double speed =
            kmh ? kmh_to_mps(number(k, "speed_kmh", path)) : number(k, "speed_mps", path);
        c.speed_profile.push_back(SpeedKnot{number(k, "t_s", path), speed});
    }

    validate(c);
    return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
    json root;
    root["schema_version"] = 1;
    root["track_length_m"] = c.track_length;
    root["carrier_hz"] = c.carrier;
    root["time_step_s"] = c.time_step;
    root["start_position_m"] = c.start_position;
    root["handover_hysteresis_m"] = c.hysteresis;
    root["spread_mode"] = c.spread_mode == SpreadMode::Approx ? "approx" : "exact";
    root["policy"] = {{"coefficient", c.policy.coefficient},
                      {"theta_max_deg", c.policy.theta_max_deg},
                      {"theta_min_deg", c.policy.theta_min_deg},
                      {"v_low_kmh", c.policy.v_low_kmh}};
    root["base_stations"] = json::array();
    for (const auto& s : c.stations) {
        root["base_stations"].push_back({{"along_m", s.along}, {"lateral_m", s.lateral}});
    }
    // SI speeds so that a round trip is bit-exact.
    root["speed_profile"] = json::array();
    for (const auto& k : c.speed_profile) {
        root["speed_profile"].push_back({{"t_s", k.t}, {"speed_mps", k.speed}});
    }
    return root.dump(2);
}

void write_trace_csv(std::ostream& os, const ScenarioTrace& trace) {
    os << kTraceCsvHeader << '\n';
    for (const TraceRow& r : trace.rows) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                          r.t, r.position, r.speed, r.serving_bs, r.theta_v, r.theta_rx, r.f_dmax,
                          r.shift, r.spread, r.handover ? 1 : 0);
    }
}

}  // namespace mmdoppler
