#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mmdoppler/errors.hpp"
#include "mmdoppler/geometry.hpp"
#include "mmdoppler/train.hpp"
#include "mmdoppler/units.hpp"

using namespace mmdoppler;

namespace {

ScenarioConfig uniform_layout(double speed_kmh, std::size_t stations, double spacing) {
    ScenarioConfig c;
    c.carrier = 28e9;
    for (std::size_t i = 0; i < stations; ++i) {
        c.stations.push_back({spacing * (static_cast<double>(i) + 0.5), 20.0});
    }
    c.track_length = spacing * static_cast<double>(stations);
    const double v = kmh_to_mps(speed_kmh);
    c.speed_profile = {{0.0, v}, {c.track_length / std::max(v, 1.0) + 10.0, v}};
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST(BeamPolicy, EndpointsExact) {
    EXPECT_EQ(beamwidth_for(500.0, 28.0), 1.0);
    EXPECT_EQ(beamwidth_for(50.0, 28.0), 10.0);
    EXPECT_EQ(beamwidth_for(25.0, 28.0), 10.0);
    EXPECT_EQ(beamwidth_for(0.0, 28.0), 10.0);
    EXPECT_EQ(beamwidth_for(5000.0, 28.0), 1.0);
}

TEST(BeamPolicy, ControllerLawInUnclampedRange) {
    for (double v = 51.0; v < 500.0; v += 7.0) {
        const double w = beamwidth_for(v, 28.0);
        EXPECT_NEAR(w * v * 28.0, 1.4e4, 1e-9) << v;
    }
}

TEST(BeamPolicy, MonotoneInSpeedAndCarrier) {
    for (double fc : {3.5, 28.0, 60.0}) {
        double prev = beamwidth_for(0.0, fc);
        for (double v = 1.0; v <= 800.0; v += 1.0) {
            const double w = beamwidth_for(v, fc);
            EXPECT_LE(w, prev);
            prev = w;
        }
    }
    for (double v : {60.0, 200.0, 500.0}) {
        double prev = beamwidth_for(v, 1.0);
        for (double fc = 1.0; fc <= 100.0; fc += 0.5) {
            const double w = beamwidth_for(v, fc);
            EXPECT_LE(w, prev);
            prev = w;
        }
    }
}

TEST(BeamPolicy, Rejections) {
    EXPECT_THROW(beamwidth_for(10.0, 0.0), DomainError);
    EXPECT_THROW(beamwidth_for(-1.0, 28.0), DomainError);
    BeamPolicy bad;
    bad.theta_min_deg = 20.0;
    EXPECT_THROW(beamwidth_for(100.0, 28.0, bad), DomainError);
}

TEST(ThetaV, Geometry) {
    const BaseStation bs{1000.0, 10.0};
    EXPECT_DOUBLE_EQ(theta_v_of(1000.0, bs), kPi / 2);
    EXPECT_NEAR(rad_to_deg(theta_v_of(0.0, bs)), 0.5729386976834859, 1e-12);
    EXPECT_NEAR(theta_v_of(1e9, bs), kPi, 1e-7);
    EXPECT_NEAR(std::abs(theta_v_of(1000.0, bs, -1.0)), kPi / 2, 1e-15);
    EXPECT_NEAR(std::abs(theta_v_of(0.0, bs, -1.0)), kPi - std::atan2(10.0, 1000.0), 1e-12);
}

TEST(SelectBs, NearestWithLowerIndexTies) {
    const std::vector<BaseStation> st{{0.0, 10.0}, {100.0, 10.0}, {300.0, 10.0}};
    EXPECT_EQ(select_bs(50.0, st), 0u);
    EXPECT_EQ(select_bs(100.0, st), 1u);
    EXPECT_EQ(select_bs(200.0, st), 1u);
    EXPECT_EQ(select_bs(201.0, st), 2u);
    EXPECT_THROW(select_bs(0.0, std::vector<BaseStation>{}), DomainError);
}

TEST(SpeedProfile, PiecewiseLinear) {
    const std::vector<SpeedKnot> p{{0.0, 0.0}, {10.0, 20.0}, {20.0, 20.0}};
    EXPECT_EQ(speed_at(p, 5.0), 10.0);
    EXPECT_EQ(speed_at(p, 15.0), 20.0);
    EXPECT_EQ(speed_at(p, 99.0), 20.0);
}

TEST(Simulate, ConstantTopSpeedAbeamSpread) {
    auto c = uniform_layout(500.0, 3, 2000.0);
    const auto trace = simulate(c);
    const auto rows = abeam_rows(trace, c.stations);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t r : rows) {
        EXPECT_NEAR(trace.rows[r].spread, 226.4, 0.5);
        EXPECT_NEAR(trace.rows[r].spread, 226.0, 1.0);
    }
}

TEST(Simulate, UniformLayoutHandovers) {
    for (std::size_t n : {2u, 4u, 7u}) {
        auto c = uniform_layout(200.0, n, 1500.0);
        const auto trace = simulate(c);
        EXPECT_EQ(trace.handover_count(), n - 1);
        for (std::size_t i = 0; i < trace.rows.size(); ++i) {
            const bool changed = i > 0 && trace.rows[i].serving_bs != trace.rows[i - 1].serving_bs;
            EXPECT_EQ(trace.rows[i].handover, changed);
        }
    }
}

TEST(Simulate, ZeroSpeed) {
    auto c = uniform_layout(0.0, 3, 500.0);
    c.speed_profile = {{0.0, 0.0}, {5.0, 0.0}};
    const auto trace = simulate(c);
    EXPECT_EQ(trace.rows.size(), 501u);
    EXPECT_EQ(trace.handover_count(), 0u);
    for (const auto& r : trace.rows) {
        EXPECT_EQ(r.shift, 0.0);
        EXPECT_EQ(r.spread, 0.0);
    }
}

TEST(Simulate, TracePhysicality) {
    auto c = uniform_layout(300.0, 4, 800.0);
    c.spread_mode = SpreadMode::Exact;
    const auto trace = simulate(c);
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const auto& r = trace.rows[i];
        EXPECT_LE(std::abs(r.shift), r.f_dmax * (1 + 1e-15));
        EXPECT_GE(r.spread, 0.0);
        if (i > 0) {
            EXPECT_GE(r.position, trace.rows[i - 1].position);
        }
    }
    // Each station is passed exactly once.
    for (const auto& bs : c.stations) {
        int crossings = 0;
        for (std::size_t i = 1; i < trace.rows.size(); ++i) {
            crossings += (trace.rows[i - 1].position < bs.along) != (trace.rows[i].position < bs.along);
        }
        EXPECT_EQ(crossings, 1);
    }
}

TEST(Simulate, TrapezoidalPosition) {
    ScenarioConfig c = uniform_layout(0.0, 1, 1e6);
    c.speed_profile = {{0.0, 0.0}, {10.0, 10.0}};
    c.time_step = 0.5;
    const auto trace = simulate(c);
    EXPECT_NEAR(trace.rows.back().t, 10.0, 1e-12);
    EXPECT_NEAR(trace.rows.back().position, 50.0, 1e-9);
}

TEST(Simulate, HysteresisDelaysHandover) {
    auto c = uniform_layout(100.0, 2, 1000.0);
    const auto plain = simulate(c);
    c.hysteresis = 50.0;
    const auto sticky = simulate(c);
    auto first = [](const ScenarioTrace& t) {
        return std::find_if(t.rows.begin(), t.rows.end(), [](const TraceRow& r) { return r.handover; })->position;
    };
    EXPECT_EQ(sticky.handover_count(), 1u);
    EXPECT_GT(first(sticky), first(plain) + 20.0);
}

TEST(Simulate, DemoTrajectoryControlsSpread) {
    const auto c = scenario_from_json(slurp(MMDOPPLER_DEMO_CONFIG));
    const auto trace = simulate(c);
    EXPECT_EQ(trace.handover_count(), c.stations.size() - 1);
    const auto rows = abeam_rows(trace, c.stations);
    ASSERT_EQ(rows.size(), c.stations.size());
    const auto [mn, mx] = std::minmax_element(rows.begin(), rows.end(), [&](auto a, auto b) {
        return trace.rows[a].spread < trace.rows[b].spread;
    });
    EXPECT_LE(trace.rows[*mx].spread / trace.rows[*mn].spread, 1.1 / 0.9);
}

TEST(Config, JsonRoundTripBitExact) {
    auto c = uniform_layout(123.0, 3, 777.0);
    c.hysteresis = 2.5;
    c.time_step = 0.02;
    c.spread_mode = SpreadMode::Exact;
    c.policy.theta_max_deg = 8.0;
    const auto back = scenario_from_json(scenario_to_json(c));
    EXPECT_EQ(scenario_to_json(back), scenario_to_json(c));
    EXPECT_EQ(back.speed_profile[1].speed, c.speed_profile[1].speed);
    EXPECT_EQ(back.stations[2].along, c.stations[2].along);
}

TEST(Config, ErrorsNameTheField) {
    auto field_of = [](const std::string& text) {
        try {
            scenario_from_json(text);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    const std::string head = R"({"schema_version":1,"track_length_m":100,"carrier_hz":28e9,)";
    EXPECT_EQ(field_of(head + R"("base_stations":[{"along_m":1,"lateral_m":0}],"speed_profile":[{"t_s":0,"speed_kmh":1}]})"),
              "base_stations[0].lateral_m");
    EXPECT_EQ(field_of(head + R"("base_stations":[{"along_m":1,"lateral_m":3}],"speed_profile":[{"t_s":0,"speed_kmh":-1}]})"),
              "speed_profile[0].speed");
    EXPECT_EQ(field_of(head + R"("base_stations":[],"speed_profile":[{"t_s":0,"speed_kmh":1}]})"), "base_stations");
    EXPECT_EQ(field_of(head + R"("bogus":1,"base_stations":[{"along_m":1,"lateral_m":3}],"speed_profile":[{"t_s":0,"speed_kmh":1}]})"),
              "bogus");
    EXPECT_EQ(field_of("{"), "<root>");
}

TEST(TraceCsv, HeaderAndPrecision) {
    auto c = uniform_layout(100.0, 1, 100.0);
    c.speed_profile = {{0.0, 1.0 / 3.0}, {0.02, 1.0 / 3.0}};
    std::ostringstream os;
    write_trace_csv(os, simulate(c));
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), kTraceCsvHeader);
    EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
}
