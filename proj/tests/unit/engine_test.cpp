#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "test_support.hpp"
#include "vtl/engine.hpp"

using namespace vtl;

namespace {

double free_flow_s(const Scenario& s, const VehicleSpec& v) {
    return s.route_for(v).length() * s.laps_to_complete / v.kin.target_speed;
}

std::string trace_csv(const SimReport& r) {
    std::ostringstream out;
    write_trace_csv(out, r.trace);
    return out.str();
}

}  // namespace

TEST(Engine, lone_vehicle_never_stops_under_vtl) {
    const Scenario s = test::bundled("lone");
    const SimReport r = run(s);
    ASSERT_EQ(r.vehicles.size(), 1u);
    EXPECT_TRUE(r.vehicles[0].completed);
    EXPECT_EQ(r.vehicles[0].stop_count, 0u);
    EXPECT_EQ(r.messages.spat, 0u);
    EXPECT_EQ(r.messages.wsm, 0u);
}

TEST(Engine, lone_vehicle_stops_at_every_sign) {
    Scenario s = test::bundled("lone");
    s.controller = Controller::stop4;
    const SimReport r = run(s);
    EXPECT_EQ(r.vehicles[0].stop_count, 20u);
    EXPECT_GE(r.vehicles[0].time_stopped_s, 20 * s.stop_sign.min_stop_ms / 1000.0);
}

TEST(Engine, totals_respect_free_flow_bound) {
    for (const char* name : {"fieldtest", "lone", "crossing"}) {
        Scenario s = test::bundled(name);
        for (Controller c : {Controller::vtl, Controller::stop4}) {
            s.controller = c;
            const SimReport r = run(s);
            for (const auto& v : s.vehicles) {
                const auto& res = r.vehicle(v.id);
                EXPECT_TRUE(res.completed);
                EXPECT_GE(res.total_time_s, free_flow_s(s, v)) << name << " " << v.id;
                EXPECT_DOUBLE_EQ(res.laps_completed, s.laps_to_complete);
            }
        }
    }
}

TEST(Engine, same_seed_same_report_and_trace) {
    Scenario s = test::bundled("fieldtest");
    s.seed = 7;
    const RunOptions opts{.record_trace = true, .on_tick = {}};
    const SimReport a = run(s, opts);
    const SimReport b = run(s, opts);
    EXPECT_EQ(to_json(a), to_json(b));
    EXPECT_EQ(trace_csv(a), trace_csv(b));
    EXPECT_FALSE(a.trace.empty());
}

TEST(Engine, beacons_every_100_ms) {
    Scenario s = test::bundled("fieldtest");
    const SimReport r = run(s);
    // Two vehicles beaconing until each finishes.
    const double expected = (r.vehicle(1).total_time_s + r.vehicle(2).total_time_s) * 10.0;
    EXPECT_NEAR(static_cast<double>(r.messages.bsm), expected, 4.0);
    for (const auto& g : r.ipg) {
        EXPECT_GE(g.mean_ms, 100.0);
        EXPECT_EQ(g.max_ms % 100, 0u);
    }
}

TEST(Engine, lossless_fieldtest_boxes_are_exclusive) {
    Scenario s = test::bundled("fieldtest");
    s.channel = channel::ChannelParams::lossless();
    int violations = 0;
    RunOptions opts;
    opts.on_tick = [&](const TickView& t) {
        for (const auto& a : t.vehicles) {
            for (const auto& b : t.vehicles) {
                if (a.id < b.id && a.in_box && a.in_box == b.in_box && !world::same_axis(a.entry, b.entry)) {
                    ++violations;
                }
            }
        }
    };
    run(s, opts);
    EXPECT_EQ(violations, 0);
}

TEST(Engine, relabeling_vehicles_permutes_the_report) {
    Scenario s = test::bundled("fieldtest");
    s.controller = Controller::stop4;
    const SimReport a = run(s);
    std::swap(s.vehicles[0].id, s.vehicles[1].id);
    const SimReport b = run(s);
    const std::map<std::uint32_t, std::uint32_t> relabel{{1, 2}, {2, 1}};
    for (const auto& v : a.vehicles) {
        auto w = b.vehicle(relabel.at(v.id));
        w.id = v.id;
        EXPECT_EQ(v, w);
    }
}

TEST(Engine, timeout_carries_partial_report) {
    Scenario s = test::bundled("fieldtest");
    s.max_time_s = 30.0;
    try {
        run(s);
        FAIL();
    } catch (const SimulationTimeout& e) {
        EXPECT_TRUE(e.partial().timed_out);
        EXPECT_NEAR(e.partial().sim_time_s, 30.0, 0.1);
        EXPECT_EQ(e.partial().vehicles.size(), 2u);
        EXPECT_FALSE(e.partial().vehicles[0].completed);
        EXPECT_NE(std::string(e.what()).find("deadlock"), std::string::npos);
    }
}

TEST(Engine, stepping_by_hand_matches_run) {
    const Scenario s = test::bundled("lone");
    Simulation sim(s);
    while (sim.step()) {
    }
    EXPECT_TRUE(sim.finished());
    EXPECT_EQ(to_json(sim.report()), to_json(run(s)));
}

TEST(Report, json_round_trip) {
    Scenario s = test::bundled("crossing");
    const SimReport r = run(s);
    EXPECT_EQ(report_from_json(to_json(r)), r);
    EXPECT_THROW(report_from_json("{}"), std::invalid_argument);
}

TEST(Report, trace_csv_header) {
    std::ostringstream out;
    write_trace_csv(out, {TraceRow{3, 1, 1.5, 2.25, 14.667, "Leader"}});
    EXPECT_EQ(out.str(), "tick,vehicle,x,y,speed,protocol_state\n3,1,1.500,2.250,14.667,Leader\n");
}
