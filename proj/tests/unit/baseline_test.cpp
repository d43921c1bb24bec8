#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "vtl/baseline.hpp"

using namespace vtl::baseline;
using vtl::DriveCommand;
using vtl::world::Direction;

namespace {

VehicleObservation at_line(VehicleId id, Direction d, double speed = 0.0) {
    VehicleObservation o;
    o.id = id;
    o.intersection = 1;
    o.visit_seq = 0;
    o.approach = d;
    o.distance_to_stop_line = 0.0;
    o.speed = speed;
    return o;
}

// Independent restatement of the admission rule for a same-tick group: a
// sequence is valid when each pick has nobody remaining on its right (or,
// when everybody does, is the lowest remaining id), and among valid picks
// the lowest id is taken.
std::vector<VehicleId> brute_force(const std::vector<Arrival>& group) {
    std::vector<Arrival> left = group;
    std::vector<VehicleId> out;
    while (!left.empty()) {
        std::vector<VehicleId> candidates;
        for (const auto& a : left) {
            bool yields = false;
            for (const auto& b : left) {
                // b travels toward a's left hand, i.e. comes from a's right.
                const auto from_right = static_cast<Direction>((static_cast<int>(a.approach) + 3) % 4);
                yields = yields || (b.id != a.id && b.approach == from_right);
            }
            if (!yields) {
                candidates.push_back(a.id);
            }
        }
        if (candidates.empty()) {
            for (const auto& a : left) {
                candidates.push_back(a.id);
            }
        }
        const VehicleId pick = *std::min_element(candidates.begin(), candidates.end());
        out.push_back(pick);
        std::erase_if(left, [&](const Arrival& a) { return a.id == pick; });
    }
    return out;
}

}  // namespace

TEST(StopSign, right_of_way_is_traffic_from_the_right) {
    // Westbound traffic comes from a northbound driver's right.
    EXPECT_TRUE(has_right_of_way_over(Direction::west, Direction::north));
    EXPECT_FALSE(has_right_of_way_over(Direction::east, Direction::north));
    EXPECT_FALSE(has_right_of_way_over(Direction::south, Direction::north));
}

TEST(StopSign, first_come_first_served) {
    const auto order = grant_order({{2, 10400, Direction::east}, {1, 10000, Direction::north}});
    EXPECT_EQ(order, (std::vector<VehicleId>{1, 2}));
}

TEST(StopSign, simultaneous_arrival_yields_to_the_right) {
    // Vehicle 2 travels west, so it approaches from northbound vehicle 1's right.
    const auto order = grant_order({{1, 0, Direction::north}, {2, 0, Direction::west}});
    EXPECT_EQ(order, (std::vector<VehicleId>{2, 1}));
}

TEST(StopSign, four_way_tie_falls_back_to_lowest_id) {
    const auto order =
        grant_order({{4, 0, Direction::north}, {3, 0, Direction::east}, {2, 0, Direction::south}, {1, 0, Direction::west}});
    EXPECT_EQ(order.front(), 1u);
    EXPECT_EQ(order.size(), 4u);
}

TEST(StopSign, grant_order_matches_brute_force_over_all_groups) {
    // Every assignment of directions to up to four simultaneous vehicles.
    for (int n = 1; n <= 4; ++n) {
        int combos = 1;
        for (int i = 0; i < n; ++i) {
            combos *= 4;
        }
        for (int code = 0; code < combos; ++code) {
            std::vector<Arrival> group;
            int c = code;
            for (int i = 0; i < n; ++i) {
                group.push_back({static_cast<VehicleId>(10 + i), 500, static_cast<Direction>(c % 4)});
                c /= 4;
            }
            std::vector<Arrival> shuffled = group;
            std::reverse(shuffled.begin(), shuffled.end());
            EXPECT_EQ(grant_order(shuffled), brute_force(group)) << "n=" << n << " code=" << code;
        }
    }
}

TEST(StopSign, lone_vehicle_proceeds_after_dwell) {
    StopSignController ctl(StopSignParams{1000});
    const std::vector<VehicleObservation> v{at_line(1, Direction::north)};
    EXPECT_EQ(ctl.step(v, 5000).at(1), DriveCommand::stop_at_line);
    EXPECT_EQ(ctl.step(v, 5900).at(1), DriveCommand::stop_at_line);
    EXPECT_EQ(ctl.step(v, 6000).at(1), DriveCommand::proceed);
}

TEST(StopSign, rolling_vehicle_is_not_queued) {
    StopSignController ctl(StopSignParams{0});
    const std::vector<VehicleObservation> v{at_line(1, Direction::north, 0.5)};
    EXPECT_EQ(ctl.step(v, 0).at(1), DriveCommand::stop_at_line);
    EXPECT_TRUE(ctl.intersections().empty() || ctl.intersections().at(1).queue.empty());
}

TEST(StopSign, one_vehicle_in_the_box_at_a_time) {
    StopSignController ctl(StopSignParams{1000});
    // Same tick arrival: northbound 1 comes from eastbound 2's right.
    std::vector<VehicleObservation> v{at_line(1, Direction::north), at_line(2, Direction::east)};
    ctl.step(v, 0);
    auto cmd = ctl.step(v, 1000);
    EXPECT_EQ(cmd.at(1), DriveCommand::proceed);
    EXPECT_EQ(cmd.at(2), DriveCommand::stop_at_line);

    v[0].inside_box = true;
    v[0].speed = 5.0;
    cmd = ctl.step(v, 2000);
    EXPECT_EQ(cmd.at(2), DriveCommand::stop_at_line);

    // 1 leaves the box and heads for another intersection.
    v[0].inside_box = false;
    v[0].intersection = 2;
    v[0].visit_seq = 1;
    v[0].distance_to_stop_line = 100.0;
    cmd = ctl.step(v, 2100);
    EXPECT_EQ(cmd.at(2), DriveCommand::proceed);
    EXPECT_EQ(cmd.at(1), DriveCommand::stop_at_line);
    EXPECT_EQ(ctl.grant_log().size(), 2u);
}
