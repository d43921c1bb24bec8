#include <gtest/gtest.h>

#include <cmath>

#include "vtl/kinematics.hpp"

using namespace vtl::kinematics;
using vtl::DriveCommand;

namespace {

VehicleKin car(double speed, double progress = 0.0) {
    return VehicleKin{.id = 1, .progress = progress, .speed = speed, .params = KinParams{}};
}

Lookahead stop_at(double d) {
    Lookahead a;
    a.stop_line = d;
    return a;
}

}  // namespace

TEST(Kinematics, braking_distance_closed_form) {
    EXPECT_NEAR(braking_distance(14.667, 8.0), 14.667 * 14.667 / 16.0, 1e-12);
    EXPECT_NEAR(braking_distance(14.667, 8.0), 13.45, 0.005);
}

TEST(Kinematics, braking_starts_at_closed_form_distance) {
    // Comfortably beyond the braking distance plus one step of travel: keep speed.
    const auto far = advance_kinematics(car(kTenMph), DriveCommand::stop_at_line, 0.1, stop_at(20.0));
    EXPECT_DOUBLE_EQ(far.speed, kTenMph);
    // At v^2/2a the vehicle must already be slowing.
    const auto at = advance_kinematics(car(kTenMph), DriveCommand::stop_at_line, 0.1,
                                       stop_at(braking_distance(kTenMph, 8.0)));
    EXPECT_LT(at.speed, kTenMph);
}

TEST(Kinematics, from_rest_one_second) {
    const auto v = advance_kinematics(car(0.0), DriveCommand::cruise, 1.0, {});
    EXPECT_DOUBLE_EQ(v.speed, 5.0);
    EXPECT_DOUBLE_EQ(v.progress, 2.5);
}

TEST(Kinematics, saturates_at_target) {
    const auto v = advance_kinematics(car(kTenMph), DriveCommand::cruise, 0.1, {});
    EXPECT_DOUBLE_EQ(v.speed, kTenMph);
    EXPECT_NEAR(v.progress, kTenMph * 0.1, 1e-12);
}

TEST(Kinematics, stop_line_ignored_unless_commanded) {
    const auto v = advance_kinematics(car(kTenMph), DriveCommand::proceed, 0.1, stop_at(1.0));
    EXPECT_DOUBLE_EQ(v.speed, kTenMph);
}

TEST(Kinematics, comes_to_rest_on_the_line) {
    for (double start : {5.0, 13.45, 30.0, 77.7, 200.0}) {
        VehicleKin v = car(kTenMph);
        for (int i = 0; i < 1000 && (v.speed > 0.0 || i == 0); ++i) {
            v = advance_kinematics(v, DriveCommand::stop_at_line, 0.1, stop_at(start - v.progress));
            ASSERT_LE(v.progress, start + 0.5) << start;
        }
        EXPECT_EQ(v.speed, 0.0);
        EXPECT_NEAR(v.progress, start, kStopTolerance) << start;
    }
}

TEST(Kinematics, queue_gap_binds_under_cruise) {
    VehicleKin v = car(kTenMph);
    for (int i = 0; i < 200; ++i) {
        Lookahead a;
        a.queue_gap = 40.0 - v.progress;
        v = advance_kinematics(v, DriveCommand::cruise, 0.1, a);
    }
    EXPECT_EQ(v.speed, 0.0);
    EXPECT_LE(v.progress, 40.0);
    EXPECT_NEAR(v.progress, 40.0, kStopTolerance);
}

TEST(Kinematics, speed_zone_is_respected_on_entry) {
    VehicleKin v = car(kTenMph);
    for (int i = 0; i < 100; ++i) {
        const SpeedZone z{50.0 - v.progress, 70.0 - v.progress, 5.0};
        Lookahead a;
        a.zones = std::span(&z, 1);
        v = advance_kinematics(v, DriveCommand::cruise, 0.1, a);
        if (v.progress >= 50.0 && v.progress <= 70.0) {
            EXPECT_LE(v.speed, 5.0 + 1e-9) << v.progress;
        }
    }
}

TEST(Kinematics, rejects_non_positive_step) {
    EXPECT_THROW(advance_kinematics(car(0.0), DriveCommand::cruise, 0.0, {}), std::invalid_argument);
}
