#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "vtl/drive.hpp"

namespace vtl::kinematics {

/// 10 mph in ft/s.
inline constexpr double kTenMph = 14.667;
/// Largest distance a commanded stop may end short of the line and still
/// count as stopped at it.
inline constexpr double kStopTolerance = 0.5;

struct KinParams {
    double target_speed = kTenMph;  // ft/s
    double accel = 5.0;             // ft/s^2
    double decel = 8.0;             // ft/s^2

    void validate() const;
};

struct VehicleKin {
    std::uint32_t id = 0;
    double progress = 0.0;  // ft along the route, unwrapped
    double speed = 0.0;     // ft/s
    KinParams params;
};

/// Speed cap over a stretch of road, in feet relative to the vehicle (start
/// may be negative when the vehicle is already inside the zone).
struct SpeedZone {
    double start = 0.0;
    double end = 0.0;
    double max_speed = 0.0;
};

struct Lookahead {
    /// Distance to the stop line of the next intersection; only binding
    /// under StopAtLine.
    std::optional<double> stop_line;
    /// Distance to the queueing point behind the vehicle ahead; always binding.
    std::optional<double> queue_gap;
    std::span<const SpeedZone> zones;
};

/// Largest speed reachable by the end of a `dt` step that still allows
/// braking at `decel` down to `max_speed` within `distance`.
double max_entry_speed(double speed, double distance, double max_speed, double decel, double dt) noexcept;

/// Braking distance from `speed` to rest.
constexpr double braking_distance(double speed, double decel) noexcept {
    return speed * speed / (2.0 * decel);
}

/// One fixed step. Cruise and Proceed accelerate toward target speed;
/// StopAtLine additionally honours `ahead.stop_line`, braking just in time
/// to come to rest on it. Progress uses trapezoidal integration and never
/// passes a binding stop point.
VehicleKin advance_kinematics(const VehicleKin& v, DriveCommand cmd, double dt, const Lookahead& ahead);

}  // namespace vtl::kinematics
