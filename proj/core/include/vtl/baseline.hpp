#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "vtl/drive.hpp"
#include "vtl/world.hpp"

// Four-way stop referee. It sees ground truth (no radios): every vehicle makes
// a full stop at the line, dwells, and is then admitted first-come
// first-served, one vehicle in the box at a time.
namespace vtl::baseline {

using VehicleId = std::uint32_t;

struct StopSignParams {
    std::uint32_t min_stop_ms = 1000;
};

struct Arrival {
    VehicleId id = 0;
    std::uint64_t arrival_ms = 0;
    world::Direction approach = world::Direction::north;

    friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// True when a vehicle travelling `other` comes from the right of one
/// travelling `self`, so `self` must yield on a simultaneous arrival.
bool has_right_of_way_over(world::Direction other, world::Direction self) noexcept;

/// Admission order for a set of waiting vehicles: earlier arrival first;
/// among simultaneous arrivals, repeatedly admit a vehicle that has nobody on
/// its right, lowest id if several qualify or if everyone yields to someone.
std::vector<VehicleId> grant_order(std::vector<Arrival> queue);

/// Ground truth the referee needs about one vehicle.
struct VehicleObservation {
    VehicleId id = 0;
    std::optional<world::IntersectionId> intersection;
    std::uint64_t visit_seq = 0;
    world::Direction approach = world::Direction::north;
    double distance_to_stop_line = 0.0;
    bool inside_box = false;
    double speed = 0.0;
};

struct IntersectionState {
    std::vector<Arrival> queue;  // ordered by arrival time
    std::optional<VehicleId> crossing;
};

class StopSignController {
public:
    explicit StopSignController(StopSignParams params) : params_(params) {}

    /// One referee tick. Returns a command for every observed vehicle.
    std::map<VehicleId, DriveCommand> step(std::span<const VehicleObservation> vehicles, std::uint64_t now_ms);

    const std::map<world::IntersectionId, IntersectionState>& intersections() const noexcept { return states_; }
    /// Vehicles in the order they were admitted, per intersection.
    const std::vector<std::pair<world::IntersectionId, VehicleId>>& grant_log() const noexcept { return grants_; }

private:
    struct Clearance {
        world::IntersectionId intersection = 0;
        std::uint64_t seq = 0;
    };

    StopSignParams params_;
    std::map<world::IntersectionId, IntersectionState> states_;
    std::map<VehicleId, Clearance> cleared_;
    std::vector<std::pair<world::IntersectionId, VehicleId>> grants_;
};

}  // namespace vtl::baseline
