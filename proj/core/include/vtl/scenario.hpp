#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vtl/baseline.hpp"
#include "vtl/channel.hpp"
#include "vtl/kinematics.hpp"
#include "vtl/protocol.hpp"
#include "vtl/world.hpp"

namespace vtl {

enum class Controller : std::uint8_t { vtl, stop4 };

std::string_view to_string(Controller c) noexcept;
std::optional<Controller> controller_from_string(std::string_view s) noexcept;

enum class Sense : std::uint8_t { as_listed, clockwise, counter_clockwise };

struct RouteSpec {
    std::string name;
    std::vector<world::Position> waypoints;
};

struct WorldSpec {
    double box_half_width = world::Intersection::kDefaultBoxHalfWidth;
    /// Speed cap within `corner_zone` feet either side of a route corner.
    double corner_speed = 7.0;
    double corner_zone = 10.0;
    std::vector<world::Intersection> intersections;
    std::vector<RouteSpec> routes;
};

struct VehicleSpec {
    std::uint32_t id = 0;
    std::string route;
    Sense sense = Sense::as_listed;
    double start_progress = 0.0;  // ft from the route's first waypoint, along the vehicle's sense
    std::optional<double> initial_speed;  // defaults to target speed
    kinematics::KinParams kin;
};

struct Scenario {
    std::string name = "unnamed";
    Controller controller = Controller::vtl;
    std::uint64_t seed = 1;
    std::uint32_t tick_ms = 100;
    std::uint32_t laps_to_complete = 5;
    double max_time_s = 3600.0;
    double queue_spacing = 20.0;
    WorldSpec world;
    std::vector<VehicleSpec> vehicles;
    channel::ChannelParams channel;
    protocol::VtlParams vtl;
    baseline::StopSignParams stop_sign;

    /// Throws ScenarioError{invariant} naming the offending field.
    void validate() const;
    /// The vehicle's route oriented in its direction of travel.
    world::Route route_for(const VehicleSpec& v) const;
};

class ScenarioError : public std::runtime_error {
public:
    enum class Kind : std::uint8_t { io, parse, schema, invariant };

    ScenarioError(Kind kind, std::string field, const std::string& message);

    Kind kind() const noexcept { return kind_; }
    /// Dotted path of the offending field, or "line:column" for parse errors.
    const std::string& field() const noexcept { return field_; }

private:
    Kind kind_;
    std::string field_;
};

/// Parses and validates a scenario document (JSON syntax, closed key set).
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON form; `load_scenario(dump_scenario(s))` reproduces `s`.
std::string dump_scenario(const Scenario& s);

}  // namespace vtl
