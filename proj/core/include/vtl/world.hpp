#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

// Planar geometry of the road network. All lengths are in feet, x grows east
// and y grows north.
namespace vtl::world {

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

double distance(Position a, Position b) noexcept;

/// Direction of travel. A vehicle on the "east" approach is travelling east.
enum class Direction : std::uint8_t { north = 0, east = 1, south = 2, west = 3 };

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> direction_from_string(std::string_view s) noexcept;

Direction opposite(Direction d) noexcept;
/// The direction a vehicle travelling in `d` has on its right hand side.
Direction right_of(Direction d) noexcept;
Direction left_of(Direction d) noexcept;
bool same_axis(Direction a, Direction b) noexcept;

/// Compass heading in degrees clockwise from north.
double heading_degrees(Direction d) noexcept;
/// Snap a compass heading to the closest cardinal direction.
Direction nearest_direction(double heading_deg) noexcept;

/// Unit step of one foot in direction `d`.
Position unit(Direction d) noexcept;

/// Green-mask bit for a direction: bit0=N, bit1=E, bit2=S, bit3=W.
constexpr std::uint8_t direction_bit(Direction d) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
}
constexpr std::uint8_t kNorthSouthMask = 0b0101;
constexpr std::uint8_t kEastWestMask = 0b1010;
/// Both directions of the axis `d` travels along.
constexpr std::uint8_t axis_mask(Direction d) noexcept {
    return (direction_bit(d) & kNorthSouthMask) ? kNorthSouthMask : kEastWestMask;
}
/// True if no N/S bit and E/W bit are set together and the upper nibble is clear.
constexpr bool is_conflict_free(std::uint8_t green_mask) noexcept {
    if (green_mask & 0xF0) {
        return false;
    }
    return !((green_mask & kNorthSouthMask) && (green_mask & kEastWestMask));
}

using IntersectionId = std::uint32_t;

struct Approach {
    IntersectionId intersection_id = 0;
    Direction direction = Direction::north;
    Position stop_line;
};

struct Intersection {
    static constexpr double kDefaultBoxHalfWidth = 15.0;

    IntersectionId id = 0;
    Position center;
    double box_half_width = kDefaultBoxHalfWidth;

    /// Approach used by traffic travelling in `d`; its stop line sits on the
    /// box edge upstream of the center.
    Approach approach(Direction d) const noexcept;
    /// Open box: a vehicle standing on a stop line (within 1e-6 ft) is outside.
    bool contains(Position p) const noexcept;
};

struct StopLineDistance {
    double feet = 0.0;
    /// Set when the position is downstream of the line; `feet` is then 0.
    bool past_stop_line = false;
};

/// Distance along the travel axis from `pos` to the approach's stop line.
StopLineDistance distance_to_stop_line(Position pos, const Approach& approach) noexcept;

/// True iff `pos` is on the approach matching `heading`, upstream of (or on)
/// its stop line, and no more than `radius` feet from it. A position is on
/// the approach when its lateral offset from the axis is within the box
/// half-width. Throws std::invalid_argument when radius <= 0.
bool is_approaching(Position pos, Direction heading, const Intersection& intersection,
                    double radius);

/// Orthogonal approaches of one intersection conflict. Throws
/// std::domain_error when the approaches belong to different intersections.
bool conflicts(const Approach& a, const Approach& b);

/// Where a route passes through an intersection center.
struct Crossing {
    double arc = 0.0;  // route progress of the center
    IntersectionId intersection_id = 0;
    Direction entry = Direction::north;
    Direction exit = Direction::north;
};

/// A closed rectilinear loop traversed in waypoint order.
class Route {
public:
    /// Throws std::invalid_argument unless there are at least 4 waypoints,
    /// every segment (including the closing one) is axis-aligned with
    /// non-zero length, and all coordinates are finite.
    static Route from_waypoints(std::vector<Position> waypoints);

    std::span<const Position> waypoints() const noexcept { return waypoints_; }
    double length() const noexcept { return length_; }

    /// Positive for counter-clockwise loops, negative for clockwise ones.
    double signed_area() const noexcept;
    bool is_clockwise() const noexcept { return signed_area() < 0.0; }
    /// Same loop, same first waypoint, opposite sense.
    Route reversed() const;

    double wrap(double progress) const noexcept;
    Position position_at(double progress) const noexcept;
    Direction direction_at(double progress) const noexcept;

    /// Route progress of every waypoint where the direction changes.
    std::vector<double> corners() const;
    /// Centers of `intersections` that lie on the loop, sorted by arc.
    std::vector<Crossing> crossings(std::span<const Intersection> intersections) const;

private:
    std::size_t segment_index(double wrapped) const noexcept;

    std::vector<Position> waypoints_;
    std::vector<Direction> directions_;
    std::vector<double> starts_;  // cumulative arc at each waypoint
    double length_ = 0.0;
};

}  // namespace vtl::world
