#include "vtl/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtl::world {

namespace {

constexpr double kOnRouteTolerance = 1e-6;

}  // namespace

double distance(Position a, Position b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::string_view to_string(Direction d) noexcept {
    switch (d) {
    case Direction::north: return "N";
    case Direction::east: return "E";
    case Direction::south: return "S";
    case Direction::west: return "W";
    }
    return "?";
}

std::optional<Direction> direction_from_string(std::string_view s) noexcept {
    if (s == "N") return Direction::north;
    if (s == "E") return Direction::east;
    if (s == "S") return Direction::south;
    if (s == "W") return Direction::west;
    return std::nullopt;
}

Direction opposite(Direction d) noexcept {
    return static_cast<Direction>((static_cast<unsigned>(d) + 2) % 4);
}

Direction right_of(Direction d) noexcept {
    return static_cast<Direction>((static_cast<unsigned>(d) + 1) % 4);
}

Direction left_of(Direction d) noexcept {
    return static_cast<Direction>((static_cast<unsigned>(d) + 3) % 4);
}

bool same_axis(Direction a, Direction b) noexcept {
    return (static_cast<unsigned>(a) % 2) == (static_cast<unsigned>(b) % 2);
}

double heading_degrees(Direction d) noexcept {
    return 90.0 * static_cast<unsigned>(d);
}

Direction nearest_direction(double heading_deg) noexcept {
    double h = std::fmod(heading_deg, 360.0);
    if (h < 0.0) {
        h += 360.0;
    }
    const auto quadrant = static_cast<unsigned>(std::floor((h + 45.0) / 90.0)) % 4;
    return static_cast<Direction>(quadrant);
}

Position unit(Direction d) noexcept {
    switch (d) {
    case Direction::north: return {0.0, 1.0};
    case Direction::east: return {1.0, 0.0};
    case Direction::south: return {0.0, -1.0};
    case Direction::west: return {-1.0, 0.0};
    }
    return {};
}

Approach Intersection::approach(Direction d) const noexcept {
    const Position u = unit(d);
    return Approach{
        .intersection_id = id,
        .direction = d,
        .stop_line = {center.x - u.x * box_half_width, center.y - u.y * box_half_width},
    };
}

bool Intersection::contains(Position p) const noexcept {
    constexpr double kEdge = 1e-6;
    const double reach = box_half_width - kEdge;
    return std::abs(p.x - center.x) < reach && std::abs(p.y - center.y) < reach;
}

StopLineDistance distance_to_stop_line(Position pos, const Approach& approach) noexcept {
    const Position u = unit(approach.direction);
    // Signed distance still to travel before reaching the line.
    const double remaining = (approach.stop_line.x - pos.x) * u.x + (approach.stop_line.y - pos.y) * u.y;
    if (remaining < 0.0) {
        return {0.0, true};
    }
    return {remaining, false};
}

bool is_approaching(Position pos, Direction heading, const Intersection& intersection, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("is_approaching: radius must be positive");
    }
    const Approach a = intersection.approach(heading);
    const Position u = unit(heading);
    const double lateral = std::abs((pos.x - a.stop_line.x) * u.y - (pos.y - a.stop_line.y) * u.x);
    if (lateral > intersection.box_half_width) {
        return false;
    }
    const StopLineDistance d = distance_to_stop_line(pos, a);
    return !d.past_stop_line && d.feet <= radius;
}

bool conflicts(const Approach& a, const Approach& b) {
    if (a.intersection_id != b.intersection_id) {
        throw std::domain_error("conflicts: approaches belong to different intersections");
    }
    return !same_axis(a.direction, b.direction);
}

Route Route::from_waypoints(std::vector<Position> waypoints) {
    if (waypoints.size() < 4) {
        throw std::invalid_argument("route needs at least 4 waypoints to close a rectilinear loop");
    }
    Route r;
    r.directions_.reserve(waypoints.size());
    r.starts_.reserve(waypoints.size());
    double arc = 0.0;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        const Position a = waypoints[i];
        const Position b = waypoints[(i + 1) % waypoints.size()];
        if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
            throw std::invalid_argument("route waypoint " + std::to_string(i) + " is not finite");
        }
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        if ((dx != 0.0) == (dy != 0.0)) {
            throw std::invalid_argument("route segment " + std::to_string(i) +
                                        " must change exactly one coordinate");
        }
        Direction d;
        if (dx > 0.0) {
            d = Direction::east;
        } else if (dx < 0.0) {
            d = Direction::west;
        } else if (dy > 0.0) {
            d = Direction::north;
        } else {
            d = Direction::south;
        }
        r.directions_.push_back(d);
        r.starts_.push_back(arc);
        arc += std::abs(dx) + std::abs(dy);
    }
    r.waypoints_ = std::move(waypoints);
    r.length_ = arc;
    return r;
}

double Route::signed_area() const noexcept {
    double twice = 0.0;
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        const Position a = waypoints_[i];
        const Position b = waypoints_[(i + 1) % waypoints_.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return twice / 2.0;
}

Route Route::reversed() const {
    std::vector<Position> rev;
    rev.reserve(waypoints_.size());
    rev.push_back(waypoints_.front());
    for (std::size_t i = waypoints_.size() - 1; i > 0; --i) {
        rev.push_back(waypoints_[i]);
    }
    return from_waypoints(std::move(rev));
}

double Route::wrap(double progress) const noexcept {
    double w = std::fmod(progress, length_);
    if (w < 0.0) {
        w += length_;
    }
    return w;
}

std::size_t Route::segment_index(double wrapped) const noexcept {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), wrapped);
    return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
}

Position Route::position_at(double progress) const noexcept {
    const double w = wrap(progress);
    const std::size_t i = segment_index(w);
    const Position u = unit(directions_[i]);
    const double along = w - starts_[i];
    return {waypoints_[i].x + u.x * along, waypoints_[i].y + u.y * along};
}

Direction Route::direction_at(double progress) const noexcept {
    return directions_[segment_index(wrap(progress))];
}

std::vector<double> Route::corners() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < waypoints_.size(); ++i) {
        const Direction before = directions_[(i + waypoints_.size() - 1) % waypoints_.size()];
        if (before != directions_[i]) {
            out.push_back(starts_[i]);
        }
    }
    return out;
}

std::vector<Crossing> Route::crossings(std::span<const Intersection> intersections) const {
    std::vector<Crossing> out;
    const std::size_t n = waypoints_.size();
    for (const Intersection& x : intersections) {
        for (std::size_t i = 0; i < n; ++i) {
            const Position a = waypoints_[i];
            const Direction d = directions_[i];
            const Position u = unit(d);
            const double seg_len = (i + 1 < n ? starts_[i + 1] : length_) - starts_[i];
            const double along = (x.center.x - a.x) * u.x + (x.center.y - a.y) * u.y;
            const double lateral = std::abs((x.center.x - a.x) * u.y - (x.center.y - a.y) * u.x);
            if (lateral > kOnRouteTolerance || along < -kOnRouteTolerance ||
                along >= seg_len - kOnRouteTolerance) {
                continue;
            }
            // A center on a waypoint is entered along the previous segment.
            const Direction entry =
                along <= kOnRouteTolerance ? directions_[(i + n - 1) % n] : d;
            out.push_back(Crossing{
                .arc = starts_[i] + std::max(0.0, along),
                .intersection_id = x.id,
                .entry = entry,
                .exit = d,
            });
        }
    }
    std::sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.arc < b.arc; });
    return out;
}

}  // namespace vtl::world
