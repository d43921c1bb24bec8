#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "vtl/codec.hpp"
#include "vtl/drive.hpp"
#include "vtl/world.hpp"

// Per-vehicle Virtual Traffic Light state machine.
//
// Sensing uses the Bsm beacons, leader election and handover use Wsm control
// messages, the elected leader broadcasts its phase as Spat and releases the
// intersection by going silent. `step` is a pure function of its inputs; the
// engine owns one `VtlAgent` per vehicle and routes frames between them.
namespace vtl::protocol {

using VehicleId = std::uint32_t;
using world::IntersectionId;

using vtl::DriveCommand;

struct VtlParams {
    double detection_radius = 300.0;  // ft from the stop line
    std::uint32_t election_window_ms = 300;
    std::uint32_t phase_duration_ms = 30000;
    std::uint32_t spat_interval_ms = 100;
    std::uint32_t spat_timeout_ms = 500;
    std::uint32_t handover_retries = 3;
    std::uint32_t handover_retry_ms = 200;
    std::uint32_t stale_ms = 1000;
    /// A handover target must be able to stop at this deceleration (ft/s^2)
    /// from its last reported speed.
    double handover_decel = 8.0;

    /// Throws std::invalid_argument. `bsm_interval_ms` bounds the election window.
    void validate(std::uint32_t bsm_interval_ms = 100) const;
};

/// Identifies one passage of a vehicle through one intersection. A route
/// may cross the same intersection several times per lap.
struct Visit {
    IntersectionId intersection_id = 0;
    std::uint64_t seq = 0;

    friend bool operator==(const Visit&, const Visit&) = default;
};

struct FreeDriving {
    friend bool operator==(const FreeDriving&, const FreeDriving&) = default;
};

struct Approaching {
    Visit visit;
    friend bool operator==(const Approaching&, const Approaching&) = default;
};

struct Electing {
    Visit visit;
    std::map<VehicleId, double> claims_heard;  // includes our own claim
    double own_claim = 0.0;
    std::uint64_t window_deadline_ms = 0;
    friend bool operator==(const Electing&, const Electing&) = default;
};

struct Follower {
    Visit visit;
    codec::Spat last_spat;
    std::uint64_t spat_deadline_ms = 0;
    friend bool operator==(const Follower&, const Follower&) = default;
};

struct Leader {
    Visit visit;
    std::uint8_t green_mask = 0;
    std::uint64_t phase_deadline_ms = 0;
    /// All-red is broadcast until the box has emptied after taking office.
    bool cleared = false;
    /// The leader that handed over to us. Its trailing Spats do not outrank us.
    std::optional<VehicleId> predecessor;
    friend bool operator==(const Leader&, const Leader&) = default;
};

struct HandoverPending {
    Visit visit;
    codec::Wsm offer;
    std::uint8_t previous_mask = 0;
    std::uint32_t retries_left = 0;
    std::uint64_t retry_deadline_ms = 0;
    friend bool operator==(const HandoverPending&, const HandoverPending&) = default;
};

using ProtocolState = std::variant<FreeDriving, Approaching, Electing, Follower, Leader, HandoverPending>;

std::string_view state_name(const ProtocolState& s) noexcept;
std::optional<IntersectionId> intersection_of(const ProtocolState& s) noexcept;

/// Latest beacon per neighbor.
class NeighborTable {
public:
    struct Entry {
        codec::Bsm bsm;
        std::uint64_t heard_ms = 0;
    };

    void observe(const codec::Bsm& bsm, std::uint64_t now_ms);
    /// Drops every entry last heard more than `stale_ms` before `now_ms`.
    void evict(std::uint64_t now_ms, std::uint32_t stale_ms);

    const std::map<VehicleId, Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<VehicleId, Entry> entries_;
};

/// What a vehicle knows about itself, supplied by its localization.
struct SelfView {
    VehicleId id = 0;
    world::Position position;
    world::Direction heading = world::Direction::north;
    double speed = 0.0;
    /// The intersection the vehicle is heading for or currently inside.
    std::optional<world::Intersection> intersection;
    std::uint64_t visit_seq = 0;
    /// Direction of travel when entering `intersection`.
    world::Direction approach = world::Direction::north;
    double distance_to_stop_line = 0.0;
    bool inside_box = false;
};

struct StepResult {
    ProtocolState state;
    std::vector<codec::Message> outbox;
    DriveCommand drive = DriveCommand::cruise;
};

StepResult step(const ProtocolState& state, const NeighborTable& neighbors, std::span<const codec::Message> inbox,
                const SelfView& self, std::uint64_t now_ms, const VtlParams& params);

/// Election rule: greatest distance to the stop line wins, ties go to the
/// lowest id. Empty input yields nullopt.
std::optional<VehicleId> elect(const std::map<VehicleId, double>& claims);

/// One vehicle's protocol instance: state plus neighbor table.
class VtlAgent {
public:
    explicit VtlAgent(VehicleId id, ProtocolState initial = FreeDriving{}) : id_(id), state_(std::move(initial)) {}

    VehicleId id() const noexcept { return id_; }
    const ProtocolState& state() const noexcept { return state_; }
    const NeighborTable& neighbors() const noexcept { return neighbors_; }

    /// Folds received beacons into the neighbor table, evicts stale entries,
    /// then steps the state machine.
    StepResult tick(std::span<const codec::Message> inbox, const SelfView& self, std::uint64_t now_ms,
                    const VtlParams& params);

private:
    VehicleId id_;
    ProtocolState state_;
    NeighborTable neighbors_;
};

}  // namespace vtl::protocol
