#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vtl/baseline.hpp"
#include "vtl/channel.hpp"
#include "vtl/codec.hpp"
#include "vtl/drive.hpp"
#include "vtl/kinematics.hpp"
#include "vtl/protocol.hpp"
#include "vtl/report.hpp"
#include "vtl/scenario.hpp"
#include "vtl/world.hpp"

namespace vtl {

/// Ground truth about one vehicle at the end of a tick.
struct VehicleSnapshot {
    std::uint32_t id = 0;
    world::Position position;
    world::Direction heading = world::Direction::north;
    double speed = 0.0;
    double traveled = 0.0;
    DriveCommand command = DriveCommand::cruise;
    /// Intersection whose box holds the vehicle, with the direction it entered by.
    std::optional<world::IntersectionId> in_box;
    world::Direction entry = world::Direction::north;
    /// Null under the stop-sign controller.
    const protocol::ProtocolState* state = nullptr;
};

struct TickView {
    std::uint64_t tick = 0;
    std::uint64_t now_ms = 0;
    std::span<const VehicleSnapshot> vehicles;  // active vehicles, ascending id
    std::span<const codec::Message> emitted;    // frames put on the air this tick
};

struct RunOptions {
    bool record_trace = false;
    std::function<void(const TickView&)> on_tick;
};

class SimulationTimeout : public std::runtime_error {
public:
    explicit SimulationTimeout(SimReport partial);
    const SimReport& partial() const noexcept { return partial_; }

private:
    SimReport partial_;
};

/// Fixed-step simulation of one scenario. Each tick, in vehicle-id order:
/// pending frames go on the air, the channel delivers them, every controller
/// steps, then every vehicle moves.
class Simulation {
public:
    explicit Simulation(Scenario scenario, RunOptions options = {});
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    /// Advances one tick. Returns false once every vehicle has finished.
    bool step();
    bool finished() const noexcept;
    std::uint64_t now_ms() const noexcept;
    SimReport report() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs to completion. Throws SimulationTimeout (carrying the partial
/// report) if max_time_s elapses first.
SimReport run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace vtl
