#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "vtl/scenario.hpp"

namespace vtl {

struct VehicleResult {
    std::uint32_t id = 0;
    bool completed = false;
    /// Time to finish all laps; the elapsed time at the cutoff if not completed.
    double total_time_s = 0.0;
    double laps_completed = 0.0;
    std::uint32_t stop_count = 0;
    double time_stopped_s = 0.0;

    friend bool operator==(const VehicleResult&, const VehicleResult&) = default;
};

struct MessageCounts {
    std::uint64_t bsm = 0;
    std::uint64_t spat = 0;
    std::uint64_t wsm = 0;
    std::uint64_t deliveries = 0;

    friend bool operator==(const MessageCounts&, const MessageCounts&) = default;
};

/// Inter-packet gaps of beacons from `sender` as seen by `receiver`.
struct IpgSummary {
    std::uint32_t receiver = 0;
    std::uint32_t sender = 0;
    std::uint64_t samples = 0;
    double mean_ms = 0.0;
    std::uint64_t max_ms = 0;

    friend bool operator==(const IpgSummary&, const IpgSummary&) = default;
};

struct TraceRow {
    std::uint64_t tick = 0;
    std::uint32_t vehicle = 0;
    double x = 0.0;
    double y = 0.0;
    double speed = 0.0;
    std::string protocol_state;

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct SimReport {
    std::string scenario;
    Controller controller = Controller::vtl;
    std::uint64_t seed = 0;
    bool timed_out = false;
    double sim_time_s = 0.0;
    std::vector<VehicleResult> vehicles;  // ascending id
    MessageCounts messages;
    std::vector<IpgSummary> ipg;  // ascending (receiver, sender)
    /// Filled only when tracing was requested.
    std::vector<TraceRow> trace;

    const VehicleResult& vehicle(std::uint32_t id) const;

    friend bool operator==(const SimReport&, const SimReport&) = default;
};

/// JSON document with every field above except the trace.
std::string to_json(const SimReport& r);
/// Inverse of to_json (trace left empty). Throws std::invalid_argument.
SimReport report_from_json(std::string_view text);

/// CSV with header `tick,vehicle,x,y,speed,protocol_state`.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);

}  // namespace vtl
