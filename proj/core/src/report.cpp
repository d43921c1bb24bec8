#include "vtl/report.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace vtl {

using nlohmann::json;

const VehicleResult& SimReport::vehicle(std::uint32_t id) const {
    const auto it = std::find_if(vehicles.begin(), vehicles.end(), [id](const auto& v) { return v.id == id; });
    if (it == vehicles.end()) {
        throw std::out_of_range("no vehicle " + std::to_string(id) + " in report");
    }
    return *it;
}

std::string to_json(const SimReport& r) {
    json doc;
    doc["scenario"] = r.scenario;
    doc["controller"] = std::string(to_string(r.controller));
    doc["seed"] = r.seed;
    doc["timed_out"] = r.timed_out;
    doc["sim_time_s"] = r.sim_time_s;
    doc["vehicles"] = json::array();
    for (const auto& v : r.vehicles) {
        doc["vehicles"].push_back({
            {"id", v.id},
            {"completed", v.completed},
            {"total_time_s", v.total_time_s},
            {"laps_completed", v.laps_completed},
            {"stop_count", v.stop_count},
            {"time_stopped_s", v.time_stopped_s},
        });
    }
    doc["messages"] = {
        {"bsm", r.messages.bsm},
        {"spat", r.messages.spat},
        {"wsm", r.messages.wsm},
        {"deliveries", r.messages.deliveries},
    };
    doc["ipg"] = json::array();
    for (const auto& g : r.ipg) {
        doc["ipg"].push_back({
            {"receiver", g.receiver},
            {"sender", g.sender},
            {"samples", g.samples},
            {"mean_ms", g.mean_ms},
            {"max_ms", g.max_ms},
        });
    }
    return doc.dump(2);
}

SimReport report_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        SimReport r;
        r.scenario = doc.at("scenario").get<std::string>();
        const auto controller = controller_from_string(doc.at("controller").get<std::string>());
        if (!controller) {
            throw std::invalid_argument("report: unknown controller");
        }
        r.controller = *controller;
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.timed_out = doc.at("timed_out").get<bool>();
        r.sim_time_s = doc.at("sim_time_s").get<double>();
        for (const auto& v : doc.at("vehicles")) {
            r.vehicles.push_back(VehicleResult{
                .id = v.at("id").get<std::uint32_t>(),
                .completed = v.at("completed").get<bool>(),
                .total_time_s = v.at("total_time_s").get<double>(),
                .laps_completed = v.at("laps_completed").get<double>(),
                .stop_count = v.at("stop_count").get<std::uint32_t>(),
                .time_stopped_s = v.at("time_stopped_s").get<double>(),
            });
        }
        const auto& m = doc.at("messages");
        r.messages = MessageCounts{
            .bsm = m.at("bsm").get<std::uint64_t>(),
            .spat = m.at("spat").get<std::uint64_t>(),
            .wsm = m.at("wsm").get<std::uint64_t>(),
            .deliveries = m.at("deliveries").get<std::uint64_t>(),
        };
        for (const auto& g : doc.at("ipg")) {
            r.ipg.push_back(IpgSummary{
                .receiver = g.at("receiver").get<std::uint32_t>(),
                .sender = g.at("sender").get<std::uint32_t>(),
                .samples = g.at("samples").get<std::uint64_t>(),
                .mean_ms = g.at("mean_ms").get<double>(),
                .max_ms = g.at("max_ms").get<std::uint64_t>(),
            });
        }
        return r;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("report: ") + e.what());
    }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
    out << "tick,vehicle,x,y,speed,protocol_state\n";
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(3);
    for (const auto& r : rows) {
        out << r.tick << ',' << r.vehicle << ',' << r.x << ',' << r.y << ',' << r.speed << ',' << r.protocol_state
            << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

}  // namespace vtl
