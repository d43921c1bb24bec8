#include "vtl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vtl {

using nlohmann::json;

std::string_view to_string(Controller c) noexcept {
    return c == Controller::vtl ? "vtl" : "stop4";
}

std::optional<Controller> controller_from_string(std::string_view s) noexcept {
    if (s == "vtl") return Controller::vtl;
    if (s == "stop4") return Controller::stop4;
    return std::nullopt;
}

namespace {

std::string_view kind_label(ScenarioError::Kind k) {
    switch (k) {
    case ScenarioError::Kind::io: return "io error";
    case ScenarioError::Kind::parse: return "parse error";
    case ScenarioError::Kind::schema: return "schema error";
    case ScenarioError::Kind::invariant: return "invariant violation";
    }
    return "error";
}

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::schema, field, what);
}

[[noreturn]] void invariant_error(const std::string& field, const std::string& what) {
    throw ScenarioError(ScenarioError::Kind::invariant, field, what);
}

/// Reads the keys of one JSON object and rejects anything it did not consume.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            schema_error(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* find(std::string_view key) {
        seen_.insert(std::string(key));
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& require(std::string_view key) {
        const json* v = find(key);
        if (!v) {
            schema_error(field(key), "missing required key");
        }
        return *v;
    }

    double number(std::string_view key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, field(key)) : fallback;
    }

    std::uint64_t unsigned_int(std::string_view key, std::uint64_t fallback) {
        const json* v = find(key);
        return v ? as_unsigned(*v, field(key)) : fallback;
    }

    std::uint32_t u32(std::string_view key, std::uint32_t fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        const std::uint64_t x = as_unsigned(*v, field(key));
        if (x > UINT32_MAX) {
            schema_error(field(key), "value does not fit in 32 bits");
        }
        return static_cast<std::uint32_t>(x);
    }

    std::optional<std::string> string(std::string_view key) {
        const json* v = find(key);
        if (!v) {
            return std::nullopt;
        }
        if (!v->is_string()) {
            schema_error(field(key), "expected a string");
        }
        return v->get<std::string>();
    }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.contains(key)) {
                schema_error(field(key), "unknown key");
            }
        }
    }

    static double as_number(const json& v, const std::string& field) {
        if (!v.is_number()) {
            schema_error(field, "expected a number");
        }
        return v.get<double>();
    }

    static std::uint64_t as_unsigned(const json& v, const std::string& field) {
        if (!v.is_number_unsigned()) {
            schema_error(field, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

world::Position read_point(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) {
        schema_error(field, "expected [x, y]");
    }
    return {ObjectReader::as_number(j[0], field + "[0]"), ObjectReader::as_number(j[1], field + "[1]")};
}

template <typename F>
void for_each_in_array(const json& j, const std::string& field, F&& f) {
    if (!j.is_array()) {
        schema_error(field, "expected an array");
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        f(j[i], field + "[" + std::to_string(i) + "]");
    }
}

WorldSpec read_world(const json& j) {
    ObjectReader r(j, "world");
    WorldSpec w;
    w.box_half_width = r.number("box_half_width_ft", w.box_half_width);
    w.corner_speed = r.number("corner_speed_ftps", w.corner_speed);
    w.corner_zone = r.number("corner_zone_ft", w.corner_zone);
    if (const json* xs = r.find("intersections")) {
        for_each_in_array(*xs, "world.intersections", [&](const json& x, const std::string& path) {
            ObjectReader xr(x, path);
            world::Intersection in;
            in.id = xr.u32("id", 0);
            if (!xr.find("id")) {
                schema_error(xr.field("id"), "missing required key");
            }
            in.center.x = ObjectReader::as_number(xr.require("x"), xr.field("x"));
            in.center.y = ObjectReader::as_number(xr.require("y"), xr.field("y"));
            in.box_half_width = w.box_half_width;
            xr.finish();
            w.intersections.push_back(in);
        });
    }
    for_each_in_array(r.require("routes"), "world.routes", [&](const json& x, const std::string& path) {
        ObjectReader rr(x, path);
        RouteSpec route;
        const auto name = rr.string("name");
        if (!name) {
            schema_error(rr.field("name"), "missing required key");
        }
        route.name = *name;
        for_each_in_array(rr.require("waypoints"), rr.field("waypoints"),
                          [&](const json& p, const std::string& ppath) { route.waypoints.push_back(read_point(p, ppath)); });
        rr.finish();
        w.routes.push_back(std::move(route));
    });
    r.finish();
    return w;
}

VehicleSpec read_vehicle(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    VehicleSpec v;
    if (!r.find("id")) {
        schema_error(r.field("id"), "missing required key");
    }
    v.id = r.u32("id", 0);
    const auto route = r.string("route");
    if (!route) {
        schema_error(r.field("route"), "missing required key");
    }
    v.route = *route;
    if (const auto sense = r.string("direction")) {
        if (*sense == "clockwise") {
            v.sense = Sense::clockwise;
        } else if (*sense == "counter_clockwise") {
            v.sense = Sense::counter_clockwise;
        } else if (*sense == "as_listed") {
            v.sense = Sense::as_listed;
        } else {
            schema_error(r.field("direction"), "expected clockwise, counter_clockwise or as_listed");
        }
    }
    v.start_progress = r.number("start_progress_ft", 0.0);
    if (r.find("initial_speed_ftps")) {
        v.initial_speed = r.number("initial_speed_ftps", 0.0);
    }
    v.kin.target_speed = r.number("target_speed_ftps", v.kin.target_speed);
    v.kin.accel = r.number("accel_ftps2", v.kin.accel);
    v.kin.decel = r.number("decel_ftps2", v.kin.decel);
    r.finish();
    return v;
}

channel::ChannelParams read_channel(const json& j) {
    ObjectReader r(j, "channel");
    channel::ChannelParams c;
    c.reliable_sum = r.number("reliable_sum_ft", c.reliable_sum);
    c.cutoff_sum = r.number("cutoff_sum_ft", c.cutoff_sum);
    c.zero_sum = r.number("zero_sum_ft", c.zero_sum);
    c.p_max = r.number("p_max", c.p_max);
    c.p_cutoff = r.number("p_cutoff", c.p_cutoff);
    r.finish();
    return c;
}

protocol::VtlParams read_vtl(const json& j) {
    ObjectReader r(j, "vtl");
    protocol::VtlParams p;
    p.detection_radius = r.number("detection_radius_ft", p.detection_radius);
    p.election_window_ms = r.u32("election_window_ms", p.election_window_ms);
    p.phase_duration_ms = r.u32("phase_duration_ms", p.phase_duration_ms);
    p.spat_interval_ms = r.u32("spat_interval_ms", p.spat_interval_ms);
    p.spat_timeout_ms = r.u32("spat_timeout_ms", p.spat_timeout_ms);
    p.handover_retries = r.u32("handover_retries", p.handover_retries);
    p.handover_retry_ms = r.u32("handover_retry_ms", p.handover_retry_ms);
    p.stale_ms = r.u32("stale_ms", p.stale_ms);
    p.handover_decel = r.number("handover_decel_ftps2", p.handover_decel);
    r.finish();
    return p;
}

baseline::StopSignParams read_stop_sign(const json& j) {
    ObjectReader r(j, "stop_sign");
    baseline::StopSignParams p;
    p.min_stop_ms = r.u32("min_stop_ms", p.min_stop_ms);
    r.finish();
    return p;
}

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

void require_positive(double v, const std::string& field) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        invariant_error(field, "must be positive");
    }
}

}  // namespace

ScenarioError::ScenarioError(Kind kind, std::string field, const std::string& message)
    : std::runtime_error(std::string(kind_label(kind)) + " at " + field + ": " + message),
      kind_(kind),
      field_(std::move(field)) {}

world::Route Scenario::route_for(const VehicleSpec& v) const {
    const auto it = std::find_if(world.routes.begin(), world.routes.end(),
                                 [&](const RouteSpec& r) { return r.name == v.route; });
    if (it == world.routes.end()) {
        throw std::out_of_range("no route named " + v.route);
    }
    world::Route r = world::Route::from_waypoints(it->waypoints);
    if ((v.sense == Sense::clockwise && !r.is_clockwise()) ||
        (v.sense == Sense::counter_clockwise && r.is_clockwise())) {
        r = r.reversed();
    }
    return r;
}

void Scenario::validate() const {
    if (tick_ms == 0) {
        invariant_error("tick_ms", "must be positive");
    }
    if (channel::kBsmIntervalMs % tick_ms != 0) {
        invariant_error("tick_ms", "must divide the 100 ms beacon interval");
    }
    if (vtl.spat_interval_ms % tick_ms != 0) {
        invariant_error("vtl.spat_interval_ms", "must be a multiple of tick_ms");
    }
    if (laps_to_complete < 1) {
        invariant_error("laps_to_complete", "must be at least 1");
    }
    require_positive(max_time_s, "max_time_s");
    require_positive(queue_spacing, "queue_spacing_ft");
    require_positive(world.box_half_width, "world.box_half_width_ft");
    require_positive(world.corner_speed, "world.corner_speed_ftps");
    if (!(world.corner_zone >= 0.0)) {
        invariant_error("world.corner_zone_ft", "must be non-negative");
    }

    std::set<world::IntersectionId> xids;
    for (std::size_t i = 0; i < world.intersections.size(); ++i) {
        const auto& x = world.intersections[i];
        const std::string f = "world.intersections[" + std::to_string(i) + "]";
        if (!xids.insert(x.id).second) {
            invariant_error(f + ".id", "duplicate intersection id");
        }
        if (!std::isfinite(x.center.x) || !std::isfinite(x.center.y)) {
            invariant_error(f, "center must be finite");
        }
        for (std::size_t k = 0; k < i; ++k) {
            const auto& o = world.intersections[k];
            if (std::abs(o.center.x - x.center.x) < 2 * world.box_half_width &&
                std::abs(o.center.y - x.center.y) < 2 * world.box_half_width) {
                invariant_error(f, "intersection boxes overlap");
            }
        }
    }

    std::set<std::string> route_names;
    for (std::size_t i = 0; i < world.routes.size(); ++i) {
        const std::string f = "world.routes[" + std::to_string(i) + "]";
        if (!route_names.insert(world.routes[i].name).second) {
            invariant_error(f + ".name", "duplicate route name");
        }
        try {
            (void)world::Route::from_waypoints(world.routes[i].waypoints);
        } catch (const std::invalid_argument& e) {
            invariant_error(f + ".waypoints", e.what());
        }
    }

    if (vehicles.empty()) {
        invariant_error("vehicles", "at least one vehicle is required");
    }
    std::set<std::uint32_t> vids;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const auto& v = vehicles[i];
        const std::string f = "vehicles[" + std::to_string(i) + "]";
        if (!vids.insert(v.id).second) {
            invariant_error(f + ".id", "duplicate vehicle id");
        }
        if (!route_names.contains(v.route)) {
            invariant_error(f + ".route", "no route named '" + v.route + "'");
        }
        if (!std::isfinite(v.start_progress) || v.start_progress < 0.0) {
            invariant_error(f + ".start_progress_ft", "must be finite and non-negative");
        }
        require_positive(v.kin.target_speed, f + ".target_speed_ftps");
        require_positive(v.kin.accel, f + ".accel_ftps2");
        require_positive(v.kin.decel, f + ".decel_ftps2");
        if (v.initial_speed && !(*v.initial_speed >= 0.0 && *v.initial_speed <= v.kin.target_speed)) {
            invariant_error(f + ".initial_speed_ftps", "must lie in [0, target_speed_ftps]");
        }
    }

    try {
        channel.validate();
    } catch (const std::invalid_argument& e) {
        invariant_error("channel", e.what());
    }
    try {
        vtl.validate(channel::kBsmIntervalMs);
    } catch (const std::invalid_argument& e) {
        invariant_error("vtl", e.what());
    }
}

Scenario load_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::parse, line_column(text, e.byte), e.what());
    }

    ObjectReader r(doc, "");
    Scenario s;
    if (auto name = r.string("name")) {
        s.name = *name;
    }
    if (auto c = r.string("controller")) {
        const auto parsed = controller_from_string(*c);
        if (!parsed) {
            schema_error("controller", "expected vtl or stop4");
        }
        s.controller = *parsed;
    }
    s.seed = r.unsigned_int("seed", s.seed);
    s.tick_ms = r.u32("tick_ms", s.tick_ms);
    s.laps_to_complete = r.u32("laps_to_complete", s.laps_to_complete);
    s.max_time_s = r.number("max_time_s", s.max_time_s);
    s.queue_spacing = r.number("queue_spacing_ft", s.queue_spacing);
    s.world = read_world(r.require("world"));
    for_each_in_array(r.require("vehicles"), "vehicles",
                      [&](const json& v, const std::string& path) { s.vehicles.push_back(read_vehicle(v, path)); });
    if (const json* c = r.find("channel")) {
        s.channel = read_channel(*c);
    }
    if (const json* v = r.find("vtl")) {
        s.vtl = read_vtl(*v);
    }
    if (const json* st = r.find("stop_sign")) {
        s.stop_sign = read_stop_sign(*st);
    }
    r.finish();
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError(ScenarioError::Kind::io, path.string(), "cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    json w;
    w["box_half_width_ft"] = s.world.box_half_width;
    w["corner_speed_ftps"] = s.world.corner_speed;
    w["corner_zone_ft"] = s.world.corner_zone;
    w["intersections"] = json::array();
    for (const auto& x : s.world.intersections) {
        w["intersections"].push_back({{"id", x.id}, {"x", x.center.x}, {"y", x.center.y}});
    }
    w["routes"] = json::array();
    for (const auto& r : s.world.routes) {
        json pts = json::array();
        for (const auto& p : r.waypoints) {
            pts.push_back({p.x, p.y});
        }
        w["routes"].push_back({{"name", r.name}, {"waypoints", pts}});
    }

    json vehicles = json::array();
    for (const auto& v : s.vehicles) {
        json j{{"id", v.id},
               {"route", v.route},
               {"start_progress_ft", v.start_progress},
               {"target_speed_ftps", v.kin.target_speed},
               {"accel_ftps2", v.kin.accel},
               {"decel_ftps2", v.kin.decel}};
        switch (v.sense) {
        case Sense::clockwise: j["direction"] = "clockwise"; break;
        case Sense::counter_clockwise: j["direction"] = "counter_clockwise"; break;
        case Sense::as_listed: j["direction"] = "as_listed"; break;
        }
        if (v.initial_speed) {
            j["initial_speed_ftps"] = *v.initial_speed;
        }
        vehicles.push_back(std::move(j));
    }

    json doc{
        {"name", s.name},
        {"controller", std::string(to_string(s.controller))},
        {"seed", s.seed},
        {"tick_ms", s.tick_ms},
        {"laps_to_complete", s.laps_to_complete},
        {"max_time_s", s.max_time_s},
        {"queue_spacing_ft", s.queue_spacing},
        {"world", w},
        {"vehicles", vehicles},
        {"channel",
         {{"reliable_sum_ft", s.channel.reliable_sum},
          {"cutoff_sum_ft", s.channel.cutoff_sum},
          {"zero_sum_ft", s.channel.zero_sum},
          {"p_max", s.channel.p_max},
          {"p_cutoff", s.channel.p_cutoff}}},
        {"vtl",
         {{"detection_radius_ft", s.vtl.detection_radius},
          {"election_window_ms", s.vtl.election_window_ms},
          {"phase_duration_ms", s.vtl.phase_duration_ms},
          {"spat_interval_ms", s.vtl.spat_interval_ms},
          {"spat_timeout_ms", s.vtl.spat_timeout_ms},
          {"handover_retries", s.vtl.handover_retries},
          {"handover_retry_ms", s.vtl.handover_retry_ms},
          {"stale_ms", s.vtl.stale_ms},
          {"handover_decel_ftps2", s.vtl.handover_decel}}},
        {"stop_sign", {{"min_stop_ms", s.stop_sign.min_stop_ms}}},
    };
    return doc.dump(2) + "\n";
}

}  // namespace vtl
