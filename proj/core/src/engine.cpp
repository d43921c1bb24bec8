#include "vtl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vtl {

namespace {

constexpr double kZoneLookahead = 400.0;  // ft
constexpr double kQueueLookahead = 200.0;  // ft

struct IpgTrack {
    std::optional<std::uint64_t> last_ms;
    std::uint64_t samples = 0;
    std::uint64_t sum_ms = 0;
    std::uint64_t max_ms = 0;
};

/// Where a vehicle stands relative to the next intersection on its route.
struct RouteContext {
    const world::Intersection* intersection = nullptr;
    std::uint64_t visit_seq = 0;
    world::Direction entry = world::Direction::north;
    double distance_to_stop_line = 0.0;
    bool inside_box = false;
};

struct VehicleRt {
    VehicleSpec spec;
    world::Route route;
    std::vector<world::Crossing> crossings;
    std::vector<double> corners;
    kinematics::VehicleKin kin;
    double start = 0.0;
    bool active = true;
    double finish_s = 0.0;
    std::uint32_t stops = 0;
    double stopped_s = 0.0;
    bool moving = false;
    DriveCommand command = DriveCommand::cruise;
    std::optional<protocol::VtlAgent> agent;
    std::vector<codec::Message> pending;
    std::vector<codec::Message> inbox;
    std::vector<kinematics::SpeedZone> zones;

    double traveled() const { return kin.progress - start; }
};

}  // namespace

SimulationTimeout::SimulationTimeout(SimReport partial)
    : std::runtime_error("timeout - possible deadlock after " + std::to_string(partial.sim_time_s) + " s"),
      partial_(std::move(partial)) {}

struct Simulation::Impl {
    Scenario scenario;
    RunOptions options;
    channel::ChannelModel channel;
    baseline::StopSignController referee;
    std::vector<VehicleRt> vehicles;  // ascending id
    std::map<world::IntersectionId, world::Intersection> intersections;
    std::map<std::pair<std::uint32_t, std::uint32_t>, IpgTrack> ipg;
    MessageCounts counts;
    std::vector<TraceRow> trace;
    std::uint64_t tick = 0;
    double dt = 0.0;

    explicit Impl(Scenario s, RunOptions o)
        : scenario(std::move(s)),
          options(std::move(o)),
          channel(scenario.channel, scenario.seed),
          referee(scenario.stop_sign) {
        scenario.validate();
        dt = scenario.tick_ms / 1000.0;
        for (const auto& x : scenario.world.intersections) {
            intersections.emplace(x.id, x);
        }
        std::vector<VehicleSpec> specs = scenario.vehicles;
        std::sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (auto& spec : specs) {
            VehicleRt v;
            v.spec = spec;
            v.route = scenario.route_for(spec);
            v.crossings = v.route.crossings(scenario.world.intersections);
            v.corners = v.route.corners();
            v.start = v.route.wrap(spec.start_progress);
            v.kin = kinematics::VehicleKin{spec.id, v.start, spec.initial_speed.value_or(spec.kin.target_speed),
                                           spec.kin};
            v.moving = v.kin.speed > 0.0;
            if (scenario.controller == Controller::vtl) {
                v.agent.emplace(spec.id);
            }
            vehicles.push_back(std::move(v));
        }
    }

    std::uint64_t now_ms() const { return tick * scenario.tick_ms; }

    RouteContext context(const VehicleRt& v) const {
        RouteContext ctx;
        const std::size_t k_count = v.crossings.size();
        if (k_count == 0) {
            return ctx;
        }
        const double len = v.route.length();
        const double hw = scenario.world.box_half_width;
        const double p = v.kin.progress;
        const auto lap = static_cast<std::int64_t>(std::floor(p / len));
        for (std::int64_t l = lap - 1; l <= lap + 1; ++l) {
            for (std::size_t k = 0; k < k_count; ++k) {
                const double center = static_cast<double>(l) * len + v.crossings[k].arc;
                if (center + hw <= p) {
                    continue;
                }
                ctx.intersection = &intersections.at(v.crossings[k].intersection_id);
                ctx.visit_seq = static_cast<std::uint64_t>((l + 1) * static_cast<std::int64_t>(k_count) +
                                                           static_cast<std::int64_t>(k));
                ctx.entry = v.crossings[k].entry;
                ctx.distance_to_stop_line = std::max(0.0, center - hw - p);
                ctx.inside_box = p > center - hw;
                return ctx;
            }
        }
        return ctx;
    }

    void update_zones(VehicleRt& v) const {
        v.zones.clear();
        const double len = v.route.length();
        const double p = v.kin.progress;
        const auto lap = static_cast<std::int64_t>(std::floor(p / len));
        const double reach = scenario.world.corner_zone;
        for (std::int64_t l = lap - 1; l <= lap + 1; ++l) {
            for (double q : v.corners) {
                const double at = static_cast<double>(l) * len + q;
                const kinematics::SpeedZone z{at - reach - p, at + reach - p, scenario.world.corner_speed};
                if (z.end >= 0.0 && z.start < kZoneLookahead) {
                    v.zones.push_back(z);
                }
            }
        }
    }

    /// Free road to the next vehicle on the same oriented route, less the queue spacing.
    std::optional<double> queue_gap(const VehicleRt& v) const {
        std::optional<double> best;
        for (const auto& o : vehicles) {
            if (&o == &v || !o.active || o.spec.route != v.spec.route ||
                o.route.is_clockwise() != v.route.is_clockwise()) {
                continue;
            }
            const double gap = v.route.wrap(o.kin.progress - v.kin.progress);
            if (gap <= 0.0 || gap > kQueueLookahead) {
                continue;
            }
            const double room = std::max(0.0, gap - scenario.queue_spacing);
            if (!best || room < *best) {
                best = room;
            }
        }
        return best;
    }

    std::pair<double, double> corner_distances(world::Position tx, world::Position rx) const {
        if (intersections.empty()) {
            return {world::distance(tx, rx), 0.0};
        }
        double best_sum = std::numeric_limits<double>::infinity();
        std::pair<double, double> best;
        for (const auto& [_, x] : intersections) {
            const double a = world::distance(tx, x.center);
            const double b = world::distance(rx, x.center);
            if (a + b < best_sum) {
                best_sum = a + b;
                best = {a, b};
            }
        }
        return best;
    }

    void broadcast(std::vector<codec::Message>& emitted) {
        const bool beacon_slot = now_ms() % channel::kBsmIntervalMs == 0;
        for (auto& v : vehicles) {
            if (!v.active) {
                v.pending.clear();
                continue;
            }
            const world::Position from = v.route.position_at(v.kin.progress);
            for (const auto& msg : v.pending) {
                const auto type = codec::type_of(msg);
                if (type == codec::MsgType::bsm && !beacon_slot) {
                    continue;
                }
                const auto frame = codec::encode(msg);
                emitted.push_back(msg);
                switch (type) {
                case codec::MsgType::bsm: ++counts.bsm; break;
                case codec::MsgType::spat: ++counts.spat; break;
                case codec::MsgType::wsm: ++counts.wsm; break;
                }

                std::vector<channel::Receiver> receivers;
                for (const auto& o : vehicles) {
                    if (&o == &v || !o.active) {
                        continue;
                    }
                    const auto [d_tx, d_rx] = corner_distances(from, o.route.position_at(o.kin.progress));
                    receivers.push_back({o.spec.id, d_tx, d_rx});
                }
                const auto delivered = channel.transmit(frame, v.spec.id, receivers);
                if (delivered.empty()) {
                    continue;
                }
                const auto decoded = codec::decode(frame);
                for (std::uint32_t rid : delivered) {
                    auto& r = *std::find_if(vehicles.begin(), vehicles.end(),
                                            [&](const VehicleRt& x) { return x.spec.id == rid; });
                    r.inbox.push_back(decoded.message());
                    ++counts.deliveries;
                    if (type == codec::MsgType::bsm) {
                        auto& t = ipg[{rid, v.spec.id}];
                        if (t.last_ms) {
                            const std::uint64_t gap = now_ms() - *t.last_ms;
                            ++t.samples;
                            t.sum_ms += gap;
                            t.max_ms = std::max(t.max_ms, gap);
                        }
                        t.last_ms = now_ms();
                    }
                }
            }
            v.pending.clear();
        }
    }

    void step_vtl() {
        for (auto& v : vehicles) {
            if (!v.active) {
                continue;
            }
            const RouteContext ctx = context(v);
            protocol::SelfView self;
            self.id = v.spec.id;
            self.position = v.route.position_at(v.kin.progress);
            self.heading = v.route.direction_at(v.kin.progress);
            self.speed = v.kin.speed;
            if (ctx.intersection) {
                self.intersection = *ctx.intersection;
            }
            self.visit_seq = ctx.visit_seq;
            self.approach = ctx.entry;
            self.distance_to_stop_line = ctx.distance_to_stop_line;
            self.inside_box = ctx.inside_box;
            auto result = v.agent->tick(v.inbox, self, now_ms(), scenario.vtl);
            v.inbox.clear();
            v.pending = std::move(result.outbox);
            v.command = result.drive;
        }
    }

    void step_stop4() {
        std::vector<baseline::VehicleObservation> obs;
        for (const auto& v : vehicles) {
            if (!v.active) {
                continue;
            }
            const RouteContext ctx = context(v);
            baseline::VehicleObservation o;
            o.id = v.spec.id;
            if (ctx.intersection) {
                o.intersection = ctx.intersection->id;
            }
            o.visit_seq = ctx.visit_seq;
            o.approach = ctx.entry;
            o.distance_to_stop_line = ctx.distance_to_stop_line;
            o.inside_box = ctx.inside_box;
            o.speed = v.kin.speed;
            obs.push_back(o);
        }
        const auto commands = referee.step(obs, now_ms());
        for (auto& v : vehicles) {
            if (v.active) {
                v.command = commands.at(v.spec.id);
            }
        }
    }

    void move() {
        const double goal = scenario.laps_to_complete * 1.0;
        for (auto& v : vehicles) {
            if (!v.active) {
                continue;
            }
            const RouteContext ctx = context(v);
            update_zones(v);
            kinematics::Lookahead ahead;
            ahead.queue_gap = queue_gap(v);
            ahead.zones = v.zones;
            if (ctx.intersection && !ctx.inside_box) {
                ahead.stop_line = ctx.distance_to_stop_line;
            }
            const double before = v.traveled();
            v.kin = kinematics::advance_kinematics(v.kin, v.command, dt, ahead);

            if (v.kin.speed == 0.0) {
                v.stopped_s += dt;
                if (v.moving) {
                    ++v.stops;
                }
            }
            v.moving = v.kin.speed > 0.0;

            const double target = goal * v.route.length();
            if (v.traveled() >= target) {
                const double frac = (target - before) / (v.traveled() - before);
                v.finish_s = (now_ms() / 1000.0) + frac * dt;
                v.active = false;
            }
        }
    }

    void observe(const std::vector<codec::Message>& emitted) {
        if (!options.on_tick && !options.record_trace) {
            return;
        }
        std::vector<VehicleSnapshot> snaps;
        for (const auto& v : vehicles) {
            if (!v.active) {
                continue;
            }
            const RouteContext ctx = context(v);
            VehicleSnapshot s;
            s.id = v.spec.id;
            s.position = v.route.position_at(v.kin.progress);
            s.heading = v.route.direction_at(v.kin.progress);
            s.speed = v.kin.speed;
            s.traveled = v.traveled();
            s.command = v.command;
            s.entry = ctx.entry;
            s.state = v.agent ? &v.agent->state() : nullptr;
            if (ctx.intersection && ctx.inside_box) {
                s.in_box = ctx.intersection->id;
            }
            snaps.push_back(s);
            if (options.record_trace) {
                trace.push_back(TraceRow{tick, s.id, s.position.x, s.position.y, s.speed,
                                         v.agent ? std::string(protocol::state_name(v.agent->state()))
                                                 : std::string(to_string(v.command))});
            }
        }
        if (options.on_tick) {
            options.on_tick(TickView{tick, now_ms(), snaps, emitted});
        }
    }

    bool done() const {
        return std::none_of(vehicles.begin(), vehicles.end(), [](const VehicleRt& v) { return v.active; });
    }

    bool advance() {
        if (done()) {
            return false;
        }
        std::vector<codec::Message> emitted;
        if (scenario.controller == Controller::vtl) {
            broadcast(emitted);
            step_vtl();
        } else {
            step_stop4();
        }
        move();
        observe(emitted);
        ++tick;
        return !done();
    }

    SimReport report() const {
        SimReport r;
        r.scenario = scenario.name;
        r.controller = scenario.controller;
        r.seed = scenario.seed;
        r.sim_time_s = now_ms() / 1000.0;
        r.timed_out = !done();
        for (const auto& v : vehicles) {
            VehicleResult res;
            res.id = v.spec.id;
            res.completed = !v.active;
            res.total_time_s = v.active ? r.sim_time_s : v.finish_s;
            res.laps_completed = std::min<double>(scenario.laps_to_complete, v.traveled() / v.route.length());
            res.stop_count = v.stops;
            res.time_stopped_s = v.stopped_s;
            r.vehicles.push_back(res);
        }
        r.messages = counts;
        for (const auto& [key, t] : ipg) {
            if (t.samples == 0) {
                continue;
            }
            r.ipg.push_back(IpgSummary{key.first, key.second, t.samples,
                                       static_cast<double>(t.sum_ms) / static_cast<double>(t.samples), t.max_ms});
        }
        r.trace = trace;
        return r;
    }
};

Simulation::Simulation(Scenario scenario, RunOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}
Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

bool Simulation::step() {
    return impl_->advance();
}

bool Simulation::finished() const noexcept {
    return impl_->done();
}

std::uint64_t Simulation::now_ms() const noexcept {
    return impl_->now_ms();
}

SimReport Simulation::report() const {
    return impl_->report();
}

SimReport run(const Scenario& scenario, const RunOptions& options) {
    Simulation sim(scenario, options);
    const auto limit_ms = static_cast<std::uint64_t>(std::llround(scenario.max_time_s * 1000.0));
    while (sim.step()) {
        if (sim.now_ms() >= limit_ms) {
            throw SimulationTimeout(sim.report());
        }
    }
    return sim.report();
}

}  // namespace vtl
