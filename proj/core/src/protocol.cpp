#include "vtl/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace vtl::protocol {

using codec::Spat;
using codec::Wsm;
using world::Direction;

void VtlParams::validate(std::uint32_t bsm_interval_ms) const {
    if (!(detection_radius > 0.0) || !(handover_decel > 0.0)) {
        throw std::invalid_argument("vtl: detection_radius and handover_decel must be positive");
    }
    if (election_window_ms == 0 || phase_duration_ms == 0 || spat_interval_ms == 0 || spat_timeout_ms == 0 ||
        handover_retries == 0 || handover_retry_ms == 0 || stale_ms == 0) {
        throw std::invalid_argument("vtl: all timing parameters must be positive");
    }
    if (election_window_ms < 2 * bsm_interval_ms) {
        throw std::invalid_argument("vtl: election_window_ms must cover at least two beacon intervals");
    }
}

std::string_view state_name(const ProtocolState& s) noexcept {
    static constexpr std::string_view kNames[] = {"FreeDriving", "Approaching", "Electing",
                                                  "Follower",    "Leader",      "HandoverPending"};
    return kNames[s.index()];
}

namespace {

template <typename T>
concept HasVisit = requires(const T& t) { t.visit; };

std::optional<Visit> visit_of(const ProtocolState& s) noexcept {
    return std::visit(
        [](const auto& st) -> std::optional<Visit> {
            if constexpr (HasVisit<std::decay_t<decltype(st)>>) {
                return st.visit;
            } else {
                return std::nullopt;
            }
        },
        s);
}

}  // namespace

std::optional<IntersectionId> intersection_of(const ProtocolState& s) noexcept {
    if (auto v = visit_of(s)) {
        return v->intersection_id;
    }
    return std::nullopt;
}

void NeighborTable::observe(const codec::Bsm& bsm, std::uint64_t now_ms) {
    auto [it, inserted] = entries_.try_emplace(bsm.vehicle_id, Entry{bsm, now_ms});
    if (!inserted && bsm.timestamp_ms >= it->second.bsm.timestamp_ms) {
        it->second = Entry{bsm, now_ms};
    }
}

void NeighborTable::evict(std::uint64_t now_ms, std::uint32_t stale_ms) {
    std::erase_if(entries_, [&](const auto& kv) { return now_ms > kv.second.heard_ms + stale_ms; });
}

std::optional<VehicleId> elect(const std::map<VehicleId, double>& claims) {
    std::optional<VehicleId> best;
    double best_distance = 0.0;
    // Map iteration is by ascending id, so strict > keeps the lowest id on ties.
    for (const auto& [id, d] : claims) {
        if (!best || d > best_distance) {
            best = id;
            best_distance = d;
        }
    }
    return best;
}

namespace {

/// Everything `step` derives once from its inputs.
struct Context {
    const NeighborTable& neighbors;
    std::span<const codec::Message> inbox;
    const SelfView& self;
    std::uint64_t now;
    const VtlParams& params;
    StepResult out;

    bool upstream() const { return self.intersection && !self.inside_box; }
    const world::Intersection& intersection() const { return *self.intersection; }
    Visit current_visit() const { return {self.intersection ? self.intersection->id : 0, self.visit_seq}; }
    bool spat_slot() const { return now % params.spat_interval_ms == 0; }
};

struct NeighborApproach {
    VehicleId id;
    Direction direction;
    double distance;
    double speed;
};

/// Neighbors currently heading for `x` from upstream within the detection radius.
std::vector<NeighborApproach> approaching_neighbors(const Context& c, const world::Intersection& x) {
    std::vector<NeighborApproach> out;
    for (const auto& [id, entry] : c.neighbors.entries()) {
        const world::Position p{entry.bsm.x, entry.bsm.y};
        const Direction d = world::nearest_direction(entry.bsm.heading);
        if (world::is_approaching(p, d, x, c.params.detection_radius)) {
            out.push_back({id, d, world::distance_to_stop_line(p, x.approach(d)).feet, entry.bsm.speed});
        }
    }
    return out;
}

std::vector<NeighborApproach> conflicting_neighbors(const Context& c) {
    auto all = approaching_neighbors(c, c.intersection());
    std::erase_if(all, [&](const NeighborApproach& n) { return world::same_axis(n.direction, c.self.approach); });
    return all;
}

/// A neighbor counts as inside the box if its last beacon, or that beacon
/// dead-reckoned over its age plus one Spat interval, puts it there. A
/// vehicle seen on its stop line may have entered since.
bool box_occupied_by_others(const Context& c) {
    const auto& x = c.intersection();
    return std::any_of(c.neighbors.entries().begin(), c.neighbors.entries().end(), [&](const auto& kv) {
        const auto& b = kv.second.bsm;
        const std::uint64_t age_ms = c.now > b.timestamp_ms ? c.now - b.timestamp_ms : 0;
        const double reach = b.speed * static_cast<double>(age_ms + c.params.spat_interval_ms) / 1000.0;
        const world::Position u = world::unit(world::nearest_direction(b.heading));
        return x.contains({b.x, b.y}) || x.contains({b.x + u.x * reach, b.y + u.y * reach});
    });
}

/// Spat for our intersection from the lowest-id leader heard this tick.
std::optional<Spat> heard_spat(const Context& c, std::optional<VehicleId> ignore = std::nullopt) {
    std::optional<Spat> best;
    for (const auto& m : c.inbox) {
        const auto* s = std::get_if<Spat>(&m);
        if (!s || s->intersection_id != c.intersection().id || s->leader_id == c.self.id || s->leader_id == ignore) {
            continue;
        }
        if (!best || s->leader_id < best->leader_id) {
            best = *s;
        }
    }
    return best;
}

template <typename P>
std::vector<std::pair<const Wsm*, const P*>> heard_wsm(const Context& c) {
    std::vector<std::pair<const Wsm*, const P*>> out;
    for (const auto& m : c.inbox) {
        const auto* w = std::get_if<Wsm>(&m);
        if (!w || w->intersection_id != c.intersection().id || w->sender_id == c.self.id) {
            continue;
        }
        if (const auto* p = std::get_if<P>(&w->payload)) {
            out.emplace_back(w, p);
        }
    }
    return out;
}

Spat make_spat(const Context& c, std::uint8_t mask, std::uint32_t remaining_ms) {
    return Spat{
        .intersection_id = c.intersection().id,
        .leader_id = c.self.id,
        .green_mask = mask,
        .time_remaining_ms = remaining_ms,
        .timestamp_ms = c.now,
    };
}

Wsm make_claim(const Context& c, double distance) {
    return Wsm{c.intersection().id, c.self.id, codec::ElectionClaim{distance}};
}

/// Red unless inside the box, which a vehicle always clears.
DriveCommand hold(const Context& c) {
    return c.self.inside_box ? DriveCommand::proceed : DriveCommand::stop_at_line;
}

DriveCommand obey(const Context& c, const Spat& spat) {
    if (c.self.inside_box || (spat.green_mask & world::direction_bit(c.self.approach))) {
        return DriveCommand::proceed;
    }
    return DriveCommand::stop_at_line;
}

Follower follow(const Context& c, const Spat& spat) {
    return Follower{c.current_visit(), spat, c.now + c.params.spat_timeout_ms};
}

Leader take_office(const Context& c, std::uint8_t mask, std::optional<VehicleId> predecessor = std::nullopt) {
    return Leader{c.current_visit(), mask, c.now + c.params.phase_duration_ms, false, predecessor};
}

void run_approaching(Context& c);
void run_leader(Context& c, Leader leader);

void run_electing(Context& c, Electing e) {
    if (auto spat = heard_spat(c)) {
        c.out.state = follow(c, *spat);
        c.out.drive = obey(c, *spat);
        return;
    }
    for (const auto& [wsm, claim] : heard_wsm<codec::ElectionClaim>(c)) {
        e.claims_heard[wsm->sender_id] = claim->distance_to_stop_line;
    }
    if (c.now >= e.window_deadline_ms) {
        const VehicleId winner = *elect(e.claims_heard);
        if (winner == c.self.id) {
            // Own approach red, orthogonal approaches green.
            run_leader(c, take_office(c, world::axis_mask(world::right_of(c.self.approach))));
            return;
        }
        // Red until the winner's first Spat arrives.
        const Spat pending{c.intersection().id, winner, 0, 0, c.now};
        c.out.state = follow(c, pending);
        c.out.drive = hold(c);
        return;
    }
    c.out.outbox.emplace_back(make_claim(c, e.own_claim));
    c.out.state = std::move(e);
    c.out.drive = hold(c);
}

void start_election(Context& c, std::map<VehicleId, double> heard) {
    const double own = c.self.distance_to_stop_line;
    heard[c.self.id] = own;
    Electing e{c.current_visit(), std::move(heard), own, c.now + c.params.election_window_ms};
    c.out.outbox.emplace_back(make_claim(c, own));
    c.out.state = std::move(e);
    c.out.drive = hold(c);
}

void run_approaching(Context& c) {
    c.out.state = Approaching{c.current_visit()};
    if (!c.upstream()) {
        c.out.drive = DriveCommand::proceed;
        return;
    }
    if (auto spat = heard_spat(c)) {
        c.out.state = follow(c, *spat);
        c.out.drive = obey(c, *spat);
        return;
    }
    std::map<VehicleId, double> heard;
    for (const auto& [wsm, claim] : heard_wsm<codec::ElectionClaim>(c)) {
        heard[wsm->sender_id] = claim->distance_to_stop_line;
    }
    if (!heard.empty() || !conflicting_neighbors(c).empty()) {
        start_election(c, std::move(heard));
        return;
    }
    c.out.drive = DriveCommand::cruise;
}

void release(Context& c) {
    c.out.outbox.emplace_back(make_spat(c, world::axis_mask(c.self.approach), 0));
    c.out.state = Approaching{c.current_visit()};
    c.out.drive = DriveCommand::proceed;
}

void run_leader(Context& c, Leader leader) {
    if (auto spat = heard_spat(c, leader.predecessor); spat && spat->leader_id < c.self.id) {
        c.out.state = follow(c, *spat);
        c.out.drive = obey(c, *spat);
        return;
    }
    // Answer every offer naming us; a repeat means our accept was lost.
    for (const auto& [wsm, offer] : heard_wsm<codec::HandoverOffer>(c)) {
        if (offer->new_leader_id == c.self.id) {
            c.out.outbox.emplace_back(Wsm{c.intersection().id, c.self.id, codec::HandoverAccept{wsm->sender_id}});
        }
    }

    const auto conflicting = conflicting_neighbors(c);
    const bool box_busy = box_occupied_by_others(c);
    if (conflicting.empty() && !box_busy) {
        release(c);
        return;
    }
    if (!leader.cleared && !box_busy) {
        leader.cleared = true;
    }

    if (leader.cleared && c.now >= leader.phase_deadline_ms) {
        std::optional<NeighborApproach> target;
        for (const auto& n : conflicting) {
            const double stopping = n.speed * n.speed / (2.0 * c.params.handover_decel);
            if (n.distance < stopping) {
                continue;
            }
            if (!target || n.distance < target->distance) {
                target = n;
            }
        }
        if (target) {
            const std::uint8_t next_mask = world::axis_mask(c.self.approach);
            Wsm offer{c.intersection().id, c.self.id, codec::HandoverOffer{target->id, next_mask}};
            c.out.outbox.emplace_back(offer);
            c.out.outbox.emplace_back(make_spat(c, 0, 0));
            c.out.state = HandoverPending{c.current_visit(), offer, leader.green_mask, c.params.handover_retries,
                                          c.now + c.params.handover_retry_ms};
            c.out.drive = hold(c);
            return;
        }
    }

    if (c.spat_slot()) {
        const std::uint64_t remaining = leader.phase_deadline_ms > c.now ? leader.phase_deadline_ms - c.now : 0;
        c.out.outbox.emplace_back(
            make_spat(c, leader.cleared ? leader.green_mask : 0, static_cast<std::uint32_t>(remaining)));
    }
    c.out.state = leader;
    c.out.drive = hold(c);
}

void run_handover(Context& c, HandoverPending h) {
    const auto& offer = std::get<codec::HandoverOffer>(h.offer.payload);
    if (auto spat = heard_spat(c); spat && (spat->leader_id < c.self.id || spat->leader_id == offer.new_leader_id)) {
        c.out.state = follow(c, *spat);
        c.out.drive = obey(c, *spat);
        return;
    }
    for (const auto& [wsm, accept] : heard_wsm<codec::HandoverAccept>(c)) {
        if (wsm->sender_id == offer.new_leader_id && accept->offer_sender_id == c.self.id) {
            // Obey the new leader once its first Spat lands; red meanwhile.
            const Spat pending{c.intersection().id, offer.new_leader_id, 0, 0, c.now};
            c.out.state = follow(c, pending);
            c.out.drive = hold(c);
            return;
        }
    }
    if (c.now >= h.retry_deadline_ms) {
        if (h.retries_left == 0) {
            run_leader(c, take_office(c, h.previous_mask));
            return;
        }
        --h.retries_left;
        h.retry_deadline_ms = c.now + c.params.handover_retry_ms;
        c.out.outbox.emplace_back(h.offer);
    }
    if (c.spat_slot()) {
        c.out.outbox.emplace_back(make_spat(c, 0, 0));
    }
    c.out.state = std::move(h);
    c.out.drive = hold(c);
}

void run_follower(Context& c, Follower f) {
    if (c.upstream()) {
        for (const auto& [wsm, offer] : heard_wsm<codec::HandoverOffer>(c)) {
            if (offer->new_leader_id != c.self.id ||
                (offer->green_mask & world::direction_bit(c.self.approach)) ||
                !world::is_conflict_free(offer->green_mask)) {
                continue;
            }
            // run_leader answers the offer.
            run_leader(c, take_office(c, offer->green_mask, wsm->sender_id));
            return;
        }
    }
    if (auto spat = heard_spat(c)) {
        f.last_spat = *spat;
        f.spat_deadline_ms = c.now + c.params.spat_timeout_ms;
    }
    if (c.now >= f.spat_deadline_ms) {
        // Leader lost or released.
        run_approaching(c);
        return;
    }
    c.out.drive = obey(c, f.last_spat);
    c.out.state = std::move(f);
}

}  // namespace

StepResult step(const ProtocolState& state, const NeighborTable& neighbors, std::span<const codec::Message> inbox,
                const SelfView& self, std::uint64_t now_ms, const VtlParams& params) {
    Context c{neighbors, inbox, self, now_ms, params, {}};
    c.out.outbox.emplace_back(codec::Bsm{
        .vehicle_id = self.id,
        .timestamp_ms = now_ms,
        .x = self.position.x,
        .y = self.position.y,
        .speed = self.speed,
        .heading = world::heading_degrees(self.heading),
    });

    ProtocolState current = state;
    // Leaving the visited intersection (or losing it) ends every role held there.
    if (auto v = visit_of(current); v && (!self.intersection || *v != c.current_visit())) {
        current = FreeDriving{};
    }

    if (std::holds_alternative<FreeDriving>(current)) {
        if (!self.intersection || self.inside_box ||
            !world::is_approaching(self.position, self.approach, *self.intersection, params.detection_radius)) {
            c.out.state = FreeDriving{};
            c.out.drive = DriveCommand::cruise;
            return std::move(c.out);
        }
        run_approaching(c);
        return std::move(c.out);
    }

    std::visit(
        [&c](const auto& st) {
            using S = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<S, Approaching>) {
                run_approaching(c);
            } else if constexpr (std::is_same_v<S, Electing>) {
                run_electing(c, st);
            } else if constexpr (std::is_same_v<S, Follower>) {
                run_follower(c, st);
            } else if constexpr (std::is_same_v<S, Leader>) {
                run_leader(c, st);
            } else if constexpr (std::is_same_v<S, HandoverPending>) {
                run_handover(c, st);
            }
        },
        current);
    return std::move(c.out);
}

StepResult VtlAgent::tick(std::span<const codec::Message> inbox, const SelfView& self, std::uint64_t now_ms,
                          const VtlParams& params) {
    for (const auto& m : inbox) {
        if (const auto* bsm = std::get_if<codec::Bsm>(&m); bsm && bsm->vehicle_id != id_) {
            neighbors_.observe(*bsm, now_ms);
        }
    }
    neighbors_.evict(now_ms, params.stale_ms);
    StepResult r = step(state_, neighbors_, inbox, self, now_ms, params);
    state_ = r.state;
    return r;
}

}  // namespace vtl::protocol
