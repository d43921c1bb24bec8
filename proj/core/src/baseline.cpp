#include "vtl/baseline.hpp"

#include <algorithm>

#include "vtl/kinematics.hpp"

namespace vtl::baseline {

bool has_right_of_way_over(world::Direction other, world::Direction self) noexcept {
    // Coming from self's right means travelling toward self's left.
    return other == world::left_of(self);
}

std::vector<VehicleId> grant_order(std::vector<Arrival> queue) {
    std::stable_sort(queue.begin(), queue.end(),
                     [](const Arrival& a, const Arrival& b) { return a.arrival_ms < b.arrival_ms; });
    std::vector<VehicleId> order;
    order.reserve(queue.size());
    auto group_begin = queue.begin();
    while (group_begin != queue.end()) {
        auto group_end = std::find_if(group_begin, queue.end(),
                                      [&](const Arrival& a) { return a.arrival_ms != group_begin->arrival_ms; });
        std::vector<Arrival> group(group_begin, group_end);
        while (!group.empty()) {
            auto free_of_right = [&](const Arrival& a) {
                return std::none_of(group.begin(), group.end(), [&](const Arrival& b) {
                    return b.id != a.id && has_right_of_way_over(b.approach, a.approach);
                });
            };
            auto pick = group.end();
            for (auto it = group.begin(); it != group.end(); ++it) {
                if (free_of_right(*it) && (pick == group.end() || it->id < pick->id)) {
                    pick = it;
                }
            }
            if (pick == group.end()) {
                // Everyone has someone on their right: deadlock broken by id.
                pick = std::min_element(group.begin(), group.end(),
                                        [](const Arrival& a, const Arrival& b) { return a.id < b.id; });
            }
            order.push_back(pick->id);
            group.erase(pick);
        }
        group_begin = group_end;
    }
    return order;
}

std::map<VehicleId, DriveCommand> StopSignController::step(std::span<const VehicleObservation> vehicles,
                                                           std::uint64_t now_ms) {
    std::map<VehicleId, const VehicleObservation*> by_id;
    for (const auto& v : vehicles) {
        by_id[v.id] = &v;
    }

    // Release boxes whose crossing vehicle has moved on (or left the run).
    for (auto& [xid, st] : states_) {
        if (!st.crossing) {
            continue;
        }
        const auto it = by_id.find(*st.crossing);
        const auto cl = cleared_.find(*st.crossing);
        const bool still_there = it != by_id.end() && cl != cleared_.end() && it->second->intersection == xid &&
                                 it->second->visit_seq == cl->second.seq;
        if (!still_there) {
            st.crossing.reset();
        }
    }
    std::erase_if(cleared_, [&](const auto& kv) {
        const auto it = by_id.find(kv.first);
        return it == by_id.end() || it->second->visit_seq != kv.second.seq;
    });

    // Full stops at the line join the queue.
    for (const auto& v : vehicles) {
        if (!v.intersection || v.inside_box || cleared_.contains(v.id)) {
            continue;
        }
        if (v.speed == 0.0 && v.distance_to_stop_line <= kinematics::kStopTolerance) {
            auto& q = states_[*v.intersection].queue;
            const bool queued = std::any_of(q.begin(), q.end(), [&](const Arrival& a) { return a.id == v.id; });
            if (!queued) {
                q.push_back(Arrival{v.id, now_ms, v.approach});
            }
        }
    }

    for (auto& [xid, st] : states_) {
        if (st.crossing || st.queue.empty()) {
            continue;
        }
        const VehicleId next = grant_order(st.queue).front();
        const auto pos = std::find_if(st.queue.begin(), st.queue.end(), [&](const Arrival& a) { return a.id == next; });
        if (now_ms < pos->arrival_ms + params_.min_stop_ms) {
            continue;
        }
        st.crossing = next;
        cleared_[next] = Clearance{xid, by_id.at(next)->visit_seq};
        grants_.emplace_back(xid, next);
        st.queue.erase(pos);
    }

    std::map<VehicleId, DriveCommand> out;
    for (const auto& v : vehicles) {
        if (!v.intersection) {
            out[v.id] = DriveCommand::cruise;
        } else if (v.inside_box || cleared_.contains(v.id)) {
            out[v.id] = DriveCommand::proceed;
        } else {
            out[v.id] = DriveCommand::stop_at_line;
        }
    }
    return out;
}

}  // namespace vtl::baseline
