#include "vtl/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtl::kinematics {

void KinParams::validate() const {
    if (!(target_speed > 0.0) || !(accel > 0.0) || !(decel > 0.0)) {
        throw std::invalid_argument("kinematics: target_speed, accel and decel must be positive");
    }
}

double max_entry_speed(double speed, double distance, double max_speed, double decel, double dt) noexcept {
    // v'^2 <= vmax^2 + 2 decel (d - (v + v') dt / 2), solved for v'.
    const double b = decel * dt;
    const double c = max_speed * max_speed + 2.0 * decel * distance - b * speed;
    if (c <= 0.0) {
        return 0.0;
    }
    return (-b + std::sqrt(b * b + 4.0 * c)) / 2.0;
}

VehicleKin advance_kinematics(const VehicleKin& v, DriveCommand cmd, double dt, const Lookahead& ahead) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("advance_kinematics: dt must be positive");
    }
    const KinParams& p = v.params;

    double cap = p.target_speed;
    for (const SpeedZone& z : ahead.zones) {
        if (z.start <= 0.0 && z.end >= 0.0) {
            cap = std::min(cap, z.max_speed);
        }
    }
    double next = v.speed > cap ? std::max(cap, v.speed - p.decel * dt) : std::min(cap, v.speed + p.accel * dt);
    for (const SpeedZone& z : ahead.zones) {
        if (z.start > 0.0) {
            next = std::min(next, max_entry_speed(v.speed, z.start, z.max_speed, p.decel, dt));
        }
    }

    std::optional<double> stop = ahead.queue_gap;
    if (cmd == DriveCommand::stop_at_line && ahead.stop_line) {
        stop = stop ? std::min(*stop, *ahead.stop_line) : *ahead.stop_line;
    }
    if (stop) {
        stop = std::max(0.0, *stop);
        if (v.speed == 0.0 && *stop <= kStopTolerance) {
            return VehicleKin{v.id, v.progress, 0.0, p};
        }
        next = std::min(next, max_entry_speed(v.speed, *stop, 0.0, p.decel, dt));
    }
    next = std::max(0.0, next);

    double moved = 0.5 * (v.speed + next) * dt;
    if (stop && moved >= *stop) {
        moved = *stop;
        next = 0.0;
    }
    return VehicleKin{v.id, v.progress + moved, next, p};
}

}  // namespace vtl::kinematics
