#pragma once

#include <cmath>
#include <vector>

#include "edgetwin/errors.hpp"
#include "edgetwin/rng.hpp"
#include "edgetwin/scenario.hpp"
#include "edgetwin/trajectory.hpp"
#include "edgetwin/types.hpp"

namespace edgetwin {

namespace detail {

inline double reflect_into(double v, double side) {
    // fold back into [0, side]; loops only on pathological overshoot
    while (v < 0.0 || v > side) {
        if (v < 0.0) v = -v;
        if (v > side) v = 2.0 * side - v;
    }
    return v;
}

}  // namespace detail

// Random-waypoint step: walk toward the waypoint at the given speed for one
// slot; on arrival pick a new waypoint and keep walking with the leftover
// budget. Waypoints live inside the square so reflection is only a guard.
inline Position synthetic_mobility(const Position& from, Position& waypoint,
                                   double speed_kmh, double slot_s, double area_side_km,
                                   Rng& rng) {
    if (!(speed_kmh >= 0.0)) throw ConfigError("synthetic_mobility: speed must be >= 0");
    if (speed_kmh == 0.0) return from;
    Position pos = from;
    double remaining_km = speed_kmh / 3600.0 * slot_s;
    for (int hop = 0; hop < 64 && remaining_km > 0.0; ++hop) {
        const double to_wp = distance_km(pos, waypoint);
        if (to_wp <= remaining_km) {
            pos = waypoint;
            remaining_km -= to_wp;
            waypoint = {rng.uniform(0.0, area_side_km), rng.uniform(0.0, area_side_km)};
            if (distance_km(pos, waypoint) == 0.0) break;  // resampled onto ourselves
        } else {
            const double scale = remaining_km / to_wp;
            pos.x_km += (waypoint.x_km - pos.x_km) * scale;
            pos.y_km += (waypoint.y_km - pos.y_km) * scale;
            remaining_km = 0.0;
        }
    }
    pos.x_km = detail::reflect_into(pos.x_km, area_side_km);
    pos.y_km = detail::reflect_into(pos.y_km, area_side_km);
    return pos;
}

// Position source the environment drives: either random-waypoint walkers or
// replayed trajectories (users map onto trajectories round-robin and hold
// their last position once a trajectory runs out).
class MobilitySource {
public:
    // synthetic
    MobilitySource() = default;

    // trajectory replay
    explicit MobilitySource(TrajectorySet trajectories)
        : replay_(true), set_(std::move(trajectories)) {
        if (set_.trajectories.empty())
            throw DataError("MobilitySource: empty trajectory set");
    }

    bool is_replay() const { return replay_; }

    void reset(const std::vector<MobileUser>& users, double area_side_km, Rng& rng) {
        side_ = area_side_km;
        slot_index_ = 0;
        waypoints_.clear();
        if (replay_) return;
        waypoints_.reserve(users.size());
        for (std::size_t i = 0; i < users.size(); ++i)
            waypoints_.push_back({rng.uniform(0.0, side_), rng.uniform(0.0, side_)});
    }

    Position initial_position(const MobileUser& user) const {
        if (!replay_) return user.position;
        return trajectory_for(user.id).positions.front();
    }

    // advance one slot; called once per environment step per user
    Position advance(const MobileUser& user, const Position& current, double speed_kmh,
                     double slot_s, Rng& rng) {
        if (!replay_)
            return synthetic_mobility(current, waypoints_.at(user.id), speed_kmh, slot_s,
                                      side_, rng);
        const auto& pos = trajectory_for(user.id).positions;
        const std::size_t next = std::min(slot_index_ + 1, pos.size() - 1);
        return pos[next];
    }

    void end_of_slot() { ++slot_index_; }

private:
    const Trajectory& trajectory_for(int user_id) const {
        return set_.trajectories[user_id % set_.trajectories.size()];
    }

    bool replay_ = false;
    TrajectorySet set_;
    std::vector<Position> waypoints_;
    double side_ = 1.0;
    std::size_t slot_index_ = 0;
};

}  // namespace edgetwin
