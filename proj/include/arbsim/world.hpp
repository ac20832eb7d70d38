#pragma once

#include <map>
#include <string>
#include <vector>

#include "arbsim/geometry.hpp"
#include "arbsim/kinematics.hpp"

namespace arbsim {

struct LaneGeometry {
    int index = 1;  // 1 = rightmost
    std::vector<Vec2> centerline;
    double width = 3.5;
};

struct BuildingGeometry {
    std::string id;
    std::vector<Vec2> polygon;
};

/// A traffic participant in the simulator ground truth.
struct WorldParticipant {
    std::string kind = "TrafficCar";
    KinematicState state;
    double length = 4.5;
    double width = 2.0;
    std::map<std::string, std::string> annotations;
    ControlSequence controls;  // sampled sequences; empty when scripted

    OrientedRect footprint() const {
        return {{state.x, state.y}, state.heading, length, width};
    }
};

/// Simulator ground truth: all kinematic states plus static geometry.
struct WorldState {
    KinematicState ego;
    double ego_length = 4.5;
    double ego_width = 2.0;
    std::map<std::string, WorldParticipant> participants;
    std::vector<LaneGeometry> lanes;
    std::vector<BuildingGeometry> buildings;
    double clock = 0.0;  // s, monotone non-decreasing

    OrientedRect ego_footprint() const {
        return {{ego.x, ego.y}, ego.heading, ego_length, ego_width};
    }
};

/// Advance every dynamic state one step under the given controls (absent ids
/// coast with zero control). The ego is stepped when a control is keyed under
/// "ego". Static geometry is untouched; the clock advances by dt.
inline WorldState advance_world(const WorldState& world,
                                const std::map<std::string, ControlInput>& controls, double dt) {
    if (dt <= 0.0) throw InvalidStepError(dt);
    WorldState next = world;
    auto control_for = [&controls](const std::string& id) {
        auto it = controls.find(id);
        return it == controls.end() ? ControlInput{} : it->second;
    };
    next.ego = step_single_track(world.ego, control_for("ego"), dt);
    for (auto& [id, participant] : next.participants)
        participant.state = step_single_track(participant.state, control_for(id), dt);
    next.clock = world.clock + dt;
    return next;
}

}  // namespace arbsim
