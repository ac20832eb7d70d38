#pragma once

#include <array>
#include <string>

namespace arbsim {

/// Hypothesized behaviors of an observed traffic object.
enum class ObjectBehavior { LaneFollow, LaneChangeRight, LaneChangeLeft, Stop };

inline constexpr std::array<ObjectBehavior, 4> kObjectBehaviors = {
    ObjectBehavior::LaneFollow, ObjectBehavior::LaneChangeRight,
    ObjectBehavior::LaneChangeLeft, ObjectBehavior::Stop};

/// Behaviors the arbiter may select for the ego vehicle.
enum class EgoBehavior { KeepLane, ReduceSpeed, LaneChangeLeft, LaneChangeRight, EmergencyStop };

inline constexpr std::array<EgoBehavior, 5> kEgoBehaviors = {
    EgoBehavior::KeepLane, EgoBehavior::ReduceSpeed, EgoBehavior::LaneChangeLeft,
    EgoBehavior::LaneChangeRight, EgoBehavior::EmergencyStop};

inline const char* to_string(ObjectBehavior b) {
    switch (b) {
        case ObjectBehavior::LaneFollow: return "LaneFollow";
        case ObjectBehavior::LaneChangeRight: return "LaneChangeRight";
        case ObjectBehavior::LaneChangeLeft: return "LaneChangeLeft";
        case ObjectBehavior::Stop: return "Stop";
    }
    return "?";
}

inline const char* to_string(EgoBehavior b) {
    switch (b) {
        case EgoBehavior::KeepLane: return "KeepLane";
        case EgoBehavior::ReduceSpeed: return "ReduceSpeed";
        case EgoBehavior::LaneChangeLeft: return "LaneChangeLeft";
        case EgoBehavior::LaneChangeRight: return "LaneChangeRight";
        case EgoBehavior::EmergencyStop: return "EmergencyStop";
    }
    return "?";
}

inline bool parse_object_behavior(const std::string& s, ObjectBehavior& out) {
    for (const ObjectBehavior b : kObjectBehaviors)
        if (s == to_string(b)) {
            out = b;
            return true;
        }
    return false;
}

inline bool parse_ego_behavior(const std::string& s, EgoBehavior& out) {
    for (const EgoBehavior b : kEgoBehaviors)
        if (s == to_string(b)) {
            out = b;
            return true;
        }
    return false;
}

}  // namespace arbsim
