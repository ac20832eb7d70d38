#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arbsim/behavior.hpp"
#include "arbsim/errors.hpp"
#include "arbsim/geometry.hpp"
#include "arbsim/kinematics.hpp"
#include "arbsim/links.hpp"
#include "arbsim/scene.hpp"

namespace arbsim {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Simulation horizon [t_c, t_c + delta] stepped at dt.
struct TimeHorizon {
    double t_c = 0.0;
    double delta = 40.0;
    double dt = 0.1;

    void validate() const {
        if (delta <= 0.0) throw SemanticError("horizon/delta", "must be > 0");
        if (dt <= 0.0 || dt > delta) throw SemanticError("horizon/dt", "need 0 < dt <= delta");
    }

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(delta / dt)); }
};

/// Probability per object behavior; sums to 1 within 1e-9.
struct BehaviorDistribution {
    std::array<double, 4> p{0.0, 0.0, 0.0, 0.0};

    double operator[](ObjectBehavior b) const { return p[static_cast<std::size_t>(b)]; }
    double& operator[](ObjectBehavior b) { return p[static_cast<std::size_t>(b)]; }

    double sum() const { return p[0] + p[1] + p[2] + p[3]; }
    bool normalized(double tol = 1e-9) const { return std::abs(sum() - 1.0) <= tol; }
};

struct ThreatEntry {
    std::string object_id;
    ObjectBehavior behavior = ObjectBehavior::LaneFollow;
    double probability = 0.0;
    double impact_time = kInfiniteTime;  // s; infinity when no impact in horizon
    double significance = 0.0;           // link significance of the object
    double theta = 0.0;                  // threat level, significance * probability when active
    EgoBehavior counter = EgoBehavior::KeepLane;
    bool active = false;                 // impact_time finite and <= delta
    Relation relation = Relation::OffRoad;
    RangeBand band = RangeBand::Far;
};

struct ThreatMatrix {
    std::vector<ThreatEntry> entries;  // ordered by (object_id, behavior)
    TimeHorizon horizon;

    const ThreatEntry* find(const std::string& id, ObjectBehavior k) const {
        for (const auto& e : entries)
            if (e.object_id == id && e.behavior == k) return &e;
        return nullptr;
    }

    std::vector<std::string> object_ids() const {
        std::vector<std::string> ids;
        for (const auto& e : entries)
            if (ids.empty() || ids.back() != e.object_id) ids.push_back(e.object_id);
        return ids;
    }
};

struct ThreatSimConfig {
    double lane_width = 3.5;
    int lane_count = 0;  // 0 = unknown; disables leftmost-lane pruning
    double stop_decel = 3.0;             // m/s^2, object Stop behavior
    double lane_change_duration = 3.0;   // s
    double reduce_speed_decel = 2.0;     // m/s^2, ego ReduceSpeed
    double emergency_decel = 4.0;        // m/s^2, ego EmergencyStop
    double max_steer = 0.5;              // rad
    double ego_length = 4.5;
    double ego_width = 2.0;
};

/// Pinned per-object probability and impact-time rows, bypassing simulation.
struct PinnedThreat {
    BehaviorDistribution probabilities;
    std::array<double, 4> impact_times{kInfiniteTime, kInfiniteTime, kInfiniteTime,
                                       kInfiniteTime};
};

using PinnedTables = std::map<std::string, PinnedThreat>;

/// Annotation-driven behavior probabilities. A right turn signal concentrates
/// mass on LaneChangeRight, stop intent on Stop, otherwise LaneFollow
/// dominates. Behaviors that would leave the road (lane change out of an edge
/// lane) are dropped and the remaining mass renormalized.
inline BehaviorDistribution predict_behavior_distribution(const SceneObject& obj,
                                                          int lane_count = 0) {
    if (!obj.dynamic) throw StaticObjectError(obj.id);

    BehaviorDistribution d;
    const auto signal = obj.text_property("turn_signal");
    const auto intent = obj.text_property("intent");
    if (signal && *signal == "right") {
        d.p = {0.2, 0.59, 0.01, 0.2};
    } else if (signal && *signal == "left") {
        d.p = {0.2, 0.01, 0.59, 0.2};
    } else if ((intent && *intent == "stop") || obj.flag_property("braking")) {
        d.p = {0.2, 0.2, 0.1, 0.5};
    } else {
        d.p = {0.6, 0.1, 0.1, 0.2};
    }

    if (obj.lane) {
        if (*obj.lane <= 1) d[ObjectBehavior::LaneChangeRight] = 0.0;
        if (lane_count > 0 && *obj.lane >= lane_count) d[ObjectBehavior::LaneChangeLeft] = 0.0;
        const double total = d.sum();
        if (total > 0.0) {
            for (double& v : d.p) v /= total;
        } else {
            d.p = {1.0, 0.0, 0.0, 0.0};
        }
    }
    return d;
}

namespace detail {

/// Two-arc lane change: solve the per-arc turn angle phi so that the lateral
/// displacement over the maneuver equals one lane width,
/// v * T * (1 - cos phi) / phi = w. Returns 0 when the speed is too low for
/// the maneuver to fit.
inline double lane_change_arc_angle(double speed, double duration, double lane_width) {
    const double travel = speed * duration;
    if (travel <= 0.0) return 0.0;
    const double target = lane_width / travel;
    auto f = [](double phi) { return (1.0 - std::cos(phi)) / phi; };
    // f is increasing on (0, ~2.331]; beyond its maximum the change is infeasible
    const double phi_peak = 2.331122;
    if (target >= f(phi_peak)) return 0.0;
    double lo = 1e-9, hi = phi_peak;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Per-step control profile realizing an object behavior on the single-track
/// model.
class ObjectBehaviorProfile {
public:
    ObjectBehaviorProfile(const SceneObject& obj, ObjectBehavior k, const ThreatSimConfig& cfg)
        : behavior_(k), cfg_(cfg) {
        if (k == ObjectBehavior::LaneChangeLeft || k == ObjectBehavior::LaneChangeRight) {
            const double phi =
                lane_change_arc_angle(obj.state.speed, cfg.lane_change_duration, cfg.lane_width);
            if (phi > 0.0) {
                const double radius = obj.state.speed * cfg.lane_change_duration / (2.0 * phi);
                steer_ = std::clamp(std::atan(obj.state.wheelbase / radius), 0.0, cfg.max_steer);
                if (k == ObjectBehavior::LaneChangeRight) steer_ = -steer_;
            }
        }
    }

    ControlInput at(double t) const {
        switch (behavior_) {
            case ObjectBehavior::LaneFollow:
                return {0.0, 0.0};
            case ObjectBehavior::Stop:
                return {0.0, -cfg_.stop_decel};
            case ObjectBehavior::LaneChangeLeft:
            case ObjectBehavior::LaneChangeRight: {
                const double half = 0.5 * cfg_.lane_change_duration;
                if (t < half) return {steer_, 0.0};
                if (t < cfg_.lane_change_duration) return {-steer_, 0.0};
                return {0.0, 0.0};
            }
        }
        return {};
    }

private:
    ObjectBehavior behavior_;
    ThreatSimConfig cfg_;
    double steer_ = 0.0;
};

/// Sampled object footprints over the horizon under a hypothesized behavior.
inline std::vector<OrientedRect> simulate_object(const SceneObject& obj, ObjectBehavior k,
                                                 const TimeHorizon& h,
                                                 const ThreatSimConfig& cfg) {
    const ObjectBehaviorProfile profile(obj, k, cfg);
    std::vector<OrientedRect> frames;
    frames.reserve(h.steps() + 1);
    KinematicState s = obj.state;
    const double len = obj.length();
    const double wid = obj.width();
    frames.push_back({{s.x, s.y}, s.heading, len, wid});
    for (std::size_t i = 0; i < h.steps(); ++i) {
        s = step_single_track(s, profile.at(static_cast<double>(i) * h.dt), h.dt);
        frames.push_back({{s.x, s.y}, s.heading, len, wid});
    }
    return frames;
}

/// Ego pose along the task trajectory under a candidate ego behavior. Lane
/// changes follow a fixed-duration cosine offset onto the adjacent lane
/// center; speed changes are constant decelerations floored at zero.
class EgoMotion {
public:
    EgoMotion(const KinematicState& ego, const TaskTrajectory& task, EgoBehavior behavior,
              const ThreatSimConfig& cfg)
        : path_(task.waypoints), behavior_(behavior), cfg_(cfg), v0_(ego.speed) {
        s0_ = path_.project({ego.x, ego.y});
        switch (behavior) {
            case EgoBehavior::ReduceSpeed: decel_ = cfg.reduce_speed_decel; break;
            case EgoBehavior::EmergencyStop: decel_ = cfg.emergency_decel; break;
            default: decel_ = 0.0; break;
        }
    }

    OrientedRect footprint_at(double t) const {
        double travelled;
        if (decel_ > 0.0) {
            const double t_stop = v0_ / decel_;
            const double tt = std::min(t, t_stop);
            travelled = v0_ * tt - 0.5 * decel_ * tt * tt;
        } else {
            travelled = v0_ * t;
        }
        const double s = s0_ + travelled;
        Vec2 pos = path_.at(s);
        const double heading = path_.heading_at(s);
        if (behavior_ == EgoBehavior::LaneChangeLeft || behavior_ == EgoBehavior::LaneChangeRight) {
            const double T = cfg_.lane_change_duration;
            const double frac = 0.5 * (1.0 - std::cos(kPi * std::min(t, T) / T));
            const double offset = cfg_.lane_width * frac *
                                  (behavior_ == EgoBehavior::LaneChangeLeft ? 1.0 : -1.0);
            pos = pos + rotate({0.0, 1.0}, heading) * offset;
        }
        return {pos, heading, cfg_.ego_length, cfg_.ego_width};
    }

private:
    Polyline path_;
    EgoBehavior behavior_;
    ThreatSimConfig cfg_;
    double v0_;
    double s0_ = 0.0;
    double decel_ = 0.0;
};

}  // namespace detail

/// Earliest time in (0, delta] at which the object's footprint, forward
/// simulated under behavior k, intersects the ego footprint while the ego
/// executes `ego_behavior`. Resolution is the horizon dt; infinity when the
/// footprints never meet.
inline double resimulate_impact_time(const KinematicState& ego, const TaskTrajectory& task,
                                     const SceneObject& obj, ObjectBehavior k,
                                     EgoBehavior ego_behavior, const TimeHorizon& h,
                                     const ThreatSimConfig& cfg = {}) {
    h.validate();
    const auto frames = detail::simulate_object(obj, k, h, cfg);
    const detail::EgoMotion ego_motion(ego, task, ego_behavior, cfg);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const double t = static_cast<double>(i) * h.dt;
        if (rects_overlap(ego_motion.footprint_at(t), frames[i])) return t;
    }
    return kInfiniteTime;
}

/// Impact time with the ego continuing its task trajectory at current speed.
inline double impact_time(const KinematicState& ego, const TaskTrajectory& task,
                          const SceneObject& obj, ObjectBehavior k, const TimeHorizon& h,
                          const ThreatSimConfig& cfg = {}) {
    return resimulate_impact_time(ego, task, obj, k, EgoBehavior::KeepLane, h, cfg);
}

/// First-choice ego counter for an object behavior, keyed by the object's
/// relation to the ego. Threats converging on the ego lane ahead call for
/// speed reduction; a stopped crossing obstacle calls for a full stop.
inline EgoBehavior counter_behavior(const SceneObject& obj, ObjectBehavior k) {
    const Relation rel = obj.relation.value_or(Relation::OffRoad);
    switch (rel) {
        case Relation::SameLaneAhead:
            return (k == ObjectBehavior::LaneFollow || k == ObjectBehavior::Stop)
                       ? EgoBehavior::ReduceSpeed
                       : EgoBehavior::KeepLane;
        case Relation::LeftAdjacent:
            return k == ObjectBehavior::LaneChangeRight ? EgoBehavior::ReduceSpeed
                                                        : EgoBehavior::KeepLane;
        case Relation::RightAdjacent:
            return k == ObjectBehavior::LaneChangeLeft ? EgoBehavior::ReduceSpeed
                                                       : EgoBehavior::KeepLane;
        case Relation::Crossing:
            return k == ObjectBehavior::Stop ? EgoBehavior::EmergencyStop
                                             : EgoBehavior::ReduceSpeed;
        case Relation::SameLaneBehind:
        case Relation::OffRoad:
            return EgoBehavior::KeepLane;
    }
    return EgoBehavior::KeepLane;
}

/// Simulate every (object, behavior) cell for the significant set: behavior
/// probability, impact time (pinned rows bypass the simulation), threat level
/// theta = significance * probability for active cells, and the counter
/// behavior. Static members are skipped; behavior threats are defined for
/// dynamic objects. Deterministic: entries ordered by (object id, behavior).
inline ThreatMatrix simulate_threats(const ObjectSet& important, const LinkSet& links,
                                     const KinematicState& ego, const TaskTrajectory& task,
                                     const TimeHorizon& h, const ThreatSimConfig& cfg = {},
                                     const PinnedTables& pinned = {}) {
    h.validate();
    ThreatMatrix matrix;
    matrix.horizon = h;

    for (const auto& [id, obj] : important.objects) {
        if (!obj.dynamic) continue;
        const auto significance = links.internal_significance(id);
        if (!significance) throw MissingLinkError(id);

        const auto pin = pinned.find(id);
        const BehaviorDistribution dist = pin != pinned.end()
                                              ? pin->second.probabilities
                                              : predict_behavior_distribution(obj, cfg.lane_count);

        for (const ObjectBehavior k : kObjectBehaviors) {
            ThreatEntry e;
            e.object_id = id;
            e.behavior = k;
            e.significance = *significance;
            e.probability = dist[k];
            e.impact_time = pin != pinned.end()
                                ? pin->second.impact_times[static_cast<std::size_t>(k)]
                                : impact_time(ego, task, obj, k, h, cfg);
            e.active = std::isfinite(e.impact_time) && e.impact_time <= h.delta;
            e.theta = e.active ? e.significance * e.probability : 0.0;
            e.counter = counter_behavior(obj, k);
            e.relation = obj.relation.value_or(Relation::OffRoad);
            e.band = obj.band.value_or(RangeBand::Far);
            matrix.entries.push_back(std::move(e));
        }
    }
    return matrix;
}

}  // namespace arbsim
