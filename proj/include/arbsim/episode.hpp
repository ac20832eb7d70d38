#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arbsim/arbiter.hpp"
#include "arbsim/grid.hpp"
#include "arbsim/links.hpp"
#include "arbsim/random.hpp"
#include "arbsim/scenario.hpp"
#include "arbsim/scene.hpp"
#include "arbsim/threat.hpp"
#include "arbsim/world.hpp"

namespace arbsim {

struct TickRecord {
    std::size_t tick = 0;
    double clock = 0.0;
    KinematicState ego;
    std::map<std::string, KinematicState> participants;
    ThreatMatrix threats;
    ArbitrationResult arbitration;
};

struct TraceLog {
    Scenario scenario;
    std::string config_hash;
    std::vector<TickRecord> ticks;
};

inline WorldState world_from_scenario(const Scenario& s) {
    WorldState world;
    world.ego = s.ego.state;
    world.ego_length = s.ego.length;
    world.ego_width = s.ego.width;
    world.lanes = s.map.lanes;
    world.buildings = s.map.buildings;
    for (const auto& p : s.participants) {
        WorldParticipant wp;
        wp.kind = p.kind;
        wp.state = p.state;
        wp.length = p.length;
        wp.width = p.width;
        wp.annotations = p.annotations;
        world.participants[p.id] = std::move(wp);
    }
    return world;
}

namespace detail {

/// Lane index of a position: nearest centerline within half a lane width
/// (plus a small margin for vehicles straddling the boundary mid-change).
inline std::optional<int> lane_index_of(const Vec2& pos, const std::vector<LaneGeometry>& lanes) {
    std::optional<int> best;
    double best_dist = 1e300;
    for (const auto& lane : lanes) {
        const double d = Polyline(lane.centerline).distance(pos);
        if (d < best_dist) {
            best_dist = d;
            if (d <= 0.5 * lane.width + 0.25) best = lane.index;
        }
    }
    return best;
}

}  // namespace detail

/// Ground truth -> perceived scene plus measurements. Entities arrive
/// pre-detected: participants, lanes and buildings become raw entity records;
/// measurements carry speeds, ranges, bearings and lane indices.
inline std::pair<PerceivedScene, MeasurementSet> perceive(const WorldState& world) {
    PerceivedScene scene;
    MeasurementSet measurements;
    const Vec2 ego_pos{world.ego.x, world.ego.y};

    for (const auto& [id, p] : world.participants) {
        PerceivedEntity e;
        e.id = id;
        e.kind_tag = p.kind;
        e.x = p.state.x;
        e.y = p.state.y;
        e.heading = p.state.heading;
        e.length = p.length;
        e.width = p.width;
        e.annotations = p.annotations;
        scene.entities.push_back(std::move(e));

        Measurement m;
        m.speed = p.state.speed;
        const Vec2 rel = to_body_frame({p.state.x, p.state.y}, ego_pos, world.ego.heading);
        m.range = rel.norm();
        m.bearing = std::atan2(rel.y, rel.x);
        m.lane = detail::lane_index_of({p.state.x, p.state.y}, world.lanes);
        m.length = p.length;
        m.width = p.width;
        measurements.by_id[id] = m;
    }

    for (const auto& lane : world.lanes) {
        const Polyline line(lane.centerline);
        PerceivedEntity e;
        e.id = "Lane" + std::to_string(lane.index);
        e.kind_tag = "Lane";
        const Vec2 mid = line.at(0.5 * line.length());
        e.x = mid.x;
        e.y = mid.y;
        e.heading = wrap_angle(line.heading_at(0.5 * line.length()));
        e.length = std::max(line.length(), 0.1);
        e.width = lane.width;
        scene.entities.push_back(std::move(e));
        Measurement m;
        m.lane = lane.index;
        measurements.by_id["Lane" + std::to_string(lane.index)] = m;
    }

    for (const auto& b : world.buildings) {
        PerceivedEntity e;
        e.id = b.id;
        e.kind_tag = "Building";
        double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
        for (const Vec2& v : b.polygon) {
            min_x = std::min(min_x, v.x);
            max_x = std::max(max_x, v.x);
            min_y = std::min(min_y, v.y);
            max_y = std::max(max_y, v.y);
        }
        e.x = 0.5 * (min_x + max_x);
        e.y = 0.5 * (min_y + max_y);
        e.heading = 0.0;
        e.length = std::max(max_x - min_x, 0.1);
        e.width = std::max(max_y - min_y, 0.1);
        scene.entities.push_back(std::move(e));
    }

    return {std::move(scene), std::move(measurements)};
}

/// One arbitration pass over the current world: objects, links, significant
/// set, threat matrix (pinned rows in golden-fixture mode), selection and
/// description.
inline std::pair<ThreatMatrix, ArbitrationResult> run_tick(const WorldState& world,
                                                           const Scenario& s) {
    const auto [scene, measurements] = perceive(world);
    ObjectSet objects = generate_objects(scene, s.kinds);
    objects = attach_measurements(objects, measurements, world.ego, s.scene_config());
    const LinkSet links = generate_links(objects, s.ego.task, s.rubric, s.map.lane_width);
    const ObjectSet important = significant_objects(objects, links, s.s_min);

    PinnedTables pins;
    if (s.mode == ScenarioMode::GoldenFixture)
        for (const auto& p : s.participants)
            if (p.pinned) pins[p.id] = *p.pinned;

    const ThreatSimConfig threat_cfg = s.threat_config();
    ThreatMatrix matrix =
        simulate_threats(important, links, world.ego, s.ego.task, s.horizon, threat_cfg, pins);

    const ResimulateFn resim = [&](EgoBehavior candidate, const ThreatEntry& e) {
        return resimulate_impact_time(world.ego, s.ego.task, important.at(e.object_id),
                                      e.behavior, candidate, s.horizon, threat_cfg);
    };
    ArbitrationResult result = select_optimal(matrix, s.arbiter, resim);
    result.description = describe(links, result, matrix);
    return {std::move(matrix), std::move(result)};
}

namespace detail {

/// Steers the ego onto the center of its target lane; the selected behavior
/// updates the target lane and the longitudinal command.
class EgoController {
public:
    EgoController(const Scenario& s) : scenario_(s), target_lane_(s.ego.task.target_lane) {}

    ControlInput control(const WorldState& world, EgoBehavior selected) {
        if (selected == EgoBehavior::LaneChangeLeft && scenario_.map.has_lane(target_lane_ + 1))
            target_lane_ += 1;
        if (selected == EgoBehavior::LaneChangeRight && scenario_.map.has_lane(target_lane_ - 1))
            target_lane_ -= 1;

        double accel = 0.0;
        if (selected == EgoBehavior::ReduceSpeed) accel = -scenario_.ego.task.comfort_accel;
        if (selected == EgoBehavior::EmergencyStop) accel = -scenario_.bounds.max_accel;

        double steer = 0.0;
        if (const LaneGeometry* lane = scenario_.map.lane(target_lane_)) {
            const Polyline line(lane->centerline);
            const Vec2 pos{world.ego.x, world.ego.y};
            const double s_here = line.project(pos);
            const Vec2 lateral = to_body_frame(line.at(s_here), pos, world.ego.heading);
            const double heading_err = wrap_angle(line.heading_at(s_here) - world.ego.heading);
            steer = std::clamp(0.1 * lateral.y + 0.8 * heading_err, -scenario_.bounds.max_steer,
                               scenario_.bounds.max_steer);
        }
        return {steer, accel};
    }

    int target_lane() const { return target_lane_; }

private:
    const Scenario& scenario_;
    int target_lane_;
};

/// Scripted or sampled ground-truth controls for one participant.
class ParticipantDriver {
public:
    ParticipantDriver(const ScenarioParticipant& p, const Scenario& s, const RandomSource& root)
        : policy_(p.motion), stop_decel_(3.0) {
        if (policy_ == MotionPolicy::Sampled) {
            RandomSource rng = root.split(p.id);
            controls_ = sample_controls(rng, s.bounds, s.ticks, s.horizon.dt);
            bounds_ = s.bounds;
        } else if (policy_ == MotionPolicy::LaneChangeLeft ||
                   policy_ == MotionPolicy::LaneChangeRight) {
            SceneObject probe;
            probe.id = p.id;
            probe.state = p.state;
            probe.properties["length"] = PropertyValue{p.length};
            probe.properties["width"] = PropertyValue{p.width};
            const ObjectBehavior k = policy_ == MotionPolicy::LaneChangeLeft
                                         ? ObjectBehavior::LaneChangeLeft
                                         : ObjectBehavior::LaneChangeRight;
            profile_.emplace(probe, k, s.threat_config());
        }
    }

    ControlInput control(std::size_t tick, double clock, double current_speed) const {
        switch (policy_) {
            case MotionPolicy::LaneFollow: return {0.0, 0.0};
            case MotionPolicy::Stop: return {0.0, current_speed > 0.0 ? -stop_decel_ : 0.0};
            case MotionPolicy::LaneChangeLeft:
            case MotionPolicy::LaneChangeRight: return profile_->at(clock);
            case MotionPolicy::Sampled: return control_at(controls_, tick, current_speed, bounds_);
        }
        return {};
    }

private:
    MotionPolicy policy_;
    double stop_decel_;
    ControlSequence controls_;
    ControlBounds bounds_;
    std::optional<arbsim::detail::ObjectBehaviorProfile> profile_;
};

}  // namespace detail

/// Run a full episode: per tick the arbitration pipeline runs on the current
/// world, then (closed-loop mode) the selected behavior is mapped to ego
/// controls and the world advances by dt. Ends after the configured tick
/// count or once the ego reaches the end of its task trajectory.
inline TraceLog run_episode(const Scenario& s) {
    TraceLog trace;
    trace.scenario = s;
    trace.config_hash = config_hash(s);

    WorldState world = world_from_scenario(s);
    const RandomSource root(s.seed);
    detail::EgoController ego_controller(s);
    std::map<std::string, detail::ParticipantDriver> drivers;
    for (const auto& p : s.participants)
        drivers.emplace(p.id, detail::ParticipantDriver(p, s, root));

    const Polyline task_path(s.ego.task.waypoints);

    for (std::size_t tick = 0; tick < s.ticks; ++tick) {
        if (tick > 0 && task_path.project({world.ego.x, world.ego.y}) >= task_path.length() - 1.0)
            break;  // destination reached

        TickRecord record;
        record.tick = tick;
        record.clock = world.clock;
        record.ego = world.ego;
        for (const auto& [id, p] : world.participants) record.participants[id] = p.state;

        auto [matrix, result] = run_tick(world, s);
        record.threats = std::move(matrix);
        record.arbitration = std::move(result);
        trace.ticks.push_back(std::move(record));

        if (s.mode == ScenarioMode::ClosedLoop) {
            std::map<std::string, ControlInput> controls;
            controls["ego"] =
                ego_controller.control(world, trace.ticks.back().arbitration.selected);
            for (const auto& [id, p] : world.participants)
                controls[id] = drivers.at(id).control(tick, world.clock, p.state.speed);
            world = advance_world(world, controls, s.horizon.dt);
        }
    }
    return trace;
}

/// Re-run arbitration on a recorded trace's inputs and compare against the
/// recorded results. Returns the ticks that failed to reproduce.
inline std::vector<std::size_t> replay_mismatches(const TraceLog& trace) {
    std::vector<std::size_t> bad;
    WorldState world = world_from_scenario(trace.scenario);
    for (const auto& record : trace.ticks) {
        world.ego = record.ego;
        world.clock = record.clock;
        for (const auto& [id, state] : record.participants) {
            auto it = world.participants.find(id);
            if (it != world.participants.end()) it->second.state = state;
        }
        const ArbitrationResult result = run_tick(world, trace.scenario).second;
        const ArbitrationResult& want = record.arbitration;
        const bool same =
            result.selected == want.selected && result.resolved == want.resolved &&
            result.unresolved == want.unresolved &&
            result.candidates_tried == want.candidates_tried &&
            result.description.text() == want.description.text() &&
            ((!result.max_threat && !want.max_threat) ||
             (result.max_threat && want.max_threat &&
              result.max_threat->object_id == want.max_threat->object_id &&
              result.max_threat->behavior == want.max_threat->behavior &&
              result.max_threat->theta == want.max_threat->theta));
        if (!same) bad.push_back(record.tick);
    }
    return bad;
}

}  // namespace arbsim
