#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arbsim/geometry.hpp"
#include "arbsim/scene.hpp"

namespace arbsim {

/// Reserved link source id for the ego vehicle.
inline const std::string kEgoId = "ego";

/// The ego's route plus the comfort and speed properties threats are judged
/// against.
struct TaskTrajectory {
    std::vector<Vec2> waypoints;
    int target_lane = 1;
    std::string destination;
    double desired_speed = 15.0;  // m/s
    double comfort_accel = 2.0;   // max |a| for comfortable maneuvers, m/s^2

    void validate() const {
        if (waypoints.size() < 2)
            throw SemanticError("task/waypoints", "need at least 2 waypoints");
        if (desired_speed <= 0.0)
            throw SemanticError("task/desired_speed", "must be > 0");
    }

    Polyline polyline() const { return Polyline(waypoints); }
};

enum class LinkClass { Internal, External };

struct Link {
    std::string source;  // kEgoId or an object id
    std::string target;
    LinkClass link_class = LinkClass::Internal;
    double significance = 0.0;  // in [0, 1]
    std::string rationale;      // rubric rule that fired
};

struct LinkSet {
    std::map<std::pair<std::string, std::string>, Link> links;

    std::size_t size() const { return links.size(); }
    void insert(Link l) { links[{l.source, l.target}] = std::move(l); }
    const Link* find(const std::string& source, const std::string& target) const {
        auto it = links.find({source, target});
        return it == links.end() ? nullptr : &it->second;
    }

    /// Maximal incoming internal-link significance of an object, if any.
    std::optional<double> internal_significance(const std::string& id) const {
        std::optional<double> best;
        for (const auto& [key, link] : links)
            if (link.link_class == LinkClass::Internal && link.target == id)
                if (!best || link.significance > *best) best = link.significance;
        return best;
    }
};

/// One rubric rule. Unset fields are wildcards; rules are evaluated in order
/// and the first match wins, so specific rules go before generic ones.
struct SignificanceRule {
    std::optional<std::string> kind;
    std::optional<Relation> relation;
    std::optional<RangeBand> band;
    double significance = 0.0;
    std::string tag;

    bool matches(const SceneObject& obj) const {
        if (kind && obj.kind != *kind) return false;
        if (relation && obj.relation != *relation) return false;
        if (band && obj.band != *band) return false;
        return true;
    }
};

/// Traffic-rule significance table, data not code. The default calibration
/// assigns: ahead/far 0.6, left/near 0.3, right/near 0.1, ahead/near 0.9,
/// behind 0.05, crossing pedestrian near 0.95, lanes 0.04, buildings 0.01.
struct SignificanceRubric {
    std::vector<SignificanceRule> rules;
    double fallback = 0.05;
    std::string fallback_tag = "default";
    double external_occupancy = 0.5;   // object -> occupied-lane links
    bool full_external_mesh = false;   // object <-> object pairs, off by default
    double external_pair = 0.1;

    std::pair<double, std::string> score(const SceneObject& obj) const {
        for (const auto& rule : rules)
            if (rule.matches(obj)) return {rule.significance, rule.tag};
        return {fallback, fallback_tag};
    }

    static SignificanceRubric standard() {
        SignificanceRubric r;
        r.rules = {
            {"Pedestrian", Relation::Crossing, RangeBand::Near, 0.95, "pedestrian-crossing-near"},
            {"Building", std::nullopt, std::nullopt, 0.01, "building"},
            {"Lane", std::nullopt, std::nullopt, 0.04, "lane"},
            {"TrafficSign", std::nullopt, std::nullopt, 0.1, "traffic-sign"},
            {std::nullopt, Relation::SameLaneAhead, RangeBand::Near, 0.9, "same-lane-ahead-near"},
            {std::nullopt, Relation::SameLaneAhead, RangeBand::Far, 0.6, "same-lane-ahead-far"},
            {std::nullopt, Relation::SameLaneBehind, std::nullopt, 0.05, "same-lane-behind"},
            {std::nullopt, Relation::LeftAdjacent, RangeBand::Near, 0.3, "left-adjacent-near"},
            {std::nullopt, Relation::LeftAdjacent, RangeBand::Far, 0.15, "left-adjacent-far"},
            {std::nullopt, Relation::RightAdjacent, RangeBand::Near, 0.1, "right-adjacent-near"},
            {std::nullopt, Relation::RightAdjacent, RangeBand::Far, 0.05, "right-adjacent-far"},
            {std::nullopt, Relation::Crossing, RangeBand::Near, 0.7, "crossing-near"},
            {std::nullopt, Relation::Crossing, RangeBand::Far, 0.4, "crossing-far"},
            {std::nullopt, Relation::OffRoad, std::nullopt, 0.01, "off-road"},
        };
        return r;
    }
};

namespace detail {

/// A static object participates in the scene network when it sits on or next
/// to the ego's route: same or adjacent lane index, or within two lane widths
/// of the route polyline.
inline bool near_task_trajectory(const SceneObject& obj, const TaskTrajectory& task,
                                 double lane_width) {
    if (obj.lane && std::abs(*obj.lane - task.target_lane) <= 1) return true;
    const Polyline path(task.waypoints);
    if (path.empty()) return false;
    return path.distance({obj.state.x, obj.state.y}) <= 2.0 * lane_width;
}

}  // namespace detail

/// Build the scene network: internal links ego->object for every dynamic
/// object and every static object on or adjacent to the task trajectory, and
/// external links from each dynamic object to the lane it occupies. Pure in
/// its inputs; rationale tags are byte-stable.
inline LinkSet generate_links(const ObjectSet& objects, const TaskTrajectory& task,
                              const SignificanceRubric& rubric, double lane_width = 3.5) {
    LinkSet out;

    std::map<int, std::string> lane_ids;  // lane index -> lane object id
    for (const auto& [id, obj] : objects.objects)
        if (obj.kind == "Lane" && obj.lane) lane_ids[*obj.lane] = id;

    for (const auto& [id, obj] : objects.objects) {
        if (!obj.dynamic && !detail::near_task_trajectory(obj, task, lane_width)) continue;
        const auto [s, tag] = rubric.score(obj);
        out.insert({kEgoId, id, LinkClass::Internal, s, tag});

        if (obj.dynamic && obj.lane) {
            auto lane_it = lane_ids.find(*obj.lane);
            if (lane_it != lane_ids.end())
                out.insert({id, lane_it->second, LinkClass::External,
                            rubric.external_occupancy, "occupies-lane"});
        }
    }

    if (rubric.full_external_mesh) {
        for (const auto& [ida, a] : objects.objects) {
            if (!a.dynamic) continue;
            for (const auto& [idb, b] : objects.objects) {
                if (!b.dynamic || ida == idb) continue;
                if (!out.find(ida, idb))
                    out.insert({ida, idb, LinkClass::External, rubric.external_pair, "object-pair"});
            }
        }
    }
    return out;
}

/// The significant subset: objects whose maximal incoming internal-link
/// significance reaches s_min. Monotone decreasing in s_min.
inline ObjectSet significant_objects(const ObjectSet& objects, const LinkSet& links,
                                     double s_min) {
    ObjectSet out;
    for (const auto& [id, obj] : objects.objects) {
        const auto s = links.internal_significance(id);
        if (s && *s >= s_min) out.insert(obj);
    }
    return out;
}

}  // namespace arbsim
